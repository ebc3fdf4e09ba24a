from fractions import Fraction

import pytest

from spintensor.algebra import ONE, ZERO, GaussianRational, Matrix, x
from spintensor.generate import rand_unimodular
from spintensor.spingroup import (
    _PHI_TABLE,
    _PRINTED_S11,
    ETA,
    VECTOR,
    NonUnimodularError,
    check_homomorphism,
    is_lorentz,
    lorentz_violations,
    sigma0,
    sl2_inverse,
    spinor_matrix,
    two_to_one_witness,
    varphi,
)


def test_identity_and_minus_identity():
    assert varphi(sigma0()) == Matrix.identity(VECTOR)
    S, same = two_to_one_witness(sigma0())
    assert same and S == Matrix.identity(VECTOR)


def test_boost_along_z():
    # diag(2, 1/2): (|2|^2 + 1/4)/2 = 17/8 and (|2|^2 - 1/4)/2 = 15/8
    S = varphi(spinor_matrix([[2, 0], [0, Fraction(1, 2)]]))
    expect = {(0, 0): Fraction(17, 8), (3, 3): Fraction(17, 8), (0, 3): Fraction(15, 8),
              (3, 0): Fraction(15, 8), (1, 1): 1, (2, 2): 1}
    for a in VECTOR:
        for b in VECTOR:
            assert S[a, b] == ONE.scale(expect.get((a, b), 0))
    assert is_lorentz(S)


def test_rotation_about_z():
    # diag(i, -i) rotates by pi about the z axis
    S = varphi(spinor_matrix([[GaussianRational(0, 1), 0], [0, GaussianRational(0, -1)]]))
    assert S == Matrix([[ONE, ZERO, ZERO, ZERO], [ZERO, -ONE, ZERO, ZERO],
                        [ZERO, ZERO, -ONE, ZERO], [ZERO, ZERO, ZERO, ONE]], VECTOR)


def test_random_images_are_lorentz(rng):
    for _ in range(20):
        M = rand_unimodular(rng)
        assert lorentz_violations(varphi(M)) == []
        assert varphi(-M) == varphi(M)


def test_homomorphism_and_inverse(rng):
    for _ in range(10):
        A, B = rand_unimodular(rng), rand_unimodular(rng)
        assert check_homomorphism(A, B)
        assert varphi(sl2_inverse(A)) == varphi(A).inverse()


def test_polynomial_entries():
    M = spinor_matrix([[1, x(1)], [0, 1]])
    S = varphi(M)
    assert S.transpose() @ ETA @ S == ETA
    assert varphi(sl2_inverse(M)) @ S == Matrix.identity(VECTOR)


def test_rejects_non_unimodular():
    with pytest.raises(NonUnimodularError) as info:
        varphi(spinor_matrix([[2, 0], [0, 1]]))
    assert info.value.det == ONE.scale(2)


def test_printed_s11_breaks_metric():
    # the diagonal-pairing variant of S^1_1 agrees on diagonal matrices only
    table = dict(_PHI_TABLE)
    table[(1, 1)] = _PRINTED_S11
    diag = spinor_matrix([[2, 0], [0, Fraction(1, 2)]])
    shear = spinor_matrix([[1, 1], [0, 1]])
    assert varphi(diag, table) == varphi(diag)
    assert "metric" in lorentz_violations(varphi(shear, table))
    assert lorentz_violations(varphi(shear)) == []
