"""SL(2,C), the special orthochronous Lorentz group, and the covering map phi.

Matrices are :class:`~spintensor.algebra.Matrix` objects.  Spinor matrices
use indices 1..2 and Lorentz matrices use 0..3.  Entries may be constants or
polynomials in the base coordinates, so x-dependent transition functions go
through the same code.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import ONE, ZERO, GaussianRational, Matrix, ScalarExpr, _cadd, _cconj, _cmul, _cneg, as_expr

SPINOR = (1, 2)
VECTOR = (0, 1, 2, 3)

ETA = Matrix.from_function(VECTOR, lambda a, b: (ONE if a == 0 else -ONE) if a == b else ZERO)


class NonUnimodularError(ValueError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"matrix is not unimodular: det = {det}")


# Each Lorentz component is a sum of terms sign * conj(M[a]) * M[b] divided by
# 2 (real rows) or 2i.  Entries are written (sign, (row, col) of the barred
# factor, (row, col) of the plain factor).
_HALF, _HALF_I = 2, 2j
_PHI_TABLE = {
    (0, 0): (_HALF, [(+1, (1, 1), (1, 1)), (+1, (1, 2), (1, 2)), (+1, (2, 1), (2, 1)), (+1, (2, 2), (2, 2))]),
    (0, 1): (_HALF, [(+1, (1, 1), (1, 2)), (+1, (1, 2), (1, 1)), (+1, (2, 1), (2, 2)), (+1, (2, 2), (2, 1))]),
    (0, 2): (_HALF_I, [(+1, (1, 2), (1, 1)), (-1, (1, 1), (1, 2)), (+1, (2, 2), (2, 1)), (-1, (2, 1), (2, 2))]),
    (0, 3): (_HALF, [(+1, (1, 1), (1, 1)), (-1, (1, 2), (1, 2)), (+1, (2, 1), (2, 1)), (-1, (2, 2), (2, 2))]),
    (1, 0): (_HALF, [(+1, (2, 1), (1, 1)), (+1, (1, 1), (2, 1)), (+1, (2, 2), (1, 2)), (+1, (1, 2), (2, 2))]),
    (1, 1): (_HALF, [(+1, (1, 2), (2, 1)), (+1, (2, 1), (1, 2)), (+1, (2, 2), (1, 1)), (+1, (1, 1), (2, 2))]),
    (1, 2): (_HALF_I, [(+1, (1, 2), (2, 1)), (-1, (2, 1), (1, 2)), (+1, (2, 2), (1, 1)), (-1, (1, 1), (2, 2))]),
    (1, 3): (_HALF, [(+1, (2, 1), (1, 1)), (+1, (1, 1), (2, 1)), (-1, (2, 2), (1, 2)), (-1, (1, 2), (2, 2))]),
    (2, 0): (_HALF_I, [(+1, (1, 1), (2, 1)), (-1, (2, 1), (1, 1)), (+1, (1, 2), (2, 2)), (-1, (2, 2), (1, 2))]),
    (2, 1): (_HALF_I, [(+1, (1, 2), (2, 1)), (-1, (2, 1), (1, 2)), (+1, (1, 1), (2, 2)), (-1, (2, 2), (1, 1))]),
    (2, 2): (_HALF, [(+1, (2, 2), (1, 1)), (+1, (1, 1), (2, 2)), (-1, (2, 1), (1, 2)), (-1, (1, 2), (2, 1))]),
    (2, 3): (_HALF_I, [(+1, (1, 1), (2, 1)), (-1, (2, 1), (1, 1)), (+1, (2, 2), (1, 2)), (-1, (1, 2), (2, 2))]),
    (3, 0): (_HALF, [(+1, (1, 1), (1, 1)), (+1, (1, 2), (1, 2)), (-1, (2, 1), (2, 1)), (-1, (2, 2), (2, 2))]),
    (3, 1): (_HALF, [(+1, (1, 1), (1, 2)), (+1, (1, 2), (1, 1)), (-1, (2, 1), (2, 2)), (-1, (2, 2), (2, 1))]),
    (3, 2): (_HALF_I, [(+1, (1, 2), (1, 1)), (-1, (1, 1), (1, 2)), (+1, (2, 1), (2, 2)), (-1, (2, 2), (2, 1))]),
    (3, 3): (_HALF, [(+1, (1, 1), (1, 1)), (+1, (2, 2), (2, 2)), (-1, (2, 1), (2, 1)), (-1, (1, 2), (1, 2))]),
}

# A commonly printed form of S^1_1 pairs each off-diagonal entry with its own
# conjugate; it violates the metric condition off the diagonal subgroup.  Kept
# for regression tests only.
_PRINTED_S11 = (_HALF, [(+1, (1, 2), (1, 2)), (+1, (2, 1), (2, 1)), (+1, (2, 2), (1, 1)), (+1, (1, 1), (2, 2))])

# 1/2 and 1/(2i) = -i/2
_DIVISORS = {_HALF: GaussianRational(Fraction(1, 2)), _HALF_I: GaussianRational(0, Fraction(-1, 2))}


def sl2_det(M: Matrix) -> ScalarExpr:
    return M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]


def is_unimodular(M: Matrix) -> bool:
    return M.indices == SPINOR and sl2_det(M) == ONE


def require_unimodular(M: Matrix) -> None:
    if M.indices != SPINOR:
        raise ValueError(f"expected a 2x2 spinor matrix, got indices {M.indices}")
    d = sl2_det(M)
    if d != ONE:
        raise NonUnimodularError(d)


def sl2_inverse(M: Matrix) -> Matrix:
    """Inverse of a unimodular matrix, polynomial whenever M is."""
    require_unimodular(M)
    return Matrix([[M[2, 2], -M[1, 2]], [-M[2, 1], M[1, 1]]], SPINOR)


def varphi(M: Matrix, table=None) -> Matrix:
    """The covering homomorphism SL(2,C) -> SO+(1,3), component by component."""
    require_unimodular(M)
    table = _PHI_TABLE if table is None else table
    if all(M[a, b].is_constant() for a in SPINOR for b in SPINOR):
        return _varphi_const(M, table)
    conj = {(a, b): M[a, b].bar() for a in SPINOR for b in SPINOR}
    rows = []
    for i in VECTOR:
        row = []
        for j in VECTOR:
            div, terms = table[(i, j)]
            acc = ZERO
            for sign, barred, plain in terms:
                t = conj[barred] * M[plain]
                acc = acc + t if sign > 0 else acc - t
            row.append(acc.scale(_DIVISORS[div]))
        rows.append(row)
    return Matrix(rows, VECTOR)


def _varphi_const(M: Matrix, table) -> Matrix:
    # same table on raw (re, im, den) triples
    val = {(a, b): M[a, b]._const_triple() for a in SPINOR for b in SPINOR}
    conj = {k: _cconj(v) for k, v in val.items()}
    divs = {k: d._t for k, d in _DIVISORS.items()}
    rows = []
    for i in VECTOR:
        row = []
        for j in VECTOR:
            div, terms = table[(i, j)]
            acc = (0, 0, 1)
            for sign, barred, plain in terms:
                t = _cmul(conj[barred], val[plain])
                acc = _cadd(acc, t if sign > 0 else _cneg(t))
            row.append(ScalarExpr._from_const_triple(_cmul(acc, divs[div])))
        rows.append(row)
    return Matrix(rows, VECTOR)


def lorentz_violations(S: Matrix) -> list:
    """Names of the failed Lorentz conditions; empty for a proper element.

    The orthochronous check S^0_0 >= 1 is only decided for constant matrices.
    """
    out = []
    if S.indices != VECTOR:
        return ["shape"]
    if S.transpose() @ ETA @ S != ETA:
        out.append("metric")
    if S.det() != ONE:
        out.append("det")
    s00 = S[0, 0]
    if s00.is_constant():
        v = s00.constant_value()
        if not v.is_real() or v.re < 1:
            out.append("orthochronous")
    return out


def is_lorentz(S: Matrix) -> bool:
    return not lorentz_violations(S)


def check_homomorphism(A: Matrix, B: Matrix) -> bool:
    return varphi(A @ B) == varphi(A) @ varphi(B)


def two_to_one_witness(M: Matrix) -> tuple:
    S = varphi(M)
    return S, S == varphi(-M)


def sigma0() -> Matrix:
    return Matrix.identity(SPINOR)


def spinor_matrix(rows) -> Matrix:
    return Matrix([[as_expr(v) for v in r] for r in rows], SPINOR)
