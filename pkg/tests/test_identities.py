import random

import pytest

from spintensor.algebra import ONE, x
from spintensor.bundle import VECTOR_FIELD, CompositeBundleSpec, ExtendedField, FrameChart, SpinTensorType
from spintensor.diffops import Connection, covariant_along
from spintensor.generate import rand_chart, rand_connection, rand_field, rand_transition, rand_triple
from spintensor.identities import (
    check_covariant_degenerate,
    check_covariant_native,
    check_covariant_pair,
    check_covariant_pair_tilde,
    check_degenerate_commutator,
    check_native_degenerate,
    check_native_pair,
    compare,
)

UP = SpinTensorType(1, 0, 0, 0, 0, 0)
LO_BAR = SpinTensorType(0, 0, 0, 1, 0, 0)
SPECS = [
    CompositeBundleSpec((UP,)),
    CompositeBundleSpec((LO_BAR,)),
    CompositeBundleSpec((VECTOR_FIELD, UP)),
]
TEST_TYPES = [UP, SpinTensorType(0, 1, 0, 0, 0, 0), SpinTensorType(0, 0, 1, 0, 0, 0), VECTOR_FIELD,
              SpinTensorType(0, 0, 0, 0, 0, 1)]


def nonzero(rng, t, spec, degree=1):
    while True:
        X = rand_field(rng, t, spec, degree, density=0.8)
        if not X.is_zero():
            return X


@pytest.mark.parametrize("seed", range(3))
def test_degenerate_commutator(seed):
    rng = random.Random(seed)
    spec = SPECS[seed]
    D1, D2 = rand_triple(rng, spec, 1), rand_triple(rng, spec, 1)
    for t in TEST_TYPES:
        assert check_degenerate_commutator(D1, D2, nonzero(rng, t, spec)).passed


def test_degenerate_commutator_with_itself_is_trivial(rng):
    D = rand_triple(rng, None)
    Z = nonzero(rng, VECTOR_FIELD, None)
    assert check_degenerate_commutator(D, D, Z).passed


@pytest.mark.parametrize("seed", range(3))
def test_native_identities(seed):
    rng = random.Random(100 + seed)
    spec = SPECS[seed]
    P, Q = 1, spec.J
    tP, tQ = spec.type_of(P), spec.type_of(Q)
    X, Xb = nonzero(rng, tP, spec), nonzero(rng, tP.swapped(), spec)
    Y, Yb = nonzero(rng, tQ, spec), nonzero(rng, tQ.swapped(), spec)
    D = rand_triple(rng, spec, 1)
    Z = nonzero(rng, TEST_TYPES[seed], spec, 2)
    assert check_native_degenerate(spec, P, X, D, Z).passed
    assert check_native_degenerate(spec, P, Xb, D, Z, barred=True).passed
    for bx, Xv in ((False, X), (True, Xb)):
        for by, Yv in ((False, Y), (True, Yb)):
            res = check_native_pair(spec, P, Xv, Q, Yv, Z, bar_x=bx, bar_y=by)
            assert res.passed, res


def test_native_pair_constant_directions_commute(rng):
    spec = SPECS[0]
    X = ExtendedField(UP, {(1,): ONE})
    Y = ExtendedField(UP, {(2,): x(0)})
    Z = nonzero(rng, VECTOR_FIELD, spec, 2)
    res = check_native_pair(spec, 1, X, 1, Y, Z)
    assert res.passed and res.check == "native-native"


@pytest.mark.parametrize("seed", range(3))
def test_covariant_identities(seed):
    rng = random.Random(200 + seed)
    spec = SPECS[seed]
    C = rand_connection(rng, spec, 1)
    F = rand_chart(rng, 1)
    X, Y = nonzero(rng, VECTOR_FIELD, spec), nonzero(rng, VECTOR_FIELD, spec)
    P = spec.J
    tP = spec.type_of(P)
    Z = nonzero(rng, TEST_TYPES[seed], spec)
    assert check_covariant_degenerate(C, F, X, rand_triple(rng, spec, 1), Z).passed
    assert check_covariant_native(C, F, X, P, nonzero(rng, tP, spec), Z).passed
    assert check_covariant_native(C, F, X, P, nonzero(rng, tP.swapped(), spec), Z, barred=True).passed
    res = check_covariant_pair(C, F, X, Y, Z)
    assert res.passed and res.check == "covariant-covariant"


def test_flat_holonomic_pair_is_lie_bracket():
    # zero connection in the coordinate frame: [X, Y] acting on scalars
    spec = SPECS[0]
    C, F = Connection.zero(spec), FrameChart.holonomic()
    X = ExtendedField(VECTOR_FIELD, {(0,): x(1)})
    Y = ExtendedField(VECTOR_FIELD, {(1,): ONE})
    Z = ExtendedField.scalar(x(0) * x(1))
    assert check_covariant_pair(C, F, X, Y, Z).passed
    lhs = covariant_along(C, F, X, covariant_along(C, F, Y, Z)) - covariant_along(C, F, Y, covariant_along(C, F, X, Z))
    # [x1 d0, d1] = -d0
    assert lhs == ExtendedField.scalar(-x(1))


def test_pair_in_second_chart():
    rng = random.Random(7)
    spec = SPECS[0]
    F = FrameChart(rand_chart(rng, 1).upsilon, rand_transition(rng, 1, terms=1))
    C = rand_connection(rng, spec, 1, terms=1, density=0.3)
    X, Y = nonzero(rng, VECTOR_FIELD, spec, 1), nonzero(rng, VECTOR_FIELD, spec, 1)
    Z = nonzero(rng, UP, spec, 1)
    res = check_covariant_pair_tilde(C, F, X, Y, Z)
    assert res.passed and res.check == "covariant-covariant-tilde"


def test_compare_reports_first_difference():
    a = ExtendedField(VECTOR_FIELD, {(2,): x(0)})
    b = ExtendedField(VECTOR_FIELD, {(2,): x(0), (3,): ONE})
    res = compare("demo", a, b, P=1)
    assert not res.passed and res.index == (3,)
    assert res.as_dict()["index"] == [3] and res.as_dict()["P"] == 1
    assert compare("demo", a, a).passed
