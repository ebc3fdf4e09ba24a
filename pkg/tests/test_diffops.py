import pytest

from spintensor.algebra import ONE, ZERO, GaussianRational, Matrix, ScalarExpr, coord, x
from spintensor.bundle import (
    BAR_OP,
    SPINOR_OP,
    VECTOR_FIELD,
    VECTOR_OP,
    CompositeBundleSpec,
    ExtendedField,
    FrameChart,
    SpinTensorType,
    TypeMismatchError,
    identity_field,
    tau,
)
from spintensor.diffops import (
    Connection,
    DegenerateTriple,
    connection_transform,
    covariant_along,
    covariant_derivative,
    covariant_gradient,
    degenerate_apply,
    horizontal_scalar,
    native_derivative,
    native_derivative_bar,
)
from spintensor.generate import rand_chart, rand_connection, rand_field, rand_triple, rand_type
from spintensor.identities import check_naturality
from spintensor.spingroup import SPINOR, VECTOR, spinor_matrix

UP = SpinTensorType(1, 0, 0, 0, 0, 0)
MIXED = SpinTensorType(1, 1, 0, 0, 0, 0)


def g(re, im=0):
    return ScalarExpr.const(GaussianRational(re, im))


# -- native derivatives ----------------------------------------------------------

def test_native_derivative_of_identity_is_direction(rng):
    spec = CompositeBundleSpec((MIXED, UP))
    for P in (1, 2):
        Y = rand_field(rng, spec.type_of(P), spec)
        assert native_derivative(identity_field(spec, P), spec, P, Y) == Y
        assert native_derivative(identity_field(spec, 3 - P), spec, P, Y).is_zero()


def test_barred_native_derivative_of_tau_identity(rng):
    spec = CompositeBundleSpec((MIXED,))
    S = identity_field(spec, 1)
    Y = rand_field(rng, MIXED.swapped(), spec)
    assert native_derivative_bar(tau(S), spec, 1, Y) == Y
    assert native_derivative_bar(S, spec, 1, Y).is_zero()


def test_native_direction_type_checked():
    spec = CompositeBundleSpec((UP,))
    with pytest.raises(TypeMismatchError):
        native_derivative(ExtendedField.scalar(1), spec, 1, ExtendedField.zero(VECTOR_FIELD))


# -- degenerate differentiation ----------------------------------------------------

def test_degenerate_on_spinor_is_matrix_product(rng):
    D = rand_triple(rng, None)
    X = rand_field(rng, UP, None, degree=1)
    Y = degenerate_apply(D, X)
    for a in SPINOR:
        assert Y[(a,)] == sum((D.Sf[(a, v)] * X[(v,)] for v in SPINOR), ZERO)


def test_degenerate_on_lower_vector(rng):
    D = rand_triple(rng, None)
    lo = SpinTensorType(0, 0, 0, 0, 0, 1)
    X = rand_field(rng, lo, None)
    Y = degenerate_apply(D, X)
    for b in VECTOR:
        assert Y[(b,)] == -sum((X[(w,)] * D.Sv[(w, b)] for w in VECTOR), ZERO)


def test_degenerate_kills_scalars_and_identity_operator(rng):
    D = rand_triple(rng, None)
    assert degenerate_apply(D, ExtendedField.scalar(x(0) + 1)).is_zero()
    ident = DegenerateTriple(ExtendedField.from_matrix(SPINOR_OP, Matrix.identity(SPINOR)),
                             ExtendedField.from_matrix(BAR_OP, Matrix.identity(SPINOR)),
                             ExtendedField.from_matrix(VECTOR_OP, Matrix.identity(VECTOR)))
    # identity acts as +1 per upper slot and -1 per lower slot
    X = rand_field(rng, MIXED, None)
    assert degenerate_apply(ident, X).is_zero()
    V = rand_field(rng, VECTOR_FIELD, None)
    assert degenerate_apply(ident, V) == V


# -- covariant differentiation -------------------------------------------------------

def test_covariant_derivative_of_constant_scalar(rng):
    spec = CompositeBundleSpec((MIXED,))
    C = rand_connection(rng, spec)
    F = rand_chart(rng)
    for j in VECTOR:
        assert covariant_derivative(C, F, j, ExtendedField.scalar(1)).is_zero()


def test_covariant_native_block_oracle():
    # f = S^1_1 on a (1,1) slot, holonomic frame, constant A:
    # nabla_j f = -(A^1_j2 S^2_1 - A^2_j1 S^1_2)
    spec = CompositeBundleSpec((MIXED,))
    A = {(1, 0, 2): g(2, 1), (2, 0, 1): g(-1), (1, 3, 1): g(5), (2, 3, 2): g(0, 4)}
    C = Connection(spec, A, {k: v.bar() for k, v in A.items()})
    F = FrameChart.holonomic()
    s = lambda a, b: ScalarExpr.var(spec.native_var(1, (a, b)))
    f = ExtendedField.scalar(s(1, 1))
    for j in VECTOR:
        want = -(C.A[(1, j, 2)] * s(2, 1) - C.A[(2, j, 1)] * s(1, 2))
        assert covariant_derivative(C, F, j, f)[()] == want
    assert horizontal_scalar(C, F, 0, s(1, 1)) == -(g(2, 1) * s(2, 1) + s(1, 2))


def test_covariant_vector_field_oracle():
    # x-only vector field in a holonomic frame: d_j X^a + Gamma^a_jv X^v
    spec = CompositeBundleSpec((UP,))
    G = {(0, 1, 2): x(3), (2, 1, 0): g(1, 0), (3, 2, 3): x(0) * x(1)}
    C = Connection(spec, Gamma=G)
    F = FrameChart.holonomic()
    X = ExtendedField(VECTOR_FIELD, {(0,): x(1) ** 2, (2,): x(0) + 1, (3,): g(3)})
    for j in VECTOR:
        got = covariant_derivative(C, F, j, X)
        for a in VECTOR:
            want = X[(a,)].partial(coord(j)) + sum((C.Gamma[(a, j, v)] * X[(v,)] for v in VECTOR), ZERO)
            assert got[(a,)] == want


def test_covariant_along_is_linear_in_direction(rng):
    spec = CompositeBundleSpec((UP,))
    C = rand_connection(rng, spec)
    F = rand_chart(rng)
    Z = rand_field(rng, MIXED, spec)
    V = ExtendedField(VECTOR_FIELD, {(2,): x(0)})
    assert covariant_along(C, F, V, Z) == covariant_derivative(C, F, 2, Z).scale(x(0))
    grad = covariant_gradient(C, F, Z)
    assert grad.type == SpinTensorType(1, 1, 0, 0, 0, 1)
    assert grad[(1, 2, 3)] == covariant_derivative(C, F, 3, Z)[(1, 2)]


def test_bad_direction():
    spec = CompositeBundleSpec((UP,))
    with pytest.raises(ValueError):
        covariant_derivative(Connection.zero(spec), FrameChart.holonomic(), 4, ExtendedField.scalar(1))


# -- change of chart -----------------------------------------------------------------

def test_identity_transition_leaves_connection(rng):
    spec = CompositeBundleSpec((UP,))
    C = rand_connection(rng, spec)
    F = FrameChart(rand_chart(rng).upsilon, Matrix.identity(SPINOR))
    assert connection_transform(C, F) == C


def test_zero_connection_constant_transition(rng):
    spec = CompositeBundleSpec((MIXED,))
    F = FrameChart(rand_chart(rng).upsilon, spinor_matrix([[1, 2], [0, 1]]))
    assert connection_transform(Connection.zero(spec), F) == Connection.zero(spec)


def test_naturality_random(rng):
    spec = CompositeBundleSpec((UP,))
    for _ in range(2):
        C = rand_connection(rng, spec)
        F = rand_chart(rng, transition=True)
        X = rand_field(rng, rand_type(rng, 1), spec)
        assert check_naturality(C, F, X).passed
