"""Exact commutator identities between differentiation operators.

Every check builds the left side by literally composing operators on a test
field Z and the right side from the closed-form decomposition, then compares
component by component.  Results are :class:`CheckResult` records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .bundle import (
    VECTOR_FIELD,
    CompositeBundleSpec,
    ExtendedField,
    FrameChart,
    SpinTensorType,
    diff_report,
    field_to_tilde,
    identity_field,
    native_substitution,
    structure_constants,
    tau,
)
from .curvature import (
    antisymmetry_violations,
    commutator,
    curvature_components,
    curvature_contract,
    dynamic_curvature,
    torsion,
    torsion_contract,
)
from .diffops import (
    Connection,
    DegenerateTriple,
    connection_transform,
    covariant_along,
    covariant_derivative,
    covariant_gradient,
    degenerate_apply,
    matrix_commutator_triple,
    native_derivative,
    native_derivative_bar,
)
from .spingroup import SPINOR, VECTOR


@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    index: tuple | None = None
    diff: str | None = None
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "index": None if self.index is None else list(self.index),
            "diff": self.diff,
            **self.detail,
        }


def compare(check: str, lhs: ExtendedField, rhs: ExtendedField, **detail) -> CheckResult:
    rep = diff_report(lhs, rhs)
    if rep is None:
        return CheckResult(check, True, detail=detail)
    idx, d = rep
    return CheckResult(check, False, tuple(idx), str(d), detail)


# operator closures -----------------------------------------------------------

def nat_op(spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> Callable:
    return lambda Z: native_derivative(Z, spec, P, Y)


def nat_bar_op(spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> Callable:
    return lambda Z: native_derivative_bar(Z, spec, P, Y)


def deg_op(D: DegenerateTriple) -> Callable:
    return lambda Z: degenerate_apply(D, Z)


def cov_op(C: Connection, F: FrameChart, X: ExtendedField) -> Callable:
    return lambda Z: covariant_along(C, F, X, Z)


def _native_sums(spec: CompositeBundleSpec, N: DegenerateTriple, Z: ExtendedField) -> ExtendedField:
    """sum_Q (nat along U[Q] + barred nat along Ubar[Q]) Z with U[Q] = -D(N) S[Q]."""
    out = ExtendedField.zero(Z.type)
    for Q in range(1, spec.J + 1):
        S = identity_field(spec, Q)
        UQ = -degenerate_apply(N, S)
        UQbar = -degenerate_apply(N, tau(S))
        out = out + native_derivative(Z, spec, Q, UQ) + native_derivative_bar(Z, spec, Q, UQbar)
    return out


# degenerate and native ---------------------------------------------------------

def check_degenerate_commutator(D1: DegenerateTriple, D2: DegenerateTriple, Z: ExtendedField) -> CheckResult:
    """[D(S1), D(S2)] = D(pointwise commutators)."""
    lhs = commutator(deg_op(D1), deg_op(D2), Z)
    rhs = degenerate_apply(matrix_commutator_triple(D1, D2), Z)
    return compare("degenerate-commutator", lhs, rhs)


def check_native_degenerate(spec: CompositeBundleSpec, P: int, X: ExtendedField, D: DegenerateTriple,
                            Z: ExtendedField, barred: bool = False) -> CheckResult:
    """[nat_X[P], D(S)] = D(nat_X[P] S), plain or barred."""
    op = (nat_bar_op if barred else nat_op)(spec, P, X)
    lhs = commutator(op, deg_op(D), Z)
    rhs = degenerate_apply(D.map(op), Z)
    return compare("native-bar-degenerate" if barred else "native-degenerate", lhs, rhs, P=P)


_NATIVE_PAIR_IDS = {
    (False, False): "native-native",
    (False, True): "native-native-bar",
    (True, True): "native-bar-native-bar",
    (True, False): "native-bar-native",
}


def check_native_pair(spec: CompositeBundleSpec, P: int, X: ExtendedField, Q: int, Y: ExtendedField,
                      Z: ExtendedField, bar_x: bool = False, bar_y: bool = False) -> CheckResult:
    """[nat_X[P], nat_Y[Q]] = nat_V[Q] - nat_U[P], V = nat_X[P] Y, U = nat_Y[Q] X."""
    opx = (nat_bar_op if bar_x else nat_op)(spec, P, X)
    opy = (nat_bar_op if bar_y else nat_op)(spec, Q, Y)
    lhs = commutator(opx, opy, Z)
    V = opx(Y)
    U = opy(X)
    rhs = (nat_bar_op if bar_y else nat_op)(spec, Q, V)(Z) - (nat_bar_op if bar_x else nat_op)(spec, P, U)(Z)
    return compare(_NATIVE_PAIR_IDS[(bar_x, bar_y)], lhs, rhs, P=P, Q=Q)


# covariant ---------------------------------------------------------------------

def check_covariant_degenerate(C: Connection, F: FrameChart, X: ExtendedField, D: DegenerateTriple,
                               Z: ExtendedField) -> CheckResult:
    """[cov_X, D(S)] = D(cov_X S)."""
    op = cov_op(C, F, X)
    lhs = commutator(op, deg_op(D), Z)
    rhs = degenerate_apply(D.map(op), Z)
    return compare("covariant-degenerate", lhs, rhs)


def check_covariant_native(C: Connection, F: FrameChart, X: ExtendedField, P: int, Y: ExtendedField,
                           Z: ExtendedField, barred: bool = False, j_range=VECTOR) -> CheckResult:
    """[cov_X, nat_Y[P]] = nat_U[P] + sum_Q(...) - cov_V + D(N), signs as below.

    U = cov_X Y, V = nat_Y[P] X, N = dynamic curvature contracted with X, Y.
    """
    spec = C.spec
    nat = (nat_bar_op if barred else nat_op)
    lhs = commutator(cov_op(C, F, X), nat(spec, P, Y), Z)
    U = covariant_along(C, F, X, Y)
    V = nat(spec, P, Y)(X)
    N = dynamic_curvature(C, P).contract(X, Y, "-" if barred else "+", j_range=j_range)
    rhs = (nat(spec, P, U)(Z) + _native_sums(spec, N, Z)
           - covariant_along(C, F, V, Z) + degenerate_apply(N, Z))
    return compare("covariant-native-bar" if barred else "covariant-native", lhs, rhs, P=P)


def check_covariant_pair(C: Connection, F: FrameChart, X: ExtendedField, Y: ExtendedField, Z: ExtendedField,
                         R: dict | None = None, c: dict | None = None) -> CheckResult:
    """[cov_X, cov_Y] = cov_U + sum_Q(...) + D(R(X, Y)), U = cov_X Y - cov_Y X - T(X, Y)."""
    spec = C.spec
    if c is None:
        c = structure_constants(F)
    if R is None:
        R = curvature_components(C, F, c)
    lhs = commutator(cov_op(C, F, X), cov_op(C, F, Y), Z)
    U = covariant_along(C, F, X, Y) - covariant_along(C, F, Y, X) - torsion_contract(torsion(C, F, c), X, Y)
    N = curvature_contract(R, X, Y)
    rhs = covariant_along(C, F, U, Z) + _native_sums(spec, N, Z) + degenerate_apply(N, Z)
    return compare("covariant-covariant", lhs, rhs)


# curvature-level checks ------------------------------------------------------

_FAMILY_TYPES = {
    "A": SpinTensorType(1, 0, 0, 0, 0, 0),
    "Abar": SpinTensorType(0, 0, 1, 0, 0, 0),
    "Gamma": VECTOR_FIELD,
}


def basis_field(stype: SpinTensorType, q: int) -> ExtendedField:
    return ExtendedField.from_function(stype, lambda idx: 1 if idx == (q,) else 0)


def basis_vector(j: int) -> ExtendedField:
    return basis_field(VECTOR_FIELD, j)


def curvature_by_extraction(C: Connection, F: FrameChart, family: str, c: dict | None = None) -> dict:
    """R^p_qij read off the literal commutator of nabla_i, nabla_j on basis fields.

    On a constant basis field e_q the native terms vanish and the frame
    commutator contributes sum_k c^k_ij nabla_k e_q, which is removed.
    """
    if c is None:
        c = structure_constants(F)
    stype = _FAMILY_TYPES[family]
    ind = VECTOR if family == "Gamma" else SPINOR
    M = C.families()[family]
    out = {}
    for q in ind:
        e = basis_field(stype, q)
        first = {j: covariant_derivative(C, F, j, e) for j in VECTOR}
        for i in VECTOR:
            for j in VECTOR:
                if j < i:
                    continue
                comm = covariant_derivative(C, F, i, first[j]) - covariant_derivative(C, F, j, first[i])
                for p in ind:
                    v = comm[(p,)]
                    for k in VECTOR:
                        ck = c[(k, i, j)]
                        if ck:
                            v = v - ck * M[(p, k, q)]
                    out[(p, q, i, j)] = v
                    out[(p, q, j, i)] = -v
    return out


def check_curvature_extraction(C: Connection, F: FrameChart, R: dict | None = None,
                               c: dict | None = None) -> list:
    if c is None:
        c = structure_constants(F)
    if R is None:
        R = curvature_components(C, F, c)
    results = []
    for family in ("A", "Abar", "Gamma"):
        want = curvature_by_extraction(C, F, family, c)
        bad = next((k for k in sorted(want) if not (R[family][k] - want[k]).is_zero()), None)
        cid = f"curvature-extraction-{family}"
        if bad is None:
            results.append(CheckResult(cid, True))
        else:
            results.append(CheckResult(cid, False, bad, str(R[family][bad] - want[bad])))
    return results


def check_antisymmetry(C: Connection, F: FrameChart, R: dict | None = None, c: dict | None = None) -> list:
    if c is None:
        c = structure_constants(F)
    if R is None:
        R = curvature_components(C, F, c)
    out = []
    bad = antisymmetry_violations(R)
    out.append(CheckResult("curvature-antisymmetry", not bad, bad[0][1:] if bad else None,
                           None if not bad else bad[0][0]))
    T = torsion(C, F, c)
    tbad = next(((k, i, j) for (k, i, j), v in sorted(T.items()) if not (v + T[(k, j, i)]).is_zero()), None)
    out.append(CheckResult("torsion-antisymmetry", tbad is None, tbad,
                           None if tbad is None else str(T[tbad] + T[(tbad[0], tbad[2], tbad[1])])))
    return out


def check_dynamic_bilinear(C: Connection, P: int, X1: ExtendedField, X2: ExtendedField, Y1: ExtendedField,
                           Y2: ExtendedField, a, barred: bool = False) -> CheckResult:
    """N(X1 + a X2, Y1) = N(X1, Y1) + a N(X2, Y1), and likewise in Y."""
    dc = dynamic_curvature(C, P)
    sign = "-" if barred else "+"
    N = lambda X, Y: dc.contract(X, Y, sign)
    cid = "dynamic-bilinear-bar" if barred else "dynamic-bilinear"
    pairs = (
        (N(X1 + X2.scale(a), Y1), N(X1, Y1) + N(X2, Y1).scale(a)),
        (N(X1, Y1 + Y2.scale(a)), N(X1, Y1) + N(X1, Y2).scale(a)),
    )
    for lhs, rhs in pairs:
        for part, (l, r) in zip(("spinor", "barred", "vector"), zip(lhs.parts(), rhs.parts())):
            res = compare(cid, l, r, part=part)
            if not res.passed:
                return res
    return CheckResult(cid, True)


def check_naturality(C: Connection, F: FrameChart, X: ExtendedField, Ct: Connection | None = None) -> CheckResult:
    """Transforming the gradient equals the gradient of the transformed field."""
    spec = C.spec
    if Ct is None:
        Ct = connection_transform(C, F)
    subst = native_substitution(spec, F)
    lhs = field_to_tilde(covariant_gradient(C, F, X), spec, F, subst)
    rhs = covariant_gradient(Ct, F.tilde(), field_to_tilde(X, spec, F, subst))
    return compare("covariant-naturality", lhs, rhs)


def check_covariant_pair_tilde(C: Connection, F: FrameChart, X: ExtendedField, Y: ExtendedField,
                               Z: ExtendedField, Ct: Connection | None = None) -> CheckResult:
    """The commutator decomposition, redone entirely in the second chart."""
    spec = C.spec
    if Ct is None:
        Ct = connection_transform(C, F)
    subst = native_substitution(spec, F)
    Xt, Yt, Zt = (field_to_tilde(V, spec, F, subst) for V in (X, Y, Z))
    res = check_covariant_pair(Ct, F.tilde(), Xt, Yt, Zt)
    return CheckResult("covariant-covariant-tilde", res.passed, res.index, res.diff, res.detail)
