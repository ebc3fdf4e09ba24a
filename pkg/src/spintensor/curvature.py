"""Torsion, dynamic and non-dynamic curvature, and operator commutators."""

from __future__ import annotations

from typing import Callable

from .algebra import ZERO, ScalarExpr
from .bundle import (
    BAR_OP,
    SPINOR_OP,
    VECTOR_FIELD,
    VECTOR_OP,
    ExtendedField,
    FrameChart,
    TypeMismatchError,
    structure_constants,
)
from .diffops import Connection, DegenerateTriple, _native_bar_pairs, _native_pairs
from .spingroup import SPINOR, VECTOR

# Gamma^k_ij, Gamma^k_ji, c^k_ij
_TORSION_SIGNS = [+1, -1, -1]

# Terms of a curvature component R^p_qij, in order:
#   frame derivative along i of M^p_jq, frame derivative along j of M^p_iq,
#   M^p_ih M^h_jq, M^p_jh M^h_iq,
#   native and barred native brackets along i applied to M^p_jq,
#   native and barred native brackets along j applied to M^p_iq,
#   c^k_ij M^p_kq
_CURVATURE_SIGNS = {
    "A": [+1, -1, +1, -1, -1, -1, +1, +1, -1],
    "Abar": [+1, -1, +1, -1, -1, -1, +1, +1, -1],
    "Gamma": [+1, -1, +1, -1, -1, -1, +1, +1, -1],
}

FAMILIES = ("A", "Abar", "Gamma")


def commutator(op1: Callable, op2: Callable, X: ExtendedField) -> ExtendedField:
    return op1(op2(X)) - op2(op1(X))


# ---------------------------------------------------------------------------
# Torsion

def torsion(C: Connection, F: FrameChart, c: dict | None = None) -> dict:
    """T^k_ij keyed (k, i, j); the first lower index of Gamma is the direction."""
    if c is None:
        c = structure_constants(F)
    s0, s1, s2 = _TORSION_SIGNS
    G = C.Gamma
    out = {}
    for k in VECTOR:
        for i in VECTOR:
            for j in VECTOR:
                out[(k, i, j)] = (G[(k, i, j)].scale(s0) + G[(k, j, i)].scale(s1)
                                  + c[(k, i, j)].scale(s2))
    return out


def torsion_field(T: dict) -> ExtendedField:
    """The torsion as a field of type (0,0|0,0|1,2)."""
    from .bundle import SpinTensorType

    return ExtendedField.from_function(SpinTensorType(0, 0, 0, 0, 1, 2), lambda idx: T[idx])


def torsion_contract(T: dict, X: ExtendedField, Y: ExtendedField) -> ExtendedField:
    """T(X, Y)^k = sum T^k_ij X^i Y^j."""
    for V in (X, Y):
        if V.type != VECTOR_FIELD:
            raise TypeMismatchError(f"torsion takes vector fields, got {V.type}")
    out = {}
    for k in VECTOR:
        acc = ZERO
        for i in VECTOR:
            xi = X[(i,)]
            if not xi:
                continue
            for j in VECTOR:
                yj = Y[(j,)]
                t = T[(k, i, j)]
                if yj and t:
                    acc = acc + t * xi * yj
        out[(k,)] = acc
    return ExtendedField(VECTOR_FIELD, out)


# ---------------------------------------------------------------------------
# Dynamic curvature

class DynamicCurvature:
    """Negated native gradients of the connection for one slot P.

    ``plus[family][(k, j, i)]`` is a field of the P-th type whose component
    at an index is minus the derivative of that connection component with
    respect to the native variable at the index; ``minus`` does the same for
    the conjugate variables and is stored in the swapped (tau) layout.
    """

    def __init__(self, C: Connection, P: int):
        spec = C.spec
        t = spec.type_of(P)
        s = t.swapped()
        self.P = P
        self.plus = {}
        self.minus = {}
        for name, fam in C.families().items():
            pf, mf = {}, {}
            for key, expr in fam.items():
                pf[key] = ExtendedField.from_function(
                    t, lambda idx: -expr.partial(spec.native_var(P, idx)))
                mf[key] = ExtendedField.from_function(
                    s, lambda idx: -expr.partial(spec.native_bar_var(P, s.tau_index(idx))))
            self.plus[name] = pf
            self.minus[name] = mf

    def contract(self, X: ExtendedField, Y: ExtendedField, sign: str = "+", j_range=VECTOR) -> DegenerateTriple:
        """N^k_i = sum_j X^j sum_idx D^k_ij[idx] Y[idx] for all three families."""
        if X.type != VECTOR_FIELD:
            raise TypeMismatchError(f"first argument must be a vector field, got {X.type}")
        fams = self.plus if sign == "+" else self.minus
        want = next(iter(fams["A"].values())).type
        if Y.type != want:
            raise TypeMismatchError(f"second argument must have type {want}, got {Y.type}")
        parts = []
        for name, optype, ind in (("A", SPINOR_OP, SPINOR), ("Abar", BAR_OP, SPINOR), ("Gamma", VECTOR_OP, VECTOR)):
            fam = fams[name]
            comps = {}
            for k in ind:
                for i in ind:
                    acc = ZERO
                    for j in j_range:
                        xj = X[(j,)]
                        if not xj:
                            continue
                        D = fam[(k, j, i)]
                        inner = ZERO
                        for idx, d in D.items():
                            if d:
                                y = Y[idx]
                                if y:
                                    inner = inner + d * y
                        if inner:
                            acc = acc + xj * inner
                    comps[(k, i)] = acc
            parts.append(ExtendedField(optype, comps))
        return DegenerateTriple(*parts)


def dynamic_curvature(C: Connection, P: int) -> DynamicCurvature:
    return DynamicCurvature(C, P)


# ---------------------------------------------------------------------------
# Non-dynamic curvature components

def _brackets(C: Connection, j: int, f: ScalarExpr) -> tuple:
    """(native, barred) bracket contractions of f in direction j, unsigned."""
    present = f.variables()
    out = []
    for half in (0, 1):
        acc = ZERO
        for pair in C.native_brackets(j):
            for v, c in pair[half]:
                if v in present and c:
                    d = f.partial(v)
                    if d:
                        acc = acc + c * d
        out.append(acc)
    return tuple(out)


def _family_curvature(C: Connection, F: FrameChart, c: dict, name: str, ind: tuple, h_range: tuple) -> dict:
    M = C.families()[name]
    sg = _CURVATURE_SIGNS[name]
    out = {}
    for p in ind:
        for q in ind:
            for i in VECTOR:
                for j in VECTOR:
                    if j < i and (p, q, j, i) in out:
                        continue
                    terms = [
                        F.lie(i, M[(p, j, q)]),
                        F.lie(j, M[(p, i, q)]),
                        _sum(M[(p, i, h)] * M[(h, j, q)] for h in h_range),
                        _sum(M[(p, j, h)] * M[(h, i, q)] for h in h_range),
                        *_brackets(C, i, M[(p, j, q)]),
                        *_brackets(C, j, M[(p, i, q)]),
                        _sum(c[(k, i, j)] * M[(p, k, q)] for k in VECTOR),
                    ]
                    acc = ZERO
                    for s, t in zip(sg, terms):
                        if t:
                            acc = acc + t if s > 0 else acc - t
                    out[(p, q, i, j)] = acc
    # fill the lower triangle by antisymmetry only when the signs allow it
    for p in ind:
        for q in ind:
            for i in VECTOR:
                for j in VECTOR:
                    if (p, q, i, j) not in out:
                        out[(p, q, i, j)] = -out[(p, q, j, i)]
    return out


def _sum(it) -> ScalarExpr:
    acc = ZERO
    for t in it:
        if t:
            acc = acc + t
    return acc


def curvature_components(C: Connection, F: FrameChart, c: dict | None = None,
                         gamma_h_range: tuple = VECTOR) -> dict:
    """The three families R^p_qij keyed (p, q, i, j): 'A', 'Abar', 'Gamma'.

    ``gamma_h_range`` is the summation range of the quadratic term of the
    vector family; only 0..3 makes the curvature identity hold.
    """
    if c is None:
        c = structure_constants(F)
    return {
        "A": _family_curvature(C, F, c, "A", SPINOR, SPINOR),
        "Abar": _family_curvature(C, F, c, "Abar", SPINOR, SPINOR),
        "Gamma": _family_curvature(C, F, c, "Gamma", VECTOR, tuple(gamma_h_range)),
    }


def curvature_contract(R: dict, X: ExtendedField, Y: ExtendedField) -> DegenerateTriple:
    """N^p_q = sum_ij R^p_qij X^i Y^j for all three families."""
    for V in (X, Y):
        if V.type != VECTOR_FIELD:
            raise TypeMismatchError(f"curvature takes vector fields, got {V.type}")
    parts = []
    for name, optype, ind in (("A", SPINOR_OP, SPINOR), ("Abar", BAR_OP, SPINOR), ("Gamma", VECTOR_OP, VECTOR)):
        fam = R[name]
        comps = {}
        for p in ind:
            for q in ind:
                acc = ZERO
                for i in VECTOR:
                    xi = X[(i,)]
                    if not xi:
                        continue
                    for j in VECTOR:
                        yj = Y[(j,)]
                        r = fam[(p, q, i, j)]
                        if yj and r:
                            acc = acc + r * xi * yj
                comps[(p, q)] = acc
        parts.append(ExtendedField(optype, comps))
    return DegenerateTriple(*parts)


def antisymmetry_violations(R: dict) -> list:
    """Keys (family, p, q, i, j) where R^p_qij + R^p_qji is nonzero."""
    out = []
    for name, fam in R.items():
        for (p, q, i, j), v in fam.items():
            if i < j and not (v + fam[(p, q, j, i)]).is_zero():
                out.append((name, p, q, i, j))
    return out
