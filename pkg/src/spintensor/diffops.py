"""Native, degenerate and spatial covariant differentiations.

Connection components are stored as dicts keyed ``(k, j, i)`` where ``j`` is
the direction index (0..3) and ``k``, ``i`` are the spinor (1..2) or vector
(0..3) indices of the acting matrix.

The sign tables below are read at call time, which lets the mutation
harness flip a single sign and check that the identity suites notice.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .algebra import ZERO, ScalarExpr, as_expr, coord
from .bundle import (
    BAR_OP,
    LO_BAR,
    LO_SPIN,
    LO_VEC,
    SPINOR_OP,
    UP_BAR,
    UP_SPIN,
    UP_VEC,
    VECTOR_FIELD,
    VECTOR_OP,
    CompositeBundleSpec,
    ExtendedField,
    FrameChart,
    SpinTensorType,
    TypeMismatchError,
    identity_field,
    native_substitution,
    tau,
    theta_params,
)
from .spingroup import SPINOR, VECTOR

# one sign per block: upper spinor, lower spinor, upper barred, lower barred,
# upper vector, lower vector
_DEGENERATE_SIGNS = [+1, -1, +1, -1, +1, -1]
_CONNECTION_SLOT_SIGNS = [+1, -1, +1, -1, +1, -1]
# frame-directed term, native block, barred native block
_COVARIANT_TERM_SIGNS = [+1, -1, -1]

_BLOCK_RANGE = (SPINOR, SPINOR, SPINOR, SPINOR, VECTOR, VECTOR)
_LOWER = (False, True, False, True, False, True)


def slot_action(X: ExtendedField, spin: Callable, bar: Callable, vec: Callable, signs) -> ExtendedField:
    """Sum over index slots of X of a matrix acting on that slot.

    ``spin(a, v)``, ``bar(a, v)`` and ``vec(a, v)`` give matrix entries with
    upper index a and lower index v.  An upper slot a picks up
    ``sign * sum_v M(a, v) X[..v..]`` and a lower slot b picks up
    ``sign * sum_w M(w, b) X[..w..]``.
    """
    t = X.type
    blocks = t.blocks
    if not blocks:
        return ExtendedField.zero(t)
    getters = (spin, spin, bar, bar, vec, vec)
    comps = X._c
    out = {}
    for idx in t.indices():
        acc = ZERO
        for pos, blk in enumerate(blocks):
            sign = signs[blk]
            if not sign:
                continue
            M = getters[blk]
            here = idx[pos]
            lower = _LOWER[blk]
            head, tail = idx[:pos], idx[pos + 1:]
            for v in _BLOCK_RANGE[blk]:
                src = comps[head + (v,) + tail]
                if not src:
                    continue
                c = M(v, here) if lower else M(here, v)
                if not c:
                    continue
                term = c * src
                acc = acc + term if sign > 0 else acc - term
        out[idx] = acc
    return ExtendedField._raw(t, out)


# ---------------------------------------------------------------------------
# Native multivariate derivatives

def directional(X: ExtendedField, pairs) -> ExtendedField:
    """sum over (var, coeff) of coeff * dX/dvar, component by component."""
    present = X.variables()
    pairs = [(v, c) for v, c in pairs if v in present and c]
    if not pairs:
        return ExtendedField.zero(X.type)

    def f(e: ScalarExpr) -> ScalarExpr:
        acc = ZERO
        for v, c in pairs:
            d = e.partial(v)
            if d:
                acc = acc + c * d
        return acc

    return X.map(f)


def _native_pairs(spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> list:
    t = spec.type_of(P)
    if Y.type != t:
        raise TypeMismatchError(f"direction field has type {Y.type}, slot {P} has type {t}")
    return [(spec.native_var(P, idx), Y[idx]) for idx in t.indices()]


def _native_bar_pairs(spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> list:
    t = spec.type_of(P)
    s = t.swapped()
    if Y.type != s:
        raise TypeMismatchError(f"barred direction field has type {Y.type}, expected {s}")
    return [(spec.native_bar_var(P, s.tau_index(idx)), Y[idx]) for idx in s.indices()]


def native_derivative(X: ExtendedField, spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> ExtendedField:
    """Derivative of X along Y in the native variables of slot P."""
    return directional(X, _native_pairs(spec, P, Y))


def native_derivative_bar(X: ExtendedField, spec: CompositeBundleSpec, P: int, Y: ExtendedField) -> ExtendedField:
    """Derivative along Y (of the swapped type) in the conjugate natives of slot P."""
    return directional(X, _native_bar_pairs(spec, P, Y))


# ---------------------------------------------------------------------------
# Degenerate differentiations

class DegenerateTriple:
    """Three operator fields of types (1,1|0,0|0,0), (0,0|1,1|0,0), (0,0|0,0|1,1)."""

    __slots__ = ("Sf", "Sbar", "Sv")

    def __init__(self, Sf: ExtendedField, Sbar: ExtendedField, Sv: ExtendedField):
        for fld, t, name in ((Sf, SPINOR_OP, "spinor"), (Sbar, BAR_OP, "barred"), (Sv, VECTOR_OP, "vector")):
            if fld.type != t:
                raise TypeMismatchError(f"{name} part must have type {t}, got {fld.type}")
        self.Sf, self.Sbar, self.Sv = Sf, Sbar, Sv

    @classmethod
    def zero(cls) -> DegenerateTriple:
        return cls(ExtendedField.zero(SPINOR_OP), ExtendedField.zero(BAR_OP), ExtendedField.zero(VECTOR_OP))

    def parts(self) -> tuple:
        return (self.Sf, self.Sbar, self.Sv)

    def map(self, f: Callable) -> DegenerateTriple:
        """Apply a type-preserving operator to each of the three fields."""
        return DegenerateTriple(f(self.Sf), f(self.Sbar), f(self.Sv))

    def scale(self, factor) -> DegenerateTriple:
        return self.map(lambda X: X.scale(factor))

    def __neg__(self):
        return self.map(lambda X: -X)

    def __add__(self, other: DegenerateTriple) -> DegenerateTriple:
        return DegenerateTriple(self.Sf + other.Sf, self.Sbar + other.Sbar, self.Sv + other.Sv)

    def __eq__(self, other):
        if not isinstance(other, DegenerateTriple):
            return NotImplemented
        return self.parts() == other.parts()

    def __hash__(self):
        return hash(self.parts())


def degenerate_apply(D: DegenerateTriple, X: ExtendedField) -> ExtendedField:
    Sf, Sb, Sv = D.Sf._c, D.Sbar._c, D.Sv._c
    return slot_action(
        X,
        lambda a, v: Sf[(a, v)],
        lambda a, v: Sb[(a, v)],
        lambda a, v: Sv[(a, v)],
        _DEGENERATE_SIGNS,
    )


def matrix_commutator_triple(D1: DegenerateTriple, D2: DegenerateTriple) -> DegenerateTriple:
    """Pointwise commutators of the three operator fields."""

    def comm(X: ExtendedField, Y: ExtendedField) -> ExtendedField:
        a, b = X.to_matrix(), Y.to_matrix()
        return ExtendedField.from_matrix(X.type, a @ b - b @ a)

    return DegenerateTriple(comm(D1.Sf, D2.Sf), comm(D1.Sbar, D2.Sbar), comm(D1.Sv, D2.Sv))


# ---------------------------------------------------------------------------
# Extended spinor connection and covariant differentiation

class Connection:
    """Component families A, Abar, Gamma keyed (k, j, i); missing keys are zero."""

    def __init__(self, spec: CompositeBundleSpec, A: Mapping | None = None,
                 Abar: Mapping | None = None, Gamma: Mapping | None = None):
        self.spec = spec
        self.A = _dense(A, SPINOR)
        self.Abar = _dense(Abar, SPINOR)
        self.Gamma = _dense(Gamma, VECTOR)
        self._cache = {}

    @classmethod
    def zero(cls, spec: CompositeBundleSpec) -> Connection:
        return cls(spec)

    def families(self) -> dict:
        return {"A": self.A, "Abar": self.Abar, "Gamma": self.Gamma}

    def getters(self, j: int) -> tuple:
        A, Ab, G = self.A, self.Abar, self.Gamma
        return (
            lambda a, v: A[(a, j, v)],
            lambda a, v: Ab[(a, j, v)],
            lambda a, v: G[(a, j, v)],
        )

    def act(self, j: int, X: ExtendedField) -> ExtendedField:
        """The index-slot action of the connection in direction j."""
        return slot_action(X, *self.getters(j), _CONNECTION_SLOT_SIGNS)

    def native_brackets(self, j: int) -> list:
        """Per slot P: (pairs for the native block, pairs for the barred block).

        The native block contracts the action on S[P] against d/dS[P]; the
        barred block contracts the action on tau(S[P]) against d/dSbar[P].
        """
        key = (j, tuple(_CONNECTION_SLOT_SIGNS))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = []
        for P in range(1, self.spec.J + 1):
            S = identity_field(self.spec, P)
            plain = _native_pairs(self.spec, P, self.act(j, S))
            barred = _native_bar_pairs(self.spec, P, self.act(j, tau(S)))
            out.append((plain, barred))
        self._cache[key] = out
        return out

    def is_conjugate_pair(self) -> bool:
        return all(self.Abar[key] == self.A[key].bar() for key in self.A)

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return (self.spec, self.A, self.Abar, self.Gamma) == (other.spec, other.A, other.Abar, other.Gamma)

    def __hash__(self):
        return hash((self.spec, frozenset(self.A.items()), frozenset(self.Abar.items()), frozenset(self.Gamma.items())))


def _dense(family: Mapping | None, ind: tuple) -> dict:
    family = {} if family is None else dict(family)
    out = {}
    for k in ind:
        for j in VECTOR:
            for i in ind:
                out[(k, j, i)] = as_expr(family.pop((k, j, i), ZERO))
    if family:
        raise KeyError(f"connection component index {next(iter(family))} out of range")
    return out


def horizontal_scalar(C: Connection, F: FrameChart, j: int, f: ScalarExpr) -> ScalarExpr:
    """Covariant derivative of a scalar function in direction j."""
    s_frame, s_nat, s_bar = _COVARIANT_TERM_SIGNS
    acc = F.lie(j, f).scale(s_frame) if s_frame != 1 else F.lie(j, f)
    present = f.variables()
    for plain, barred in C.native_brackets(j):
        for pairs, sign in ((plain, s_nat), (barred, s_bar)):
            for v, c in pairs:
                if v in present and c:
                    d = f.partial(v)
                    if d:
                        term = c * d
                        acc = acc + term if sign > 0 else acc - term
    return acc


def covariant_derivative(C: Connection, F: FrameChart, j: int, X: ExtendedField) -> ExtendedField:
    """Spatial covariant derivative of X in frame direction j (0..3)."""
    if j not in VECTOR:
        raise ValueError(f"direction must be 0..3, got {j}")
    base = X.map(lambda e: horizontal_scalar(C, F, j, e))
    return base + C.act(j, X)


def covariant_along(C: Connection, F: FrameChart, V: ExtendedField, X: ExtendedField) -> ExtendedField:
    """sum_j V^j nabla_j X for a vector field V."""
    if V.type != VECTOR_FIELD:
        raise TypeMismatchError(f"direction must be a vector field, got {V.type}")
    out = ExtendedField.zero(X.type)
    for j in VECTOR:
        vj = V[(j,)]
        if vj:
            out = out + covariant_derivative(C, F, j, X).scale(vj)
    return out


def covariant_gradient(C: Connection, F: FrameChart, X: ExtendedField) -> ExtendedField:
    """All four directions at once; the direction is the last lower vector index."""
    t = X.type
    g = SpinTensorType(t.alpha, t.beta, t.nu, t.gamma, t.m, t.n + 1)
    parts = {j: covariant_derivative(C, F, j, X) for j in VECTOR}
    return ExtendedField._raw(g, {idx: parts[idx[-1]][idx[:-1]] for idx in g.indices()})


def connection_transform(C: Connection, F: FrameChart) -> Connection:
    """Components in the second chart of F.

    A~^a_cb = sum Tf^a_k Sf^i_b S^j_c (A^k_ji - vartheta^k_ji), Abar~ the same
    with conjugated spinor matrices and parameters, Gamma~ with T, S, S and
    theta; natives are then rewritten through the new chart's natives.
    """
    theta, vartheta = theta_params(F)
    S, T, Sf, Tf = F.S, F.T, F.Sf, F.Tf
    Sfc, Tfc = Sf.conj(), Tf.conj()
    subst = native_substitution(C.spec, F)

    def law(family, par, up, lo, ind, conj_par):
        diff = {}
        for key, v in family.items():
            p = par[key]
            diff[key] = v - (p.bar() if conj_par else p)
        # contract the direction, then the upper index, then the lower one
        d1 = {}
        for k in ind:
            for c in VECTOR:
                for i in ind:
                    acc = ZERO
                    for j in VECTOR:
                        s, d = S[j, c], diff[(k, j, i)]
                        if s and d:
                            acc = acc + s * d
                    d1[(k, c, i)] = acc
        d2 = {}
        for a in ind:
            for c in VECTOR:
                for i in ind:
                    acc = ZERO
                    for k in ind:
                        u, d = up[a, k], d1[(k, c, i)]
                        if u and d:
                            acc = acc + u * d
                    d2[(a, c, i)] = acc
        out = {}
        for a in ind:
            for c in VECTOR:
                for b in ind:
                    acc = ZERO
                    for i in ind:
                        w, d = lo[i, b], d2[(a, c, i)]
                        if w and d:
                            acc = acc + w * d
                    out[(a, c, b)] = acc.substitute(subst)
        return out

    return Connection(
        C.spec,
        law(C.A, vartheta, Tf, Sf, SPINOR, False),
        law(C.Abar, vartheta, Tfc, Sfc, SPINOR, True),
        law(C.Gamma, theta, T, S, VECTOR, False),
    )


def is_conjugate_pair(C: Connection) -> bool:
    return C.is_conjugate_pair()
