"""Spin-tensor types, extended fields, frame charts and change-of-frame laws.

Index layout of every component array is fixed:

    upper spinor, lower spinor, upper barred, lower barred, upper vector, lower vector

A component index is a flat tuple in that order.  Spinor entries run over
1..2 and vector entries over 0..3.  Native variables ``S[P]{upper;lower}``
list the upper entries (spinor, barred, vector) before the semicolon and the
lower entries after it.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping

from .algebra import (
    NATIVE,
    NATIVE_BAR,
    ONE,
    ZERO,
    Matrix,
    NotDivisibleError,
    ScalarExpr,
    Var,
    as_expr,
    coord,
    native,
    native_bar,
)
from .spingroup import SPINOR, VECTOR, sl2_inverse, varphi

# block ids in layout order
UP_SPIN, LO_SPIN, UP_BAR, LO_BAR, UP_VEC, LO_VEC = range(6)
_BLOCK_RANGE = (SPINOR, SPINOR, SPINOR, SPINOR, VECTOR, VECTOR)
_UPPER_BLOCKS = (UP_SPIN, UP_BAR, UP_VEC)
_LOWER_BLOCKS = (LO_SPIN, LO_BAR, LO_VEC)


class TypeMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SpinTensorType:
    """Signature (alpha, beta | nu, gamma | m, n)."""

    alpha: int = 0
    beta: int = 0
    nu: int = 0
    gamma: int = 0
    m: int = 0
    n: int = 0

    def __post_init__(self):
        for v in self.counts:
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"type entries must be non-negative integers, got {self.counts}")

    @property
    def counts(self) -> tuple:
        return (self.alpha, self.beta, self.nu, self.gamma, self.m, self.n)

    @property
    def rank(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return 2 ** (self.alpha + self.beta + self.nu + self.gamma) * 4 ** (self.m + self.n)

    @property
    def blocks(self) -> tuple:
        """Block id of every position in a flat index."""
        return _blocks(self.counts)

    def indices(self) -> tuple:
        return _indices(self.counts)

    def swapped(self) -> SpinTensorType:
        """The type of tau(X): spinor and barred blocks exchanged."""
        return SpinTensorType(self.nu, self.gamma, self.alpha, self.beta, self.m, self.n)

    def tau_index(self, idx: tuple) -> tuple:
        """Map an index of this type to the matching index of the swapped type."""
        a, b, c, d, _, _ = self.counts
        return idx[a + b:a + b + c + d] + idx[:a + b] + idx[a + b + c + d:]

    def split(self, idx: tuple) -> tuple:
        """(upper, lower) index lists in component notation order."""
        a, b, c, d, m, n = self.counts
        o1, o2, o3, o4, o5 = a, a + b, a + b + c, a + b + c + d, a + b + c + d + m
        return idx[:o1] + idx[o2:o3] + idx[o4:o5], idx[o1:o2] + idx[o3:o4] + idx[o5:]

    def join(self, upper: tuple, lower: tuple) -> tuple:
        a, b, c, d, m, n = self.counts
        if len(upper) != a + c + m or len(lower) != b + d + n:
            raise TypeMismatchError(f"index lists {upper};{lower} do not fit type {self}")
        return upper[:a] + lower[:b] + upper[a:a + c] + lower[b:b + d] + upper[a + c:] + lower[b + d:]

    def valid_index(self, idx: tuple) -> bool:
        blocks = self.blocks
        return len(idx) == len(blocks) and all(v in _BLOCK_RANGE[b] for v, b in zip(idx, blocks))

    def __str__(self):
        a, b, c, d, m, n = self.counts
        return f"({a},{b}|{c},{d}|{m},{n})"

    @classmethod
    def parse(cls, text: str) -> SpinTensorType:
        m = re.fullmatch(r"\s*\(\s*(\d+)\s*,\s*(\d+)\s*\|\s*(\d+)\s*,\s*(\d+)\s*\|\s*(\d+)\s*,\s*(\d+)\s*\)\s*", text)
        if not m:
            raise ValueError(f"cannot parse spin-tensor type {text!r}")
        return cls(*(int(g) for g in m.groups()))


@lru_cache(maxsize=None)
def _blocks(counts: tuple) -> tuple:
    return tuple(b for b, c in enumerate(counts) for _ in range(c))


@lru_cache(maxsize=None)
def _indices(counts: tuple) -> tuple:
    return tuple(itertools.product(*(_BLOCK_RANGE[b] for b in _blocks(counts))))


SCALAR = SpinTensorType()
SPINOR_OP = SpinTensorType(1, 1, 0, 0, 0, 0)
BAR_OP = SpinTensorType(0, 0, 1, 1, 0, 0)
VECTOR_OP = SpinTensorType(0, 0, 0, 0, 1, 1)
VECTOR_FIELD = SpinTensorType(0, 0, 0, 0, 1, 0)


class ExtendedField:
    """A spin-tensor type with one ScalarExpr per component.

    Components are kept dense: every index of the type is present.
    """

    __slots__ = ("type", "_c")

    def __init__(self, stype: SpinTensorType, components: Mapping | None = None):
        self.type = stype
        comps = {} if components is None else dict(components)
        out = {}
        for idx in stype.indices():
            v = comps.pop(idx, ZERO)
            out[idx] = as_expr(v)
        if comps:
            bad = next(iter(comps))
            raise TypeMismatchError(f"index {bad} is not valid for type {stype}")
        self._c = out

    @classmethod
    def _raw(cls, stype, comps) -> ExtendedField:
        obj = cls.__new__(cls)
        obj.type = stype
        obj._c = comps
        return obj

    @classmethod
    def zero(cls, stype: SpinTensorType) -> ExtendedField:
        return cls._raw(stype, {idx: ZERO for idx in stype.indices()})

    @classmethod
    def from_function(cls, stype: SpinTensorType, f: Callable) -> ExtendedField:
        return cls._raw(stype, {idx: as_expr(f(idx)) for idx in stype.indices()})

    @classmethod
    def scalar(cls, value) -> ExtendedField:
        return cls._raw(SCALAR, {(): as_expr(value)})

    @classmethod
    def from_matrix(cls, stype: SpinTensorType, M: Matrix) -> ExtendedField:
        """Operator-type field (1,1|..), (0,0|1,1|..) or (..|1,1) from a matrix."""
        if stype.rank != 2:
            raise TypeMismatchError("from_matrix needs a rank-2 operator type")
        return cls.from_function(stype, lambda idx: M[idx[0], idx[1]])

    def to_matrix(self) -> Matrix:
        if self.type not in (SPINOR_OP, BAR_OP, VECTOR_OP):
            raise TypeMismatchError(f"type {self.type} is not an operator type")
        ind = SPINOR if self.type != VECTOR_OP else VECTOR
        return Matrix.from_function(ind, lambda a, b: self._c[(a, b)])

    def __getitem__(self, idx) -> ScalarExpr:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._c[idx]

    def items(self):
        return self._c.items()

    def components(self) -> dict:
        return dict(self._c)

    def map(self, f: Callable) -> ExtendedField:
        return ExtendedField._raw(self.type, {i: f(v) for i, v in self._c.items()})

    def _check(self, other: ExtendedField):
        if not isinstance(other, ExtendedField):
            raise TypeError("expected an ExtendedField")
        if other.type != self.type:
            raise TypeMismatchError(f"type mismatch: {self.type} vs {other.type}")

    def __add__(self, other: ExtendedField) -> ExtendedField:
        self._check(other)
        return ExtendedField._raw(self.type, {i: v + other._c[i] for i, v in self._c.items()})

    def __sub__(self, other: ExtendedField) -> ExtendedField:
        self._check(other)
        return ExtendedField._raw(self.type, {i: v - other._c[i] for i, v in self._c.items()})

    def __neg__(self) -> ExtendedField:
        return self.map(lambda v: -v)

    def scale(self, factor) -> ExtendedField:
        f = as_expr(factor)
        if f.is_constant():
            c = f.constant_value()
            return self.map(lambda v: v.scale(c))
        return self.map(lambda v: v * f)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self._c.values())

    def variables(self) -> set:
        out = set()
        for v in self._c.values():
            out |= v.variables()
        return out

    def first_nonzero(self):
        """(index, component) of the first nonzero component, or None."""
        for idx in self.type.indices():
            v = self._c[idx]
            if not v.is_zero():
                return idx, v
        return None

    def __eq__(self, other):
        if not isinstance(other, ExtendedField):
            return NotImplemented
        return self.type == other.type and self._c == other._c

    def __hash__(self):
        return hash((self.type, frozenset(self._c.items())))

    def __repr__(self):
        nz = sum(1 for v in self._c.values() if v)
        return f"ExtendedField({self.type}, {nz}/{len(self._c)} nonzero)"


ComponentArray = ExtendedField


def diff_report(lhs: ExtendedField, rhs: ExtendedField):
    """None if equal, else (first differing index, lhs - rhs there)."""
    if lhs.type != rhs.type:
        raise TypeMismatchError(f"type mismatch: {lhs.type} vs {rhs.type}")
    for idx in lhs.type.indices():
        d = lhs[idx] - rhs[idx]
        if not d.is_zero():
            return idx, d
    return None


@dataclass(frozen=True)
class CompositeBundleSpec:
    """The list of native spin-tensor types S[1], ..., S[J]."""

    types: tuple

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if not self.types:
            raise ValueError("a composite bundle needs at least one native type (J >= 1)")
        for t in self.types:
            if not isinstance(t, SpinTensorType):
                raise TypeError("types must be SpinTensorType instances")

    @property
    def J(self) -> int:
        return len(self.types)

    def type_of(self, P: int) -> SpinTensorType:
        if not 1 <= P <= self.J:
            raise IndexError(f"field index P={P} out of range 1..{self.J}")
        return self.types[P - 1]

    def native_var(self, P: int, idx: tuple) -> Var:
        t = self.type_of(P)
        up, lo = t.split(idx)
        return native(P, up, lo)

    def native_bar_var(self, P: int, idx: tuple) -> Var:
        """Conjugate of the native variable at ``idx`` (an index of the P-th type)."""
        t = self.type_of(P)
        up, lo = t.split(idx)
        return native_bar(P, up, lo)

    def native_vars(self, P: int) -> list:
        return [self.native_var(P, idx) for idx in self.type_of(P).indices()]

    def native_bar_vars(self, P: int) -> list:
        return [self.native_bar_var(P, idx) for idx in self.type_of(P).indices()]

    def universe(self) -> list:
        out = [coord(k) for k in VECTOR]
        for P in range(1, self.J + 1):
            out += self.native_vars(P)
            out += self.native_bar_vars(P)
        return out

    def declares(self, v: Var) -> bool:
        if v.kind == 0:
            return v.field in VECTOR
        if not 1 <= v.field <= self.J:
            return False
        t = self.types[v.field - 1]
        try:
            idx = t.join(v.upper, v.lower)
        except TypeMismatchError:
            return False
        return t.valid_index(idx)

    def validate(self, X: ExtendedField) -> None:
        for v in X.variables():
            if not self.declares(v):
                raise ValueError(f"variable {v} is not declared by the bundle spec")

    def __str__(self):
        return "[" + ", ".join(str(t) for t in self.types) + "]"


def identity_field(spec: CompositeBundleSpec, P: int) -> ExtendedField:
    """The field S[P] whose components are the native variables themselves."""
    t = spec.type_of(P)
    return ExtendedField._raw(t, {idx: ScalarExpr.var(spec.native_var(P, idx)) for idx in t.indices()})


def tau(X: ExtendedField) -> ExtendedField:
    """Conjugate the components and exchange spinor and barred blocks."""
    s = X.type.swapped()
    return ExtendedField._raw(s, {idx: X[s.tau_index(idx)].bar() for idx in s.indices()})


# ---------------------------------------------------------------------------
# Slot-wise contraction, shared by the transformation laws and by every
# operator that acts on index slots.

def contract_slot(X: ExtendedField, pos: int, coeff: Callable, lower: bool) -> ExtendedField:
    """Contract one index slot with a matrix.

    Upper slot:  out[..a..] = sum_v coeff(a, v) X[..v..]
    Lower slot:  out[..b..] = sum_w coeff(w, b) X[..w..]
    """
    rng = _BLOCK_RANGE[X.type.blocks[pos]]
    out = {}
    for idx in X.type.indices():
        acc = ZERO
        here = idx[pos]
        for v in rng:
            src = X._c[idx[:pos] + (v,) + idx[pos + 1:]]
            if not src:
                continue
            c = coeff(v, here) if lower else coeff(here, v)
            if c:
                acc = acc + c * src
        out[idx] = acc
    return ExtendedField._raw(X.type, out)


def _matrix_coeff(M: Matrix):
    return lambda a, b: M[a, b]


def transform_components(X: ExtendedField, Sf: Matrix, Tf: Matrix, S: Matrix, T: Matrix) -> ExtendedField:
    """Components in the new frame from components in the old one.

    Tf on upper spinor slots, Sf on lower spinor slots, their conjugates on
    the barred slots, T on upper vector slots and S on lower vector slots.
    Passing ``(Tf, Sf, T, S)`` instead gives the inverse law.
    """
    for M, ind in ((Sf, SPINOR), (Tf, SPINOR), (S, VECTOR), (T, VECTOR)):
        if M.indices != ind:
            raise TypeMismatchError(f"transition matrix has indices {M.indices}, expected {ind}")
    mats = {
        UP_SPIN: Tf,
        LO_SPIN: Sf,
        UP_BAR: Tf.conj(),
        LO_BAR: Sf.conj(),
        UP_VEC: T,
        LO_VEC: S,
    }
    out = X
    for pos, block in enumerate(X.type.blocks):
        out = contract_slot(out, pos, _matrix_coeff(mats[block]), lower=block in _LOWER_BLOCKS)
    return out


# ---------------------------------------------------------------------------
# Frames

class SingularFrameError(ArithmeticError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"frame matrix is singular: det = {det}")


class NonPolynomialError(ArithmeticError):
    """A quantity that should be returned as a polynomial is a proper fraction."""

    def __init__(self, what, numerator=None, denominator=None):
        self.numerator = numerator
        self.denominator = denominator
        super().__init__(f"{what} is not polynomial (denominator {denominator})")


class MissingTransitionError(ValueError):
    pass


class FrameChart:
    """Frame coefficients Upsilon and an optional spinor transition Sfrak(x).

    ``upsilon[j, i]`` is the coefficient of d/dx^j in the frame vector
    Upsilon_i.  The transition links this chart to a second chart sharing the
    same coordinates; see :meth:`tilde`.
    """

    def __init__(self, upsilon: Matrix, transition: Matrix | None = None):
        if upsilon.indices != VECTOR:
            raise TypeMismatchError("Upsilon must be indexed by 0..3")
        self.upsilon = upsilon
        self.transition = transition
        if transition is not None and transition.indices != SPINOR:
            raise TypeMismatchError("transition must be a 2x2 spinor matrix")

    @classmethod
    def holonomic(cls, transition: Matrix | None = None) -> FrameChart:
        return cls(Matrix.identity(VECTOR), transition)

    @cached_property
    def det(self) -> ScalarExpr:
        d = self.upsilon.det()
        if d.is_zero():
            raise SingularFrameError(d)
        return d

    @cached_property
    def upsilon_inverse(self) -> Matrix:
        d = self.det
        try:
            return self.upsilon.inverse()
        except NotDivisibleError:
            raise NonPolynomialError("inverse frame matrix", denominator=d) from None

    def lie(self, i: int, f: ScalarExpr) -> ScalarExpr:
        """Derivative of a scalar along the frame vector Upsilon_i."""
        acc = ZERO
        for v in VECTOR:
            c = self.upsilon[v, i]
            if c:
                d = f.partial(coord(v))
                if d:
                    acc = acc + c * d
        return acc

    def _need_transition(self):
        if self.transition is None:
            raise MissingTransitionError("frame chart carries no transition")

    @cached_property
    def Sf(self) -> Matrix:
        self._need_transition()
        return self.transition

    @cached_property
    def Tf(self) -> Matrix:
        self._need_transition()
        return sl2_inverse(self.transition)

    @cached_property
    def S(self) -> Matrix:
        return varphi(self.Sf)

    @cached_property
    def T(self) -> Matrix:
        return varphi(self.Tf)

    def tilde(self) -> FrameChart:
        """The second chart: Upsilon~_i = sum_j S^j_i Upsilon_j, same coordinates.

        Its transition points back, so ``F.tilde().tilde()`` has the frame of F.
        """
        return FrameChart(self.upsilon @ self.S, self.Tf)

    def to_tilde(self, X: ExtendedField) -> ExtendedField:
        """Old-frame components to new-frame components (coefficients only)."""
        return transform_components(X, self.Sf, self.Tf, self.S, self.T)

    def from_tilde(self, X: ExtendedField) -> ExtendedField:
        return transform_components(X, self.Tf, self.Sf, self.T, self.S)

    def __eq__(self, other):
        if not isinstance(other, FrameChart):
            return NotImplemented
        return self.upsilon == other.upsilon and self.transition == other.transition

    def __hash__(self):
        return hash((self.upsilon, self.transition))


def _commutator_coefficients(F: FrameChart) -> dict:
    """LHS^m_ij = L_i(Upsilon^m_j) - L_j(Upsilon^m_i)."""
    out = {}
    for i in VECTOR:
        for j in VECTOR:
            for m in VECTOR:
                if i == j:
                    out[(m, i, j)] = ZERO
                elif (m, j, i) in out:
                    out[(m, i, j)] = -out[(m, j, i)]
                else:
                    out[(m, i, j)] = F.lie(i, F.upsilon[m, j]) - F.lie(j, F.upsilon[m, i])
    return out


def structure_numerators(F: FrameChart) -> tuple:
    """(N, det) with c^k_ij = N^k_ij / det exactly; N keyed (k, i, j)."""
    lhs = _commutator_coefficients(F)
    adj = F.upsilon.adjugate()
    det = F.det
    N = {}
    for k in VECTOR:
        for i in VECTOR:
            for j in VECTOR:
                acc = ZERO
                for m in VECTOR:
                    a = adj[k, m]
                    if a:
                        b = lhs[(m, i, j)]
                        if b:
                            acc = acc + a * b
                N[(k, i, j)] = acc
    return N, det


def structure_constants(F: FrameChart) -> dict:
    """c^k_ij keyed (k, i, j); raises NonPolynomialError for fractional results."""
    N, det = structure_numerators(F)
    out = {}
    if det.is_constant():
        inv = 1 / det.constant_value()
        return {key: v.scale(inv) for key, v in N.items()}
    for key, v in N.items():
        try:
            out[key] = v.divide_exact(det)
        except NotDivisibleError:
            raise NonPolynomialError(f"structure constant c^{key[0]}_{key[1]}{key[2]}", v, det) from None
    return out


def frame_commutator_residual(F: FrameChart, c: Mapping) -> dict:
    """L_i(Y^m_j) - L_j(Y^m_i) - sum_k c^k_ij Y^m_k; all zero for correct c."""
    lhs = _commutator_coefficients(F)
    out = {}
    for (m, i, j), v in lhs.items():
        acc = v
        for k in VECTOR:
            acc = acc - c[(k, i, j)] * F.upsilon[m, k]
        out[(m, i, j)] = acc
    return out


# ---------------------------------------------------------------------------
# theta-parameters.  All families are keyed (k, i, j) with i the direction of
# the Lie derivative, matching the (k, direction, index) order of connection
# components.

def _theta(F: FrameChart, P: Matrix, Q: Matrix, ind: tuple, form: int) -> dict:
    out = {}
    for k in ind:
        for i in VECTOR:
            for j in ind:
                acc = ZERO
                for a in ind:
                    if form == 1:
                        acc = acc + P[k, a] * F.lie(i, Q[a, j])
                    else:
                        acc = acc - F.lie(i, P[k, a]) * Q[a, j]
                out[(k, i, j)] = acc
    return out


def theta_params(F: FrameChart, form: int = 1) -> tuple:
    """(theta, vartheta) of the chart's transition.

    ``form=1``: theta^k_ij = sum_a S^k_a L_i(T^a_j);
    ``form=2``: theta^k_ij = -sum_a L_i(S^k_a) T^a_j.  Same for vartheta
    with the spinor matrices.
    """
    if form not in (1, 2):
        raise ValueError("form must be 1 or 2")
    F._need_transition()
    theta = _theta(F, F.S, F.T, VECTOR, form)
    vartheta = _theta(F, F.Sf, F.Tf, SPINOR, form)
    return theta, vartheta


def theta_params_tilde(F: FrameChart, form: int = 1) -> tuple:
    """The tilde-chart parameters built from T L~(S) and Tf L~(Sf)."""
    F._need_transition()
    G = FrameChart(F.upsilon @ F.S)
    theta = _theta(G, F.T, F.S, VECTOR, form)
    vartheta = _theta(G, F.Tf, F.Sf, SPINOR, form)
    return theta, vartheta


def theta_tilde_from_untilde(F: FrameChart) -> tuple:
    """Tilde parameters expressed through untilde ones by frame transport.

    theta~^k_ij = - sum S^c_i T^k_a S^b_j theta^a_cb, and likewise for
    vartheta with Tf, Sf on the spinor indices and S on the direction.
    """
    theta, vartheta = theta_params(F)
    S, T, Sf, Tf = F.S, F.T, F.Sf, F.Tf

    def transport(par, P, Q, ind):
        out = {}
        for k in ind:
            for i in VECTOR:
                for j in ind:
                    acc = ZERO
                    for a in ind:
                        if not Q[k, a]:
                            continue
                        for b in ind:
                            if not P[b, j]:
                                continue
                            for c in VECTOR:
                                if S[c, i]:
                                    acc = acc + S[c, i] * Q[k, a] * P[b, j] * par[(a, c, b)]
                    out[(k, i, j)] = -acc
        return out

    return transport(theta, S, T, VECTOR), transport(vartheta, Sf, Tf, SPINOR)


# ---------------------------------------------------------------------------
# Moving extended fields between charts

def native_substitution(spec: CompositeBundleSpec, F: FrameChart) -> dict:
    """Old native variables written through the new ones (inverse law).

    The new-chart variables reuse the same symbols, so the returned mapping
    sends each S[P] variable to a linear form in the S[P] variables with
    transition-matrix coefficients, and each Sbar variable to the bar of it.
    """
    mapping = {}
    for P in range(1, spec.J + 1):
        ident = identity_field(spec, P)
        old = F.from_tilde(ident)
        for idx, expr in old.items():
            mapping[spec.native_var(P, idx)] = expr
            mapping[spec.native_bar_var(P, idx)] = expr.bar()
    return mapping


def field_to_tilde(X: ExtendedField, spec: CompositeBundleSpec, F: FrameChart, subst: Mapping | None = None) -> ExtendedField:
    """Components of X in the second chart, as functions of its own natives."""
    if subst is None:
        subst = native_substitution(spec, F)
    return F.to_tilde(X).map(lambda v: v.substitute(subst))


def tensor_product(X: ExtendedField, Y: ExtendedField) -> ExtendedField:
    """Outer product, with the combined indices re-sorted into block order."""
    tx, ty = X.type, Y.type
    t = SpinTensorType(*(a + b for a, b in zip(tx.counts, ty.counts)))
    bx, by = tx.blocks, ty.blocks
    out = {}
    for ix in tx.indices():
        vx = X[ix]
        for iy in ty.indices():
            parts = []
            for blk in range(6):
                parts.extend(v for v, b in zip(ix, bx) if b == blk)
                parts.extend(v for v, b in zip(iy, by) if b == blk)
            out[tuple(parts)] = vx * Y[iy] if vx else ZERO
    return ExtendedField._raw(t, out)
