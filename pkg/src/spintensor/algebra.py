"""Exact multivariate polynomials over the Gaussian rationals.

Every scalar in the engine is a :class:`ScalarExpr`: a sparse polynomial in
base coordinates ``x0..x3`` and the native field variables ``S[P]{...}`` of a
composite bundle, together with their conjugates ``Sbar[P]{...}``.  Conjugate
variables are independent formal symbols paired through :func:`bar`, so exact
partial derivatives follow the Wirtinger convention.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

BASE = 0
NATIVE = 1
NATIVE_BAR = 2


class Var(NamedTuple):
    """A formal variable; ordering is the tuple order of its fields.

    ``kind`` is BASE, NATIVE or NATIVE_BAR.  Base coordinates carry their
    index in ``field``; native variables carry the field number P and the
    upper/lower index lists written in the order of the component notation.
    """

    kind: int
    field: int
    upper: tuple = ()
    lower: tuple = ()

    def __str__(self) -> str:
        if self.kind == BASE:
            return f"x{self.field}"
        head = "S" if self.kind == NATIVE else "Sbar"
        up = ",".join(map(str, self.upper))
        lo = ",".join(map(str, self.lower))
        return f"{head}[{self.field}]{{{up};{lo}}}"


def coord(k: int) -> Var:
    if k not in (0, 1, 2, 3):
        raise ValueError(f"base coordinate index must be 0..3, got {k}")
    return Var(BASE, k)


def native(P: int, upper=(), lower=()) -> Var:
    return Var(NATIVE, P, tuple(upper), tuple(lower))


def native_bar(P: int, upper=(), lower=()) -> Var:
    return Var(NATIVE_BAR, P, tuple(upper), tuple(lower))


def bar_var(v: Var) -> Var:
    if v.kind == BASE:
        return v
    return v._replace(kind=NATIVE + NATIVE_BAR - v.kind)


# ---------------------------------------------------------------------------
# Gaussian rationals.  Internally a coefficient is an int triple (a, b, d)
# meaning (a + b i) / d with d > 0 and gcd(a, b, d) == 1.

def _norm(a: int, b: int, d: int) -> tuple:
    if d == 1:
        return (a, b, 1)
    if d < 0:
        a, b, d = -a, -b, -d
    g = math.gcd(math.gcd(a, b), d)
    if g != 1:
        a, b, d = a // g, b // g, d // g
    return (a, b, d)


def _cadd(x: tuple, y: tuple) -> tuple:
    if x[2] == 1 and y[2] == 1:
        return (x[0] + y[0], x[1] + y[1], 1)
    if x[2] == y[2]:
        return _norm(x[0] + y[0], x[1] + y[1], x[2])
    return _norm(x[0] * y[2] + y[0] * x[2], x[1] * y[2] + y[1] * x[2], x[2] * y[2])


def _cmul(x: tuple, y: tuple) -> tuple:
    a1, b1, d1 = x
    a2, b2, d2 = y
    if d1 == 1 and d2 == 1:
        return (a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, 1)
    if b1 == 0 and b2 == 0:
        return _norm(a1 * a2, 0, d1 * d2)
    return _norm(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)


def _cneg(x: tuple) -> tuple:
    return (-x[0], -x[1], x[2])


def _cconj(x: tuple) -> tuple:
    return (x[0], -x[1], x[2])


def _cinv(x: tuple) -> tuple:
    a, b, d = x
    n = a * a + b * b
    if n == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    # d / (a + b i) = d (a - b i) / (a^2 + b^2)
    return _norm(d * a, -d * b, n)


_ONE = (1, 0, 1)
_ZERO = (0, 0, 1)


def _coerce_coeff(value) -> tuple:
    if isinstance(value, GaussianRational):
        return value._t
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return (value, 0, 1)
    if isinstance(value, Fraction):
        return (value.numerator, 0, value.denominator)
    if isinstance(value, complex):
        raise TypeError("floating complex values are not exact; use GaussianRational")
    if isinstance(value, str):
        return GaussianRational.parse(value)._t
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("_t",)

    def __init__(self, re=0, im=0):
        r = Fraction(re)
        i = Fraction(im)
        d = r.denominator * i.denominator // math.gcd(r.denominator, i.denominator)
        self._t = _norm(r.numerator * (d // r.denominator), i.numerator * (d // i.denominator), d)

    @classmethod
    def _from(cls, t: tuple) -> GaussianRational:
        obj = cls.__new__(cls)
        obj._t = t
        return obj

    @classmethod
    def parse(cls, text: str) -> GaussianRational:
        m = re.fullmatch(r"\s*\(\s*(-?\d+(?:/\d+)?)\s*,\s*(-?\d+(?:/\d+)?)\s*\)\s*", text)
        if m:
            return cls(Fraction(m.group(1)), Fraction(m.group(2)))
        return cls(Fraction(text.strip()))

    @property
    def re(self) -> Fraction:
        return Fraction(self._t[0], self._t[2])

    @property
    def im(self) -> Fraction:
        return Fraction(self._t[1], self._t[2])

    def conjugate(self) -> GaussianRational:
        return GaussianRational._from(_cconj(self._t))

    def norm2(self) -> Fraction:
        """|z|^2, exact."""
        a, b, d = self._t
        return Fraction(a * a + b * b, d * d)

    def is_real(self) -> bool:
        return self._t[1] == 0

    def __add__(self, other):
        try:
            return GaussianRational._from(_cadd(self._t, _coerce_coeff(other)))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return GaussianRational._from(_cadd(self._t, _cneg(_coerce_coeff(other))))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return GaussianRational._from(_cadd(_coerce_coeff(other), _cneg(self._t)))
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        try:
            return GaussianRational._from(_cmul(self._t, _coerce_coeff(other)))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            return GaussianRational._from(_cmul(self._t, _cinv(_coerce_coeff(other))))
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        try:
            return GaussianRational._from(_cmul(_coerce_coeff(other), _cinv(self._t)))
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return GaussianRational._from(_cneg(self._t))

    def __eq__(self, other):
        try:
            return self._t == _coerce_coeff(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._t)

    def __bool__(self):
        return self._t[0] != 0 or self._t[1] != 0

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return _format_coeff(self._t)


I = GaussianRational(0, 1)


def _fmt_q(n: int, d: int) -> str:
    g = math.gcd(n, d)
    n, d = n // g, d // g
    return str(n) if d == 1 else f"{n}/{d}"


def _format_coeff(t: tuple) -> str:
    a, b, d = t
    return f"({_fmt_q(a, d)},{_fmt_q(b, d)})"


# ---------------------------------------------------------------------------
# Polynomials.
#
# Every Var gets a small integer id on first use.  A monomial is packed into
# one int holding a 16-bit exponent field per id, so multiplying monomials is
# integer addition.  A polynomial stores Gaussian-integer numerators (a, b)
# over a single positive common denominator, kept in lowest terms.

_SHIFT = 16
_MASK = (1 << _SHIFT) - 1
_VAR_IDS: dict = {}
_VARS: list = []
_BAR_ID: list = []


def _vid(v: Var) -> int:
    i = _VAR_IDS.get(v)
    if i is None:
        i = len(_VARS)
        _VAR_IDS[v] = i
        _VARS.append(v)
        _BAR_ID.append(None)
    return i


def _bar_id(i: int) -> int:
    b = _BAR_ID[i]
    if b is None:
        b = _vid(bar_var(_VARS[i]))
        _BAR_ID[i] = b
        _BAR_ID[b] = i
    return b


def _decode(m: int) -> list:
    """[(var id, exponent), ...] for a packed monomial."""
    out = []
    i = 0
    while m:
        e = m & _MASK
        if e:
            out.append((i, e))
        m >>= _SHIFT
        i += 1
    return out


def _encode(pairs) -> int:
    m = 0
    for i, e in pairs:
        if e >= _MASK:
            raise OverflowError("exponent too large")
        m += e << (_SHIFT * i)
    return m


def _mono_key(m: int) -> tuple:
    """Monomial as a tuple of (Var, exponent) sorted by the Var order."""
    return tuple(sorted((_VARS[i], e) for i, e in _decode(m)))


def _mono_bar(m: int) -> int:
    return _encode((_bar_id(i), e) for i, e in _decode(m))


class MissingVariableError(KeyError):
    """Raised by :meth:`ScalarExpr.eval` when a variable has no value."""

    def __init__(self, var: Var):
        super().__init__(var)
        self.var = var

    def __str__(self):
        return f"no value assigned to variable {self.var}"


class NotDivisibleError(ArithmeticError):
    pass


def _make(terms: dict, den: int) -> ScalarExpr:
    """Drop zero numerators and reduce the common denominator."""
    terms = {m: c for m, c in terms.items() if c[0] or c[1]}
    if not terms:
        return ZERO
    if den != 1:
        g = den
        for a, b in terms.values():
            g = math.gcd(g, a, b)
            if g == 1:
                break
        if g != 1:
            terms = {m: (a // g, b // g) for m, (a, b) in terms.items()}
            den //= g
    return ScalarExpr._raw(terms, den)


class ScalarExpr:
    """Immutable sparse polynomial with Gaussian-rational coefficients.

    Equality is structural: two expressions are equal iff they have the same
    monomials with the same coefficients, which for a canonical sparse form
    is the same as equality of polynomials.
    """

    __slots__ = ("_t", "_d", "_hash")

    def __init__(self, terms: Mapping | None = None):
        """Build from a mapping ``{((var, exp), ...): coeff}``."""
        items = [] if terms is None else [(c, dict(m)) for m, c in terms.items()]
        built = ScalarExpr.from_terms(items)
        self._t, self._d, self._hash = built._t, built._d, None

    @classmethod
    def _raw(cls, terms: dict, den: int = 1) -> ScalarExpr:
        obj = cls.__new__(cls)
        obj._t = terms
        obj._d = den
        obj._hash = None
        return obj

    @classmethod
    def _from_triples(cls, triples: dict) -> ScalarExpr:
        """From ``{packed monomial: (a, b, d)}``."""
        den = 1
        for _, _, d in triples.values():
            den = den * d // math.gcd(den, d)
        return _make({m: (a * (den // d), b * (den // d)) for m, (a, b, d) in triples.items()}, den)

    def _const_triple(self) -> tuple:
        a, b = self._t.get(0, (0, 0))
        return _norm(a, b, self._d)

    @classmethod
    def _from_const_triple(cls, t: tuple) -> ScalarExpr:
        return cls._raw({0: (t[0], t[1])}, t[2]) if t[0] or t[1] else ZERO

    def _triples(self) -> dict:
        d = self._d
        return {m: _norm(a, b, d) for m, (a, b) in self._t.items()}

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, value) -> ScalarExpr:
        a, b, d = _coerce_coeff(value)
        if a == 0 and b == 0:
            return ZERO
        return cls._raw({0: (a, b)}, d)

    @classmethod
    def var(cls, v: Var, coeff=1) -> ScalarExpr:
        a, b, d = _coerce_coeff(coeff)
        if a == 0 and b == 0:
            return ZERO
        return cls._raw({1 << (_SHIFT * _vid(v)): (a, b)}, d)

    @classmethod
    def from_terms(cls, items: Iterable) -> ScalarExpr:
        """Build from ``(coeff, {var: exp})`` pairs."""
        acc: dict = {}
        for coeff, powers in items:
            m = _encode((_vid(v), e) for v, e in dict(powers).items() if e)
            c = _coerce_coeff(coeff)
            acc[m] = _cadd(acc[m], c) if m in acc else c
        return cls._from_triples(acc)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError(f"expression is not constant: {self}")
        a, b = self._t.get(0, (0, 0))
        return GaussianRational._from(_norm(a, b, self._d))

    def variables(self) -> set:
        mask = 0
        for m in self._t:
            mask |= m
        out = set()
        i = 0
        while mask:
            if mask & _MASK:
                out.add(_VARS[i])
            mask >>= _SHIFT
            i += 1
        return out

    def degree(self) -> int:
        if not self._t:
            return -1
        return max(sum(e for _, e in _decode(m)) for m in self._t)

    def terms(self) -> list:
        """``(GaussianRational, monomial)`` pairs sorted by monomial.

        A monomial is a tuple of ``(Var, exponent)`` sorted by Var.
        """
        d = self._d
        out = [(GaussianRational._from(_norm(a, b, d)), _mono_key(m)) for m, (a, b) in self._t.items()]
        out.sort(key=lambda t: t[1])
        return out

    def has_real_coefficients(self) -> bool:
        return all(b == 0 for _, b in self._t.values())

    def __len__(self):
        return len(self._t)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        d1, d2 = self._d, other._d
        if d1 == d2:
            out = dict(self._t)
            get = out.get
            for m, (a, b) in other._t.items():
                c = get(m)
                if c is None:
                    out[m] = (a, b)
                else:
                    out[m] = (c[0] + a, c[1] + b)
            return _make(out, d1)
        g = math.gcd(d1, d2)
        f1, f2 = d2 // g, d1 // g
        out = {m: (a * f1, b * f1) for m, (a, b) in self._t.items()}
        get = out.get
        for m, (a, b) in other._t.items():
            c = get(m)
            if c is None:
                out[m] = (a * f2, b * f2)
            else:
                out[m] = (c[0] + a * f2, c[1] + b * f2)
        return _make(out, d1 * f1)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr._raw({m: (-a, -b) for m, (a, b) in self._t.items()}, self._d)

    def __sub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        if not self._t or not other._t:
            return ZERO
        out: dict = {}
        get = out.get
        t2 = list(other._t.items())
        for m1, (a1, b1) in self._t.items():
            if b1 == 0:
                for m2, (a2, b2) in t2:
                    m = m1 + m2
                    c = get(m)
                    if c is None:
                        out[m] = (a1 * a2, a1 * b2)
                    else:
                        out[m] = (c[0] + a1 * a2, c[1] + a1 * b2)
            else:
                for m2, (a2, b2) in t2:
                    m = m1 + m2
                    ra = a1 * a2 - b1 * b2
                    rb = a1 * b2 + a2 * b1
                    c = get(m)
                    if c is None:
                        out[m] = (ra, rb)
                    else:
                        out[m] = (c[0] + ra, c[1] + rb)
        return _make(out, self._d * other._d)

    __rmul__ = __mul__

    def scale(self, factor) -> ScalarExpr:
        a2, b2, d2 = _coerce_coeff(factor)
        if a2 == 0 and b2 == 0:
            return ZERO
        if (a2, b2, d2) == _ONE:
            return self
        return _make({m: (a * a2 - b * b2, a * b2 + a2 * b) for m, (a, b) in self._t.items()}, self._d * d2)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __truediv__(self, other):
        # exact division by a nonzero constant only
        c = _coerce_coeff(other) if not isinstance(other, ScalarExpr) else other.constant_value()._t
        return self.scale(GaussianRational._from(_cinv(c)))

    # -- calculus and conjugation ------------------------------------------
    def partial(self, v: Var) -> ScalarExpr:
        i = _VAR_IDS.get(v)
        if i is None or not self._t:
            return ZERO
        shift = _SHIFT * i
        unit = 1 << shift
        out = {}
        for m, (a, b) in self._t.items():
            e = (m >> shift) & _MASK
            if e:
                out[m - unit] = (a * e, b * e)
        if not out:
            return ZERO
        return _make(out, self._d)

    def bar(self) -> ScalarExpr:
        return ScalarExpr._raw({_mono_bar(m): (a, -b) for m, (a, b) in self._t.items()}, self._d)

    def substitute(self, mapping: Mapping) -> ScalarExpr:
        """Simultaneously replace variables by expressions."""
        if not mapping or not self._t:
            return self
        subs = {}
        for v, e in mapping.items():
            i = _VAR_IDS.get(v)
            if i is not None:
                subs[i] = _lift(e)
        if not subs:
            return self
        field_mask = 0
        for i in subs:
            field_mask |= _MASK << (_SHIFT * i)
        # group terms by their substituted part
        groups: dict = {}
        for m, c in self._t.items():
            s = m & field_mask
            groups.setdefault(s, {})[m - s] = c
        powers: dict = {}
        result = ZERO
        for s, rest in groups.items():
            factor = ONE
            for i, e in _decode(s):
                key = (i, e)
                p = powers.get(key)
                if p is None:
                    p = subs[i] ** e
                    powers[key] = p
                factor = factor * p
            result = result + _make(rest, self._d) * factor
        return result

    def eval(self, assignment: Mapping) -> GaussianRational:
        vals = {}
        total = _ZERO
        for m, (a, b) in self._t.items():
            val = _norm(a, b, self._d)
            for i, e in _decode(m):
                x = vals.get(i)
                if x is None:
                    v = _VARS[i]
                    if v not in assignment:
                        raise MissingVariableError(v)
                    x = _coerce_coeff(assignment[v])
                    vals[i] = x
                for _ in range(e):
                    val = _cmul(val, x)
            total = _cadd(total, val)
        return GaussianRational._from(total)

    def divide_exact(self, divisor: ScalarExpr) -> ScalarExpr:
        """Quotient q with self == q * divisor, or NotDivisibleError.

        Multivariate division by a single polynomial under a lex order; a
        single divisor is its own Groebner basis, so a nonzero remainder means
        the division is not exact.
        """
        divisor = _lift(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        dt = divisor._triples()
        lead_m = max(dt)
        lead_inv = _cinv(dt[lead_m])
        lead_pows = _decode(lead_m)
        rest = self._triples()
        quotient: dict = {}
        while rest:
            m = max(rest)
            pows = dict(_decode(m))
            if any(pows.get(i, 0) < e for i, e in lead_pows):
                raise NotDivisibleError(f"{self} is not divisible by {divisor}")
            qm = m - lead_m
            qc = _cmul(rest[m], lead_inv)
            quotient[qm] = qc
            for dm, dc in dt.items():
                sm = qm + dm
                s = _cadd(rest.get(sm, _ZERO), _cneg(_cmul(qc, dc)))
                if s[0] or s[1]:
                    rest[sm] = s
                else:
                    rest.pop(sm, None)
        return ScalarExpr._from_triples(quotient)

    # -- comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self._d == other._d and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._d, frozenset(self._t.items())))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    def __repr__(self):
        return f"ScalarExpr({format_expr(self)!r})"

    def __str__(self):
        return format_expr(self)


def _lift(value) -> ScalarExpr | None:
    if isinstance(value, ScalarExpr):
        return value
    if isinstance(value, Var):
        return ScalarExpr.var(value)
    try:
        return ScalarExpr.const(value)
    except TypeError:
        return None


def as_expr(value) -> ScalarExpr:
    out = _lift(value)
    if out is None:
        raise TypeError(f"cannot convert {type(value).__name__} to ScalarExpr")
    return out


ZERO = ScalarExpr._raw({})
ONE = ScalarExpr._raw({0: (1, 0)})


def x(k: int) -> ScalarExpr:
    return ScalarExpr.var(coord(k))


def partial(e: ScalarExpr, v: Var) -> ScalarExpr:
    return e.partial(v)


def bar(e) -> ScalarExpr:
    return as_expr(e).bar()


def evaluate(e: ScalarExpr, assignment: Mapping) -> GaussianRational:
    return e.eval(assignment)


# ---------------------------------------------------------------------------
# Text form

def format_expr(e: ScalarExpr) -> str:
    if not e._t:
        return "0"
    parts = []
    for c, mono in e.terms():
        pieces = [str(c)]
        for v, k in mono:
            pieces.append(f"{v}^{k}" if k != 1 else str(v))
        parts.append("*".join(pieces))
    return " + ".join(parts)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<coeff>\(\s*-?\d+(?:/\d+)?\s*,\s*-?\d+(?:/\d+)?\s*\))"
    r"|(?P<x>x(?P<k>\d+))"
    r"|(?P<s>(?P<head>Sbar|S)\[(?P<P>\d+)\]\{(?P<up>[\d,]*);(?P<lo>[\d,]*)\})"
    r"|(?P<pow>\^(?P<e>\d+))"
    r"|(?P<op>[*+])"
    r")"
)


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int, line: int = 1):
        self.text = text
        self.pos = pos
        self.line = line
        self.column = pos + 1
        super().__init__(f"line {line}, column {pos + 1}: {message}")


def _idx(s: str) -> tuple:
    return tuple(int(t) for t in s.split(",")) if s else ()


def parse_expr(text: str, line: int = 1) -> ScalarExpr:
    """Inverse of :func:`format_expr`; exact round trip on canonical text."""
    if text.strip() == "0":
        return ZERO
    pos = 0
    n = len(text)
    items = []
    coeff = None
    powers: dict = {}
    expect = "coeff"
    last_var = None
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError("unexpected character", text, bad, line)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("coeff"):
            if expect != "coeff":
                raise ExprSyntaxError("coefficient not expected here", text, start, line)
            coeff = GaussianRational.parse(m.group("coeff"))
            powers = {}
            expect = "op"
        elif m.group("x") or m.group("s"):
            if expect != "factor":
                raise ExprSyntaxError("variable must follow '*'", text, start, line)
            if m.group("x"):
                k = int(m.group("k"))
                if k > 3:
                    raise ExprSyntaxError(f"base coordinate x{k} out of range", text, start, line)
                v = coord(k)
            else:
                maker = native_bar if m.group("head") == "Sbar" else native
                v = maker(int(m.group("P")), _idx(m.group("up")), _idx(m.group("lo")))
            powers[v] = powers.get(v, 0) + 1
            last_var = v
            expect = "op_or_pow"
        elif m.group("pow"):
            if expect != "op_or_pow":
                raise ExprSyntaxError("'^' must follow a variable", text, start, line)
            e = int(m.group("e"))
            if e < 1:
                raise ExprSyntaxError("exponent must be positive", text, start, line)
            powers[last_var] += e - 1
            expect = "op"
        else:
            op = m.group("op")
            if expect not in ("op", "op_or_pow"):
                raise ExprSyntaxError(f"operator {op!r} not expected here", text, start, line)
            if op == "*":
                expect = "factor"
            else:
                items.append((coeff, powers))
                coeff, powers = None, {}
                expect = "coeff"
        pos = m.end()
    if expect not in ("op", "op_or_pow"):
        raise ExprSyntaxError("unexpected end of expression", text, n, line)
    items.append((coeff, powers))
    return ScalarExpr.from_terms(items)


# ---------------------------------------------------------------------------
# Small dense matrices over ScalarExpr, addressed by their index values
# (spinor 1..2, vector 0..3).

class Matrix:
    """Square matrix with entries M[i, j] for i, j in ``indices``.

    ``M[i, j]`` is the component with upper index i and lower index j, so a
    matrix acts on upper-indexed columns by ``(M v)^i = sum_j M[i, j] v^j``.
    """

    __slots__ = ("indices", "_rows")

    def __init__(self, rows, indices=None):
        rows = [[as_expr(v) for v in row] for row in rows]
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise ValueError("matrix must be square")
        if indices is None:
            indices = tuple(range(1, 3)) if size == 2 else tuple(range(size))
        self.indices = tuple(indices)
        if len(self.indices) != size:
            raise ValueError("index labels do not match matrix size")
        self._rows = tuple(tuple(r) for r in rows)

    @classmethod
    def identity(cls, indices) -> Matrix:
        indices = tuple(indices)
        return cls([[ONE if a == b else ZERO for b in indices] for a in indices], indices)

    @classmethod
    def from_function(cls, indices, f) -> Matrix:
        indices = tuple(indices)
        return cls([[f(a, b) for b in indices] for a in indices], indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    def _pos(self, i):
        return i - self.indices[0]

    def __getitem__(self, key):
        i, j = key
        return self._rows[i - self.indices[0]][j - self.indices[0]]

    def rows(self):
        return self._rows

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.indices != other.indices:
            raise ValueError("matrix index ranges differ")
        n = self.size
        if self.is_constant() and other.is_constant():
            return self._matmul_const(other)
        out = []
        for r in range(n):
            row = []
            for c in range(n):
                acc = ZERO
                for k in range(n):
                    a = self._rows[r][k]
                    if a:
                        b = other._rows[k][c]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out, self.indices)

    def _matmul_const(self, other: Matrix) -> Matrix:
        A = [[e._const_triple() for e in r] for r in self._rows]
        B = [[e._const_triple() for e in r] for r in other._rows]
        zero = (0, 0, 1)
        out = []
        for ra in A:
            row = []
            for c in range(len(B)):
                acc = zero
                for a, rb in zip(ra, B):
                    b = rb[c]
                    if (a[0] or a[1]) and (b[0] or b[1]):
                        acc = _cadd(acc, _cmul(a, b))
                row.append(ScalarExpr._from_const_triple(acc))
            out.append(row)
        return Matrix(out, self.indices)

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)], self.indices)

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)], self.indices)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self._rows], self.indices)

    def scale(self, factor) -> Matrix:
        f = as_expr(factor)
        return Matrix([[a * f for a in r] for r in self._rows], self.indices)

    def transpose(self) -> Matrix:
        return Matrix([list(col) for col in zip(*self._rows)], self.indices)

    def conj(self) -> Matrix:
        return Matrix([[a.bar() for a in r] for r in self._rows], self.indices)

    def det(self) -> ScalarExpr:
        return _det([list(r) for r in self._rows])

    def adjugate(self) -> Matrix:
        n = self.size
        if n == 1:
            return Matrix([[ONE]], self.indices)
        rows = [list(r) for r in self._rows]
        out = [[ZERO] * n for _ in range(n)]
        for r in range(n):
            for c in range(n):
                minor = [row[:c] + row[c + 1:] for k, row in enumerate(rows) if k != r]
                cof = _det(minor)
                out[c][r] = cof if (r + c) % 2 == 0 else -cof
        return Matrix(out, self.indices)

    def inverse(self) -> Matrix:
        """Exact inverse; entries must stay polynomial."""
        d = self.det()
        if d.is_zero():
            raise ZeroDivisionError("singular matrix (determinant is 0)")
        adj = self.adjugate()
        if d.is_constant():
            return adj.scale(GaussianRational._from(_cinv(d.constant_value()._t)))
        return Matrix([[a.divide_exact(d) for a in r] for r in adj._rows], self.indices)

    def is_constant(self) -> bool:
        return all(a.is_constant() for r in self._rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.indices == other.indices and self._rows == other._rows

    def __hash__(self):
        return hash((self.indices, self._rows))

    def __repr__(self):
        return f"Matrix({[[str(a) for a in r] for r in self._rows]}, indices={self.indices})"


def _det(rows) -> ScalarExpr:
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for c in range(n):
        a = rows[0][c]
        if not a:
            continue
        minor = [row[:c] + row[c + 1:] for row in rows[1:]]
        term = a * _det(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def format_matrix(M: Matrix) -> str:
    """Row-major text, one row per line, entries separated by ' | '."""
    return "\n".join(" | ".join(format_expr(a) for a in row) for row in M.rows())


def parse_matrix(text: str, indices=None, first_line: int = 1) -> Matrix:
    rows = []
    for k, line in enumerate(l for l in text.splitlines() if l.strip()):
        rows.append([parse_expr(cell, line=first_line + k) for cell in line.split("|")])
    return Matrix(rows, indices)
