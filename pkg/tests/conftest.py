import random

import pytest
import sympy as sp

from spintensor.algebra import BASE, GaussianRational, ScalarExpr


def to_sympy(e: ScalarExpr, symbols: dict | None = None):
    """Independent view of a ScalarExpr as a sympy expression (base coordinates only)."""
    symbols = {} if symbols is None else symbols
    out = sp.Integer(0)
    for c, mono in e.terms():
        term = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        for v, k in mono:
            assert v.kind == BASE, "oracle only handles base coordinates"
            sym = symbols.setdefault(v.field, sp.Symbol(f"x{v.field}"))
            term *= sym**k
        out += term
    return out


@pytest.fixture
def rng():
    return random.Random(12345)


def gr(re, im=0):
    return GaussianRational(re, im)
