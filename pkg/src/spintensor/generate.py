"""Seeded random instances: matrices, frames, transitions, fields, connections.

Everything is drawn from a :class:`random.Random`, so a seed reproduces an
instance exactly.  Inverses that the engine needs (spinor transitions, frame
matrices) are kept polynomial by construction.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import ONE, ZERO, GaussianRational, Matrix, ScalarExpr, coord
from .bundle import (
    BAR_OP,
    SPINOR_OP,
    VECTOR_OP,
    CompositeBundleSpec,
    ExtendedField,
    FrameChart,
    SpinTensorType,
)
from .diffops import Connection, DegenerateTriple
from .spingroup import SPINOR, VECTOR, spinor_matrix

_DENOMS = (1, 1, 1, 2, 3)


def rand_rational(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice(_DENOMS))


def rand_gaussian(rng: random.Random, bound: int = 3, real: bool = False, nonzero: bool = False) -> GaussianRational:
    while True:
        z = GaussianRational(rand_rational(rng, bound), 0 if real else rand_rational(rng, bound))
        if z or not nonzero:
            return z


def rand_unimodular(rng: random.Random, bound: int = 3) -> Matrix:
    """upper-unitriangular * lower-unitriangular * diag(d, 1/d)."""
    p = rand_gaussian(rng, bound)
    q = rand_gaussian(rng, bound)
    d = rand_gaussian(rng, 2, nonzero=True)
    U = spinor_matrix([[1, p], [0, 1]])
    L = spinor_matrix([[1, 0], [q, 1]])
    D = spinor_matrix([[d, 0], [0, 1 / d]])
    return U @ L @ D


def rand_poly(rng: random.Random, variables, degree: int, terms: int = 2, real: bool = False,
              constant: bool = True) -> ScalarExpr:
    """Sparse polynomial with at most ``terms`` monomials of degree <= ``degree``."""
    variables = list(variables)
    items = []
    for _ in range(terms):
        deg = rng.randint(0 if constant else min(1, degree), degree) if degree > 0 else 0
        powers = {}
        for _ in range(deg):
            if not variables:
                break
            v = rng.choice(variables)
            powers[v] = powers.get(v, 0) + 1
        items.append((rand_gaussian(rng, 2, real=real, nonzero=True), powers))
    return ScalarExpr.from_terms(items)


def base_vars() -> list:
    return [coord(k) for k in VECTOR]


def rand_transition(rng: random.Random, degree: int = 1, terms: int = 2, factors: int = 1) -> Matrix:
    """Unimodular spinor matrix depending on x with polynomial inverse.

    A constant unimodular matrix times ``factors`` alternating elementary
    factors [[1, p(x)], [0, 1]] and [[1, 0], [q(x), 1]].
    """
    xs = base_vars()
    M = rand_unimodular(rng)
    for n in range(factors):
        p = rand_poly(rng, xs, degree, terms, constant=False)
        E = [[ONE, p], [ZERO, ONE]] if n % 2 == 0 else [[ONE, ZERO], [p, ONE]]
        M = M @ spinor_matrix(E)
    return M


def rand_frame(rng: random.Random, degree: int = 1, terms: int = 2, entries: int = 3) -> Matrix:
    """Real frame matrix of constant determinant: diag * elementary matrices."""
    xs = base_vars()
    M = Matrix.from_function(
        VECTOR, lambda a, b: ScalarExpr.const(rand_gaussian(rng, 2, real=True, nonzero=True)) if a == b else ZERO
    )
    for _ in range(entries):
        a, b = rng.sample(VECTOR, 2)
        p = rand_poly(rng, xs, degree, terms, real=True, constant=False)
        E = Matrix.from_function(VECTOR, lambda r, c: ONE if r == c else (p if (r, c) == (a, b) else ZERO))
        M = M @ E
    return M


def rand_chart(rng: random.Random, degree: int = 1, transition: bool = False, holonomic: bool = False) -> FrameChart:
    ups = Matrix.identity(VECTOR) if holonomic else rand_frame(rng, degree)
    tr = rand_transition(rng, degree) if transition else None
    return FrameChart(ups, tr)


def universe(spec: CompositeBundleSpec | None) -> list:
    return base_vars() if spec is None else spec.universe()


def rand_field(rng: random.Random, stype: SpinTensorType, spec: CompositeBundleSpec | None,
               degree: int = 1, terms: int = 2, density: float = 0.6, variables=None) -> ExtendedField:
    vs = universe(spec) if variables is None else list(variables)
    return ExtendedField.from_function(
        stype, lambda idx: rand_poly(rng, vs, degree, terms) if rng.random() < density else ZERO
    )


def rand_connection(rng: random.Random, spec: CompositeBundleSpec, degree: int = 1, terms: int = 2,
                    density: float = 0.5, variables=None) -> Connection:
    vs = universe(spec) if variables is None else list(variables)
    xs = [v for v in vs if v in base_vars()]

    def entry():
        # keep some x-dependence so frame derivatives of the components matter
        e = rand_poly(rng, vs, degree, terms)
        if xs and degree > 0 and rng.random() < 0.5:
            e = e + rand_poly(rng, xs, degree, 1, constant=False)
        return e

    def family(ind):
        return {
            (k, j, i): entry()
            for k in ind for j in VECTOR for i in ind
            if rng.random() < density
        }

    return Connection(spec, family(SPINOR), family(SPINOR), family(VECTOR))


def rand_triple(rng: random.Random, spec: CompositeBundleSpec | None, degree: int = 0, terms: int = 2,
                density: float = 0.7, variables=None) -> DegenerateTriple:
    return DegenerateTriple(
        rand_field(rng, SPINOR_OP, spec, degree, terms, density, variables),
        rand_field(rng, BAR_OP, spec, degree, terms, density, variables),
        rand_field(rng, VECTOR_OP, spec, degree, terms, density, variables),
    )


def rand_type(rng: random.Random, max_rank: int = 2) -> SpinTensorType:
    rank = rng.randint(0, max_rank)
    counts = [0] * 6
    for _ in range(rank):
        counts[rng.randrange(6)] += 1
    return SpinTensorType(*counts)
