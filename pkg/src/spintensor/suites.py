"""Identity suites over seeded random instances, and the sign-mutation registry.

An instance is fully determined by (suite, instance seed, degree, fixture),
so any record in a report can be regenerated exactly.
"""

from __future__ import annotations

import contextlib
import hashlib
import random
import time
from dataclasses import dataclass, field

from . import curvature as _curv
from . import diffops as _diff
from .algebra import GaussianRational, Matrix
from .bundle import (
    VECTOR_FIELD,
    CompositeBundleSpec,
    ExtendedField,
    FrameChart,
    SpinTensorType,
    frame_commutator_residual,
    structure_constants,
    theta_params,
    theta_params_tilde,
    theta_tilde_from_untilde,
)
from .curvature import curvature_components
from .diffops import Connection
from .fixture import Fixture
from .generate import (
    rand_chart,
    rand_connection,
    rand_field,
    rand_frame,
    rand_gaussian,
    rand_transition,
    rand_triple,
    rand_type,
    rand_unimodular,
)
from .identities import (
    CheckResult,
    check_antisymmetry,
    check_covariant_degenerate,
    check_covariant_native,
    check_covariant_pair,
    check_covariant_pair_tilde,
    check_curvature_extraction,
    check_degenerate_commutator,
    check_dynamic_bilinear,
    check_native_degenerate,
    check_native_pair,
    check_naturality,
    compare,
)
from .spingroup import lorentz_violations, sl2_inverse, varphi

SUITES = (
    "homomorphism",
    "transforms",
    "theta",
    "commutators-degenerate",
    "commutators-native",
    "commutators-covariant",
    "curvature",
)


@dataclass
class Record:
    suite: str
    instance: int
    instance_seed: int
    result: CheckResult
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.result.passed

    def as_dict(self, timings: bool = True) -> dict:
        d = {"suite": self.suite, "instance": self.instance, "instance_seed": self.instance_seed}
        d.update(self.result.as_dict())
        d.update(self.extra)
        if timings:
            d["seconds"] = round(self.seconds, 6)
        return d


def instance_seed(suite: str, seed: int, n: int) -> int:
    h = hashlib.sha256(f"{suite}:{seed}:{n}".encode()).digest()
    return int.from_bytes(h[:4], "big")


# ---------------------------------------------------------------------------
# Mutation registry: each mutant flips one sign in a module-level table.

def _sign_tables() -> dict:
    return {
        "degenerate": (_diff._DEGENERATE_SIGNS, 6),
        "covariant-slot": (_diff._CONNECTION_SLOT_SIGNS, 6),
        "covariant-term": (_diff._COVARIANT_TERM_SIGNS, 3),
        "torsion": (_curv._TORSION_SIGNS, 3),
        "curvature-A": (_curv._CURVATURE_SIGNS["A"], 9),
        "curvature-Abar": (_curv._CURVATURE_SIGNS["Abar"], 9),
        "curvature-Gamma": (_curv._CURVATURE_SIGNS["Gamma"], 9),
    }


def mutant_names() -> list:
    return [f"{name}:{k}" for name, (_, n) in _sign_tables().items() for k in range(n)]


def _lookup(mutant: str):
    name, _, k = mutant.partition(":")
    tables = _sign_tables()
    if name not in tables or not k.isdigit() or int(k) >= tables[name][1]:
        raise ValueError(f"unknown mutant {mutant!r}; see 'spintensor mutants'")
    return tables[name][0], int(k)


@contextlib.contextmanager
def mutated(mutants):
    """Temporarily flip the named signs."""
    flipped = [_lookup(m) for m in mutants]
    for table, k in flipped:
        table[k] = -table[k]
    try:
        yield
    finally:
        for table, k in reversed(flipped):
            table[k] = -table[k]


# ---------------------------------------------------------------------------
# Instance helpers

def _nonzero_field(rng, stype, spec, degree, terms=2):
    while True:
        X = rand_field(rng, stype, spec, degree, terms, density=0.8)
        if not X.is_zero() or stype.size == 0:
            return X


def _slot_type(rng) -> SpinTensorType:
    return rand_type(rng, 1) if rng.random() < 0.2 else _rank_exactly(rng, 1)


def _rank_exactly(rng, r) -> SpinTensorType:
    while True:
        t = rand_type(rng, r)
        if t.rank == r:
            return t


def _spec(rng, fx: Fixture | None, max_J: int) -> CompositeBundleSpec:
    if fx is not None:
        return fx.spec
    return CompositeBundleSpec(tuple(_rank_exactly(rng, 1) for _ in range(rng.randint(1, max_J))))


def _chart(rng, fx: Fixture | None, degree: int, transition: bool = False) -> FrameChart:
    if fx is not None and fx.chart() is not None and (fx.transition is not None or not transition):
        return fx.chart()
    return rand_chart(rng, max(degree, 1), transition=transition)


def _connection(rng, fx: Fixture | None, spec, degree: int) -> Connection:
    if fx is not None and fx.connection is not None:
        return fx.connection
    return rand_connection(rng, spec, degree)


def _test_type(rng, spec: CompositeBundleSpec, budget: int = 2) -> SpinTensorType:
    """Test-field type with rank between 1 and budget minus the largest slot rank."""
    room = max(1, budget - max(t.rank for t in spec.types))
    return _rank_exactly(rng, rng.randint(1, room))


# ---------------------------------------------------------------------------
# Suites.  Each takes (rng, degree, fixture) and returns CheckResults.

def _homomorphism(rng, degree, fx):
    A, B = rand_unimodular(rng), rand_unimodular(rng)
    SA = varphi(A)
    out = []
    bad = lorentz_violations(SA)
    out.append(CheckResult("phi-lorentz", not bad, diff=", ".join(bad) or None))
    out.append(CheckResult("phi-sign", SA == varphi(-A)))
    out.append(CheckResult("phi-homomorphism", varphi(A @ B) == SA @ varphi(B)))
    out.append(CheckResult("phi-inverse", varphi(sl2_inverse(A)) @ SA == Matrix.identity(SA.indices)))
    distinct = B != A and B != -A
    out.append(CheckResult("phi-injective-mod-sign", (not distinct) or varphi(B) != SA))
    return out


def _transforms(rng, degree, fx):
    spec = _spec(rng, fx, 1)
    F = _chart(rng, fx, degree, transition=True)
    out = []
    bad = lorentz_violations(F.S)
    out.append(CheckResult("transition-lorentz", not bad, diff=", ".join(bad) or None))
    X = _nonzero_field(rng, _test_type(rng, spec), spec, degree)
    out.append(compare("frame-roundtrip", F.from_tilde(F.to_tilde(X)), X))
    res = frame_commutator_residual(F, structure_constants(F))
    badk = next((k for k in sorted(res) if not res[k].is_zero()), None)
    out.append(CheckResult("structure-constants", badk is None, badk, None if badk is None else str(res[badk])))
    C = _connection(rng, fx, spec, min(degree, 1))
    Y = _nonzero_field(rng, _rank_exactly(rng, 1), spec, min(degree, 1))
    out.append(check_naturality(C, F, Y))
    return out


def _theta(rng, degree, fx):
    F = _chart(rng, fx, degree, transition=True)
    t1, v1 = theta_params(F, 1)
    t2, v2 = theta_params(F, 2)
    tt, vt = theta_params_tilde(F)
    tu, vu = theta_tilde_from_untilde(F)
    return [
        _dict_check("theta-forms", t1, t2),
        _dict_check("vartheta-forms", v1, v2),
        _dict_check("theta-transport", tt, tu),
        _dict_check("vartheta-transport", vt, vu),
    ]


def _dict_check(cid, a, b):
    k = next((k for k in sorted(a) if not (a[k] - b[k]).is_zero()), None)
    return CheckResult(cid, k is None, k, None if k is None else str(a[k] - b[k]))


def _commutators_degenerate(rng, degree, fx):
    spec = _spec(rng, fx, 2)
    D1 = rand_triple(rng, spec, degree)
    D2 = rand_triple(rng, spec, degree)
    Z = _nonzero_field(rng, _test_type(rng, spec), spec, degree)
    return [check_degenerate_commutator(D1, D2, Z)]


def _commutators_native(rng, degree, fx):
    spec = _spec(rng, fx, 2)
    P = rng.randint(1, spec.J)
    Q = rng.randint(1, spec.J)
    tP, tQ = spec.type_of(P), spec.type_of(Q)
    X = _nonzero_field(rng, tP, spec, degree)
    Xb = _nonzero_field(rng, tP.swapped(), spec, degree)
    Y = _nonzero_field(rng, tQ, spec, degree)
    Yb = _nonzero_field(rng, tQ.swapped(), spec, degree)
    D = rand_triple(rng, spec, degree)
    Z = _nonzero_field(rng, _test_type(rng, spec), spec, degree)
    return [
        check_native_degenerate(spec, P, X, D, Z),
        check_native_degenerate(spec, P, Xb, D, Z, barred=True),
        check_native_pair(spec, P, X, Q, Y, Z),
        check_native_pair(spec, P, X, Q, Yb, Z, bar_y=True),
        check_native_pair(spec, P, Xb, Q, Y, Z, bar_x=True),
        check_native_pair(spec, P, Xb, Q, Yb, Z, bar_x=True, bar_y=True),
    ]


def _covariant_setup(rng, degree, fx, max_J=1):
    spec = _spec(rng, fx, max_J)
    F = _chart(rng, fx, degree)
    C = _connection(rng, fx, spec, degree)
    return spec, F, C


def _commutators_covariant(rng, degree, fx):
    spec, F, C = _covariant_setup(rng, degree, fx)
    c = structure_constants(F)
    P = rng.randint(1, spec.J)
    tP = spec.type_of(P)
    X = _nonzero_field(rng, VECTOR_FIELD, spec, degree)
    Y = _nonzero_field(rng, VECTOR_FIELD, spec, degree)
    Yp = _nonzero_field(rng, tP, spec, degree)
    Yb = _nonzero_field(rng, tP.swapped(), spec, degree)
    D = rand_triple(rng, spec, degree)
    Z = _nonzero_field(rng, _test_type(rng, spec), spec, degree)
    return [
        check_covariant_degenerate(C, F, X, D, Z),
        check_covariant_native(C, F, X, P, Yp, Z),
        check_covariant_native(C, F, X, P, Yb, Z, barred=True),
        check_covariant_pair(C, F, X, Y, Z, c=c),
    ]


def _curvature(rng, degree, fx, tilde: bool = False):
    spec, F, C = _covariant_setup(rng, degree, fx)
    c = structure_constants(F)
    R = curvature_components(C, F, c)
    out = check_curvature_extraction(C, F, R, c) + check_antisymmetry(C, F, R, c)
    P = rng.randint(1, spec.J)
    tP = spec.type_of(P)
    X1, X2 = (_nonzero_field(rng, VECTOR_FIELD, spec, degree) for _ in range(2))
    Y1, Y2 = (_nonzero_field(rng, tP, spec, degree) for _ in range(2))
    Z1, Z2 = (_nonzero_field(rng, tP.swapped(), spec, degree) for _ in range(2))
    a = rand_gaussian(rng, 3, nonzero=True)
    out.append(check_dynamic_bilinear(C, P, X1, X2, Y1, Y2, a))
    out.append(check_dynamic_bilinear(C, P, X1, X2, Z1, Z2, a, barred=True))
    if tilde:
        # one transition-equipped instance per run, kept light: degree 1 frame
        # and transition, rank-1 test field
        Ft = FrameChart(rand_frame(rng, 1, terms=1, entries=2), rand_transition(rng, 1, terms=1))
        Ct = rand_connection(rng, spec, 1, terms=1, density=0.3)
        X, Y = (_nonzero_field(rng, VECTOR_FIELD, spec, 1, terms=1) for _ in range(2))
        Z = _nonzero_field(rng, _rank_exactly(rng, 1), spec, 1, terms=1)
        out.append(check_covariant_pair_tilde(Ct, Ft, X, Y, Z))
    return out


_RUNNERS = {
    "homomorphism": _homomorphism,
    "transforms": _transforms,
    "theta": _theta,
    "commutators-degenerate": _commutators_degenerate,
    "commutators-native": _commutators_native,
    "commutators-covariant": _commutators_covariant,
    "curvature": _curvature,
}


def run_instance(suite: str, iseed: int, degree: int, fx: Fixture | None = None, instance: int = 0,
                 mutants=()) -> list:
    """Records for one instance; the curvature suite's instance 0 adds the chart-change check."""
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}")
    rng = random.Random(iseed)
    kwargs = {"tilde": True} if suite == "curvature" and instance == 0 else {}
    t0 = time.perf_counter()
    with mutated(mutants):
        results = _RUNNERS[suite](rng, degree, fx, **kwargs)
    dt = time.perf_counter() - t0
    return [Record(suite, instance, iseed, r, dt / max(len(results), 1)) for r in results]


def run_suite(suite: str, seed: int, instances: int, degree: int, fx: Fixture | None = None,
              mutants=()) -> list:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        for n in range(instances):
            out.extend(run_instance(name, instance_seed(name, seed, n), degree, fx, n, mutants))
    return sort_records(out)


def sort_records(records: list) -> list:
    return sorted(records, key=lambda r: (r.result.check, r.suite, r.instance))


__all__ = [
    "SUITES",
    "Record",
    "instance_seed",
    "mutant_names",
    "mutated",
    "run_instance",
    "run_suite",
    "sort_records",
    "GaussianRational",
    "ExtendedField",
]
