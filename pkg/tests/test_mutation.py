import pytest

from spintensor import curvature, diffops
from spintensor.suites import instance_seed, mutant_names, mutated, run_instance

COMMUTATOR_SUITES = ("commutators-degenerate", "commutators-native", "commutators-covariant")

# mutants that the first few commutator instances already expose
QUICK = [
    "degenerate:2", "degenerate:5",
    "covariant-slot:2", "covariant-slot:3", "covariant-slot:4",
    "covariant-term:0", "covariant-term:1", "covariant-term:2",
    "torsion:0", "torsion:1", "torsion:2",
    "curvature-Abar:0",
]


def _killed(mutant, suites=COMMUTATOR_SUITES, instances=3, seed=0):
    for n in range(instances):
        for s in suites:
            recs = run_instance(s, instance_seed(s, seed, n), 1, None, n, [mutant])
            if any(not r.passed for r in recs):
                return True
    return False


def test_registry_names():
    names = mutant_names()
    assert len(names) == 6 + 6 + 3 + 3 + 3 * 9
    assert len(set(names)) == len(names)
    assert set(QUICK) <= set(names)


def test_mutated_restores_signs():
    before = (list(diffops._DEGENERATE_SIGNS), list(curvature._TORSION_SIGNS))
    with pytest.raises(RuntimeError):
        with mutated(["degenerate:1", "torsion:2"]):
            assert diffops._DEGENERATE_SIGNS[1] == -before[0][1]
            assert curvature._TORSION_SIGNS[2] == -before[1][2]
            raise RuntimeError
    assert (diffops._DEGENERATE_SIGNS, curvature._TORSION_SIGNS) == before


def test_unknown_mutant():
    with pytest.raises(ValueError):
        with mutated(["torsion:3"]):
            pass


def test_unmutated_instances_pass():
    for s in COMMUTATOR_SUITES:
        assert all(r.passed for r in run_instance(s, instance_seed(s, 0, 0), 1, None, 0))


@pytest.mark.parametrize("mutant", QUICK)
def test_mutant_killed(mutant):
    assert _killed(mutant)


def test_curvature_gamma_mutant_killed_by_extraction():
    recs = run_instance("curvature", instance_seed("curvature", 0, 1), 1, None, 1, ["curvature-Gamma:0"])
    assert any(r.result.check == "curvature-extraction-Gamma" and not r.passed for r in recs)
