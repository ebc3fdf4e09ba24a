import json
from pathlib import Path

import pytest

from spintensor import report as rpt
from spintensor.bundle import CompositeBundleSpec, SpinTensorType
from spintensor.fixture import Fixture, FixtureError, format_fixture, load_fixture, parse_fixture, save_fixture
from spintensor.generate import rand_connection, rand_frame, rand_transition
from spintensor.identities import CheckResult
from spintensor.suites import Record

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_shipped_fixture_round_trip():
    fx = load_fixture(str(FIXTURES / "j1.spec"))
    assert fx.spec.J == 1 and fx.upsilon is not None and fx.connection is not None
    text = format_fixture(fx)
    assert format_fixture(parse_fixture(text)) == text
    again = parse_fixture(text)
    assert again.connection == fx.connection and again.upsilon == fx.upsilon


def test_random_fixture_round_trip(rng, tmp_path):
    spec = CompositeBundleSpec((SpinTensorType(1, 0, 0, 0, 0, 0), SpinTensorType(0, 0, 0, 1, 0, 0)))
    fx = Fixture(spec, rand_frame(rng), rand_transition(rng), rand_connection(rng, spec))
    path = tmp_path / "r.spec"
    save_fixture(fx, path)
    back = load_fixture(str(path))
    assert (back.spec, back.upsilon, back.transition, back.connection) == (fx.spec, fx.upsilon, fx.transition,
                                                                            fx.connection)
    assert path.read_text() == format_fixture(back)


def test_fixture_version_rejected():
    with pytest.raises(FixtureError) as info:
        parse_fixture("spintensor-fixture 2\nJ 1\ntype (1,0|0,0|0,0)\n")
    assert "version" in str(info.value) and info.value.line == 1


@pytest.mark.parametrize("text,line,column", [
    ("spintensor-fixture 1\nJ 1\ntype (1,0|0,0)\n", 3, 6),
    ("spintensor-fixture 1\nJ 1\ntype (1,0|0,0|0,0)\n[connection]\nA 1 0 2 = (1,0)*y\n", 5, 17),
    ("spintensor-fixture 1\nJ 1\ntype (1,0|0,0|0,0)\n[connection]\nA 3 0 2 = 1\n", 5, 3),
    ("spintensor-fixture 1\nJ 1\ntype (1,0|0,0|0,0)\n[frame]\n", 4, 1),
])
def test_fixture_errors_locate(text, line, column):
    with pytest.raises(FixtureError) as info:
        parse_fixture(text)
    assert (info.value.line, info.value.column) == (line, column)


def _records():
    return [
        Record("theta", 0, 11, CheckResult("theta-forms", True), 0.5),
        Record("theta", 1, 12, CheckResult("theta-forms", False, (1, 0, 2), "x0"), 0.25),
    ]


def test_report_round_trip():
    head = rpt.header("run", "theta", 3, 2, 1, None, None, [])
    text = rpt.dumps(head, _records())
    lines = text.splitlines()
    assert json.loads(lines[-1]) == {"summary": {"total": 2, "passed": 1, "failed": 1}}
    rep = rpt.loads(text)
    assert rep.header == head
    assert [r["instance"] for r in rep.failing()] == [1]
    assert rpt.replay_plan(rep) == [("theta", 1, 12)]
    assert rep.failing()[0]["index"] == [1, 0, 2]


def test_replay_plan_all_when_green():
    recs = [r for r in _records() if r.passed]
    rep = rpt.loads(rpt.dumps(rpt.header("run", "theta", 0, 1, 1, None, None, []), recs))
    assert rpt.replay_plan(rep) == [("theta", 0, 11)]


def test_timings_optional():
    text = rpt.dumps(rpt.header("run", "theta", 0, 1, 1, None, None, []), _records(), timings=False)
    assert "seconds" not in text


@pytest.mark.parametrize("text", ["", "not json\n", '{"format": "other"}\n',
                                  '{"format": "spintensor-report", "version": 1, "suite": "x", "degree": 1, '
                                  '"mutate": []}\n{"suite": "x"}\n'])
def test_corrupt_reports(text):
    with pytest.raises(rpt.ReportFormatError):
        rpt.loads(text)


def test_stale_report():
    head = rpt.header("run", "theta", 0, 1, 1, None, None, [])
    head["version"] = 0
    with pytest.raises(rpt.StaleReportError):
        rpt.loads(json.dumps(head) + "\n")
