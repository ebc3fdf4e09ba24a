import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from spintensor import report as rpt
from spintensor.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, ConfigError, RunConfig, main, replay, run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _run(cfg):
    out, err = io.StringIO(), io.StringIO()
    code = run(cfg, out, err)
    return code, out.getvalue(), err.getvalue()


def _strip_timings(text):
    out = []
    for ln in text.splitlines():
        obj = json.loads(ln)
        obj.pop("seconds", None)
        out.append(obj)
    return out


def test_run_passes_and_reports():
    code, out, err = _run(RunConfig("homomorphism", seed=7, instances=4))
    assert code == EXIT_OK
    rep = rpt.loads(out)
    assert rep.summary == {"total": 20, "passed": 20, "failed": 0}
    assert "pass  phi-lorentz" in err


def test_run_is_deterministic():
    a = _run(RunConfig("theta", seed=3, instances=2))[1]
    b = _run(RunConfig("theta", seed=3, instances=2))[1]
    assert _strip_timings(a) == _strip_timings(b)


@pytest.mark.parametrize("cfg", [
    RunConfig(instances=0),
    RunConfig(degree=-1),
    RunConfig(suite="nope"),
    RunConfig(mutate=["torsion:9"]),
    RunConfig(spec="does-not-exist.spec"),
    RunConfig(spec="(1,0|0,0)"),
])
def test_config_errors(cfg):
    with pytest.raises(ConfigError):
        run(cfg, io.StringIO(), io.StringIO())


def test_main_exit_codes(capsys):
    assert main(["run", "--suite", "homomorphism", "--instances", "0"]) == EXIT_CONFIG
    assert "at least 1" in capsys.readouterr().err
    assert main(["mutants"]) == EXIT_OK
    assert "torsion:0" in capsys.readouterr().out.split()


def test_argparse_rejects_non_integer():
    with pytest.raises(SystemExit) as info:
        main(["run", "--seed", "x"])
    assert info.value.code == 2


def test_inline_spec():
    code, out, _ = _run(RunConfig("commutators-native", instances=1, spec="(1,0|0,0|0,0);(0,0|0,1|0,0)"))
    assert code == EXIT_OK
    assert rpt.loads(out).header["fixture"].startswith("spintensor-fixture 1")


def test_fixture_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("SPINTENSOR_FIXTURES", str(FIXTURES))
    monkeypatch.chdir(tmp_path)
    code, out, _ = _run(RunConfig("commutators-covariant", seed=3, instances=1, spec="j1.spec"))
    assert code == EXIT_OK
    assert len(rpt.loads(out).records) == 4


def test_mutant_fails_and_replays(tmp_path):
    path = tmp_path / "r.jsonl"
    code, _, err = _run(RunConfig("commutators-covariant", seed=0, instances=2, output=str(path),
                                  mutate=["torsion:1"]))
    assert code == EXIT_FAIL and "first failure" in err
    first = rpt.loads(path.read_text())
    out2 = tmp_path / "again.jsonl"
    code2 = replay(str(path), str(out2), io.StringIO(), io.StringIO())
    assert code2 == EXIT_FAIL
    again = rpt.loads(out2.read_text())
    key = lambda r: (r["suite"], r["instance"], r["check"], tuple(r["index"] or ()))
    assert {key(r) for r in again.failing()} == {key(r) for r in first.failing()}
    assert again.header["command"] == "replay" and again.header["mutate"] == ["torsion:1"]


def test_replay_bad_file(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("garbage\n")
    with pytest.raises(ConfigError):
        replay(str(bad), None, io.StringIO(), io.StringIO())
    with pytest.raises(ConfigError):
        replay(str(tmp_path / "missing.jsonl"), None, io.StringIO(), io.StringIO())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spintensor", "run", "--suite", "homomorphism",
                           "--instances", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert rpt.loads(proc.stdout).summary["failed"] == 0
