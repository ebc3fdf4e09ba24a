"""Command-line verification runner.

    spintensor run --suite all --seed 0 --instances 5 --degree 1 [--spec FILE] [--output FILE]
    spintensor replay REPORT [--output FILE]
    spintensor mutants

Exit status: 0 when every check passes, 1 when any fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import report as rpt
from .algebra import ExprSyntaxError
from .bundle import CompositeBundleSpec, SpinTensorType
from .fixture import Fixture, FixtureError, format_fixture, parse_fixture, resolve_fixture
from .suites import SUITES, mutant_names, run_instance, run_suite, sort_records

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    suite: str = "all"
    seed: int = 0
    instances: int = 5
    degree: int = 1
    spec: str | None = None
    output: str | None = None
    mutate: list = field(default_factory=list)

    def validate(self) -> None:
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        if self.instances < 1:
            raise ConfigError(f"--instances must be at least 1, got {self.instances}")
        if self.degree < 0:
            raise ConfigError(f"--degree must be non-negative, got {self.degree}")
        known = set(mutant_names())
        for m in self.mutate:
            if m not in known:
                raise ConfigError(f"unknown mutant {m!r}; run 'spintensor mutants' for the list")


def load_spec(value: str) -> tuple:
    """(Fixture, fixture text) from a fixture path or an inline '(..);(..)' type list."""
    if value.lstrip().startswith("("):
        try:
            types = tuple(SpinTensorType.parse(t.strip()) for t in value.split(";") if t.strip())
        except ValueError as exc:
            raise ConfigError(f"bad --spec: {exc}") from None
        fx = Fixture(CompositeBundleSpec(types))
        return fx, format_fixture(fx)
    try:
        path = resolve_fixture(value)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from None
    text = path.read_text()
    try:
        return parse_fixture(text), text
    except (FixtureError, ExprSyntaxError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def run(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    cfg.validate()
    fx, text = (None, None) if cfg.spec is None else load_spec(cfg.spec)
    records = run_suite(cfg.suite, cfg.seed, cfg.instances, cfg.degree, fx, cfg.mutate)
    head = rpt.header("run", cfg.suite, cfg.seed, cfg.instances, cfg.degree, cfg.spec, text, cfg.mutate)
    _emit(head, records, cfg.output, out, err)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def replay(path: str, output: str | None = None, out=sys.stdout, err=sys.stderr) -> int:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        rep = rpt.loads(text)
    except rpt.ReportFormatError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    h = rep.header
    fx = None
    if h.get("fixture"):
        try:
            fx = parse_fixture(h["fixture"])
        except FixtureError as exc:
            raise ConfigError(f"{path}: embedded fixture: {exc}") from None
    mutate = list(h.get("mutate") or [])
    known = set(mutant_names())
    bad = [m for m in mutate if m not in known]
    if bad:
        raise ConfigError(f"{path}: unknown mutant {bad[0]!r}")
    records = []
    for suite, n, iseed in rpt.replay_plan(rep):
        if suite not in SUITES:
            raise ConfigError(f"{path}: unknown suite {suite!r}")
        records.extend(run_instance(suite, iseed, h["degree"], fx, n, mutate))
    records = sort_records(records)
    head = rpt.header("replay", h["suite"], h.get("seed"), h.get("instances"), h["degree"], h.get("spec"),
                      h.get("fixture"), mutate)
    _emit(head, records, output, out, err)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def _emit(head, records, output, out, err) -> None:
    text = rpt.dumps(head, records)
    if output in (None, "-"):
        out.write(text)
    else:
        Path(output).write_text(text)
    totals, fails = Counter(), Counter()
    for r in records:
        totals[r.result.check] += 1
        if not r.passed:
            fails[r.result.check] += 1
    for check in sorted(totals):
        status = "pass" if not fails[check] else "FAIL"
        err.write(f"{status}  {check:28s} {totals[check] - fails[check]}/{totals[check]}\n")
    for r in records:
        if not r.passed:
            res = r.result
            diff = res.diff if res.diff is None or len(res.diff) <= 160 else res.diff[:157] + "..."
            err.write(f"  first failure: {res.check} suite={r.suite} instance={r.instance} "
                      f"seed={r.instance_seed} index={res.index} diff={diff}\n")
            break


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spintensor", description="Exact identity checks for spin-tensor calculus.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run identity suites on seeded random instances")
    r.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, all")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--instances", type=int, default=5)
    r.add_argument("--degree", type=int, default=1)
    r.add_argument("--spec", help="fixture file (also looked up in $SPINTENSOR_FIXTURES) or '(a,b|c,d|m,n);...'")
    r.add_argument("--output", help="report path; '-' or omitted writes to stdout")
    r.add_argument("--mutate", action="append", default=[], metavar="NAME",
                   help="flip one sign for mutation testing (repeatable)")
    q = sub.add_parser("replay", help="regenerate and rerun the instances of a report")
    q.add_argument("report")
    q.add_argument("--output")
    sub.add_parser("mutants", help="list mutation names")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(args.suite, args.seed, args.instances, args.degree, args.spec, args.output,
                            [m for item in args.mutate for m in item.split(",") if m])
            return run(cfg)
        if args.command == "replay":
            return replay(args.report, args.output)
        print("\n".join(mutant_names()))
        return EXIT_OK
    except ConfigError as exc:
        print(f"spintensor: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
