"""Line-delimited JSON reports: a header line, one record per check, a summary."""

from __future__ import annotations

import json
from dataclasses import dataclass

MAGIC = "spintensor-report"
VERSION = 1


class ReportFormatError(ValueError):
    pass


class StaleReportError(ReportFormatError):
    pass


def header(command: str, suite: str, seed: int | None, instances: int | None, degree: int,
           spec: str | None, fixture_text: str | None, mutate) -> dict:
    return {
        "format": MAGIC,
        "version": VERSION,
        "command": command,
        "suite": suite,
        "seed": seed,
        "instances": instances,
        "degree": degree,
        "spec": spec,
        "fixture": fixture_text,
        "mutate": list(mutate),
    }


def summary(records) -> dict:
    failed = sum(1 for r in records if not r.passed)
    return {"summary": {"total": len(records), "passed": len(records) - failed, "failed": failed}}


def dumps(head: dict, records, timings: bool = True) -> str:
    lines = [json.dumps(head, sort_keys=True)]
    lines += [json.dumps(r.as_dict(timings), sort_keys=True) for r in records]
    lines.append(json.dumps(summary(records), sort_keys=True))
    return "\n".join(lines) + "\n"


@dataclass
class LoadedReport:
    header: dict
    records: list  # plain dicts
    summary: dict | None

    def failing(self) -> list:
        return [r for r in self.records if not r.get("passed")]


_REQUIRED = ("suite", "instance", "instance_seed", "check", "passed")


def loads(text: str) -> LoadedReport:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ReportFormatError("empty report")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"line 1: header is not valid JSON ({exc.msg})") from None
    if not isinstance(head, dict) or head.get("format") != MAGIC:
        raise ReportFormatError(f"line 1: not a {MAGIC} header")
    if head.get("version") != VERSION:
        raise StaleReportError(f"stale report format version {head.get('version')!r} (this build reads {VERSION})")
    for key in ("suite", "degree", "mutate"):
        if key not in head:
            raise ReportFormatError(f"line 1: header lacks {key!r}")
    records, summ = [], None
    for n, ln in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise ReportFormatError(f"line {n}: not valid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise ReportFormatError(f"line {n}: expected an object")
        if "summary" in obj:
            summ = obj["summary"]
            continue
        missing = [k for k in _REQUIRED if k not in obj]
        if missing:
            raise ReportFormatError(f"line {n}: record lacks {', '.join(missing)}")
        records.append(obj)
    return LoadedReport(head, records, summ)


def replay_plan(rep: LoadedReport) -> list:
    """(suite, instance, instance_seed) triples to rerun: the failing ones, else all."""
    pool = rep.failing() or rep.records
    seen = []
    for r in pool:
        key = (r["suite"], r["instance"], r["instance_seed"])
        if key not in seen:
            seen.append(key)
    return seen
