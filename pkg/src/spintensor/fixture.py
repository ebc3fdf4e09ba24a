"""Versioned text fixtures: bundle spec, frame chart, connection.

Layout::

    spintensor-fixture 1
    J 1
    type (1,0|0,0|0,0)
    [upsilon]
    <4 rows, entries separated by ' | '>
    [transition]
    <2 rows>
    [connection]
    A 1 0 2 = <expr>
    ...

Only the header, ``J`` and ``type`` lines are mandatory.  Blank lines and
lines starting with ``#`` are ignored.  Formatting a parsed canonical file
reproduces it byte for byte.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .algebra import ExprSyntaxError, Matrix, format_expr, format_matrix, parse_expr
from .bundle import CompositeBundleSpec, FrameChart, SpinTensorType
from .diffops import Connection
from .spingroup import SPINOR, VECTOR

MAGIC = "spintensor-fixture"
VERSION = 1
ENV_DIR = "SPINTENSOR_FIXTURES"

_FAMILIES = ("A", "Abar", "Gamma")


class FixtureError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass
class Fixture:
    spec: CompositeBundleSpec
    upsilon: Matrix | None = None
    transition: Matrix | None = None
    connection: Connection | None = None

    def chart(self) -> FrameChart | None:
        if self.upsilon is None and self.transition is None:
            return None
        ups = self.upsilon if self.upsilon is not None else Matrix.identity(VECTOR)
        return FrameChart(ups, self.transition)


def format_fixture(fx: Fixture) -> str:
    out = [f"{MAGIC} {VERSION}", f"J {fx.spec.J}"]
    out += [f"type {t}" for t in fx.spec.types]
    if fx.upsilon is not None:
        out += ["[upsilon]", format_matrix(fx.upsilon)]
    if fx.transition is not None:
        out += ["[transition]", format_matrix(fx.transition)]
    if fx.connection is not None:
        out.append("[connection]")
        for name, fam in fx.connection.families().items():
            for (k, j, i), e in sorted(fam.items()):
                if e:
                    out.append(f"{name} {k} {j} {i} = {format_expr(e)}")
    return "\n".join(out) + "\n"


def parse_fixture(text: str) -> Fixture:
    lines = text.splitlines()
    body = [(n + 1, ln) for n, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise FixtureError("empty fixture")
    n0, head = body[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != MAGIC:
        raise FixtureError(f"expected header '{MAGIC} {VERSION}'", n0, 1)
    if parts[1] != str(VERSION):
        raise FixtureError(f"unsupported fixture format version {parts[1]} (expected {VERSION})", n0,
                           head.index(parts[1]) + 1)

    pos = 1
    if pos >= len(body) or not body[pos][1].startswith("J "):
        raise FixtureError("expected 'J <count>'", body[pos][0] if pos < len(body) else None)
    nJ, ln = body[pos]
    try:
        J = int(ln[2:].strip())
    except ValueError:
        raise FixtureError("J must be an integer", nJ, 3) from None
    if J < 1:
        raise FixtureError("J must be at least 1", nJ, 3)
    pos += 1
    types = []
    for _ in range(J):
        if pos >= len(body) or not body[pos][1].startswith("type "):
            raise FixtureError(f"expected {J} 'type' lines", body[pos][0] if pos < len(body) else None)
        nt, ln = body[pos]
        try:
            types.append(SpinTensorType.parse(ln[5:].strip()))
        except ValueError as exc:
            raise FixtureError(str(exc), nt, 6) from None
        pos += 1
    spec = CompositeBundleSpec(tuple(types))

    sections: dict = {}
    current = None
    for n, ln in body[pos:]:
        s = ln.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1]
            if current not in ("upsilon", "transition", "connection"):
                raise FixtureError(f"unknown section [{current}]", n, 1)
            if current in sections:
                raise FixtureError(f"duplicate section [{current}]", n, 1)
            sections[current] = []
            continue
        if current is None:
            raise FixtureError("content outside a section", n, 1)
        sections[current].append((n, ln))

    fx = Fixture(spec)
    if "upsilon" in sections:
        fx.upsilon = _matrix(sections["upsilon"], VECTOR)
    if "transition" in sections:
        fx.transition = _matrix(sections["transition"], SPINOR)
    if "connection" in sections:
        fx.connection = _connection(spec, sections["connection"])
    return fx


def _matrix(rows: list, indices: tuple) -> Matrix:
    if len(rows) != len(indices):
        raise FixtureError(f"expected {len(indices)} matrix rows, got {len(rows)}", rows[0][0] if rows else None)
    out = []
    for n, ln in rows:
        cells = ln.split("|")
        if len(cells) != len(indices):
            raise FixtureError(f"expected {len(indices)} entries per row, got {len(cells)}", n, 1)
        row = []
        offset = 0
        for cell in cells:
            try:
                row.append(parse_expr(cell, line=n))
            except ExprSyntaxError as exc:
                raise FixtureError(str(exc).split(": ", 1)[1], n, offset + exc.column) from None
            offset += len(cell) + 1
        out.append(row)
    return Matrix(out, indices)


def _connection(spec: CompositeBundleSpec, rows: list) -> Connection:
    fams = {name: {} for name in _FAMILIES}
    for n, ln in rows:
        lhs, sep, rhs = ln.partition("=")
        if not sep:
            raise FixtureError("expected '<family> k j i = <expr>'", n, 1)
        head = lhs.split()
        if len(head) != 4 or head[0] not in fams:
            raise FixtureError(f"bad connection entry '{lhs.strip()}'", n, 1)
        try:
            key = tuple(int(t) for t in head[1:])
        except ValueError:
            raise FixtureError("connection indices must be integers", n, len(head[0]) + 2) from None
        ind = VECTOR if head[0] == "Gamma" else SPINOR
        if key[0] not in ind or key[2] not in ind or key[1] not in VECTOR:
            raise FixtureError(f"index {key} out of range for {head[0]}", n, len(head[0]) + 2)
        if key in fams[head[0]]:
            raise FixtureError(f"duplicate entry {head[0]} {key}", n, 1)
        try:
            fams[head[0]][key] = parse_expr(rhs, line=n)
        except ExprSyntaxError as exc:
            raise FixtureError(str(exc).split(": ", 1)[1], n, len(lhs) + 1 + exc.column) from None
    return Connection(spec, fams["A"], fams["Abar"], fams["Gamma"])


def fixture_dir() -> Path:
    return Path(os.environ.get(ENV_DIR, "fixtures"))


def resolve_fixture(path: str) -> Path:
    """A path as given, else relative to the fixture directory."""
    p = Path(path)
    if p.exists():
        return p
    q = fixture_dir() / path
    if q.exists():
        return q
    raise FileNotFoundError(f"fixture not found: {path} (also looked in {fixture_dir()})")


def load_fixture(path: str) -> Fixture:
    return parse_fixture(resolve_fixture(path).read_text())


def save_fixture(fx: Fixture, path) -> None:
    Path(path).write_text(format_fixture(fx))
