"""Pattern text files, family JSON and content hashes."""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

from ..constructions import Family
from ..tensor import Tensor01, TensorError, make_tensor

SCHEMA_VERSION = 1


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def _ints(line: str, line_no: int, start: int = 0) -> list[tuple[int, int]]:
    """Integers of ``line[start:]`` with their 1-based columns."""
    out = []
    for m in re.finditer(r"\S+", line[start:]):
        col = start + m.start() + 1
        try:
            out.append((int(m.group()), col))
        except ValueError:
            raise FormatError(f"expected an integer, got {m.group()!r}", line_no, col) from None
    return out


def parse_pattern(text: str) -> Tensor01:
    """Parse ``dims: <ints>`` / ``ones:`` / one coordinate line per 1-entry.

    Blank lines are ignored.
    """
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise FormatError("empty input", 1, 1)
    no, ln = lines[0]
    head, sep, _ = ln.partition(":")
    if head.strip() != "dims" or not sep:
        raise FormatError("expected 'dims:' header", no, 1)
    header = _ints(ln, no, len(head) + 1)
    if not header:
        raise FormatError("no side lengths given", no, len(ln) + 1)
    for k, col in header:
        if k < 1:
            raise FormatError("side lengths must be positive", no, col)
    dims = [k for k, _ in header]
    if len(lines) < 2 or lines[1][1].strip() != "ones:":
        no2 = lines[1][0] if len(lines) > 1 else no + 1
        raise FormatError("expected 'ones:' line", no2, 1)
    ones = []
    seen = set()
    for no, ln in lines[2:]:
        vals = _ints(ln, no)
        if len(vals) != len(dims):
            raise FormatError(f"expected {len(dims)} coordinates, got {len(vals)}", no, 1)
        for a, ((x, col), n) in enumerate(zip(vals, dims)):
            if not 1 <= x <= n:
                raise FormatError(f"coordinate {x} outside 1..{n} in dimension {a + 1}", no, col)
        c = tuple(x for x, _ in vals)
        if c in seen:
            raise FormatError(f"duplicate coordinate {c}", no, 1)
        seen.add(c)
        ones.append(c)
    return make_tensor(dims, ones)


def serialize_pattern(t: Tensor01) -> str:
    lines = ["dims: " + " ".join(map(str, t.dims)), "ones:"]
    lines += [" ".join(map(str, c)) for c in t.ones()]
    return "\n".join(lines) + "\n"


def pattern_to_dict(t: Tensor01) -> dict:
    return {"dims": list(t.dims), "ones": [list(c) for c in t.ones()]}


def pattern_from_dict(obj) -> Tensor01:
    try:
        dims = [int(x) for x in obj["dims"]]
        ones = [tuple(int(x) for x in c) for c in obj["ones"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed pattern object: {exc}") from None
    try:
        return make_tensor(dims, ones)
    except TensorError as exc:
        raise FormatError(str(exc)) from None


def family_to_dict(fam: Family) -> dict:
    return {"d": fam.d, "patterns": [pattern_to_dict(p) for p in fam]}


def family_from_dict(obj) -> Family:
    if not isinstance(obj, dict) or "patterns" not in obj:
        raise FormatError("family JSON needs a 'patterns' list")
    pats = [pattern_from_dict(p) for p in obj["patterns"]]
    if not pats:
        raise FormatError("family is empty")
    if "d" in obj and any(p.d != obj["d"] for p in pats):
        raise FormatError(f"pattern dimensionality differs from d={obj['d']}")
    try:
        return Family(pats)
    except TensorError as exc:
        raise FormatError(str(exc)) from None


def serialize_family(fam: Family) -> str:
    return json.dumps(family_to_dict(fam), sort_keys=True) + "\n"


def parse_family(text: str) -> Family:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None
    return family_from_dict(obj)


def family_hash(fam: Family) -> str:
    """Content hash of the canonical family JSON, so renamed files still match."""
    blob = json.dumps(family_to_dict(fam), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_family(path: str | Path) -> Family:
    """Read a family from JSON, or a single pattern from the text format."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return parse_family(text)
    return Family([parse_pattern(text)])


def load_pattern(path: str | Path) -> Tensor01:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        if "patterns" in obj:
            fam = family_from_dict(obj)
            if len(fam) != 1:
                raise FormatError("expected a single pattern, got a family")
            return fam[0]
        return pattern_from_dict(obj)
    return parse_pattern(text)
