"""Machine-readable records: one JSON value per line, header first.

Every stream starts with a header object naming its ``kind``; the remaining
lines are JSON arrays (distribution and exceedance rows) or objects (paths,
reports, sweep rows).
"""

from __future__ import annotations

import hashlib
import json

from .model import serialize_pdag
from .response import RtDistribution


class RecordFormatError(ValueError):
    pass


def instance_hash(pdag) -> str:
    return hashlib.sha256(serialize_pdag(pdag).encode()).hexdigest()


def _line(value):
    return json.dumps(value, sort_keys=True, allow_nan=False)


def dump_records(header, rows) -> str:
    return "".join(_line(x) + "\n" for x in [header, *rows])


def distribution_records(dist, m, pdag, kind="distribution") -> str:
    header = {"kind": kind, "m": m, "total_mass": dist.total_mass, "instance": instance_hash(pdag),
              "columns": ["response_time", "probability_mass"]}
    return dump_records(header, ([r, p] for r, p in dist.points))


def exceedance_records(dist, m, pdag) -> str:
    header = {"kind": "exceedance", "m": m, "total_mass": dist.total_mass, "instance": instance_hash(pdag),
              "columns": ["response_time", "exceedance"]}
    return dump_records(header, ([r, e] for r, e in dist.exceedance_curve()))


def paths_records(entries, probs, pdag) -> str:
    header = {"kind": "paths", "m": entries[0].cores if entries else None, "instance": instance_hash(pdag),
              "total_mass": probs.total}
    rows = []
    for h, e in enumerate(entries):
        rows.append({
            "rank": h + 1,
            "nodes": list(e.path.nodes),
            "length": e.path.length,
            "branches": sorted([list(b) for b in e.path.branches]),
            "probability": e.probability,
            "interference": e.interference,
            "response": e.response,
            "clamped": probs.clamped(h),
        })
    return dump_records(header, rows)


def parse_records(text):
    """Split a record stream into (header, rows); raises RecordFormatError on malformed input."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise RecordFormatError("empty record stream")
    try:
        values = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise RecordFormatError(f"bad record line: {exc}") from exc
    header, rows = values[0], values[1:]
    if not isinstance(header, dict) or "kind" not in header:
        raise RecordFormatError("first record must be a header with a 'kind'")
    return header, rows


def parse_distribution(text):
    """Header and RtDistribution from ``distribution_records`` output."""
    header, rows = parse_records(text)
    if header["kind"] not in ("distribution", "oracle"):
        raise RecordFormatError(f"not a distribution stream: {header['kind']!r}")
    for row in rows:
        if not (isinstance(row, list) and len(row) == 2 and all(isinstance(x, (int, float)) for x in row)):
            raise RecordFormatError(f"bad distribution row {row!r}")
    return header, RtDistribution(tuple((float(r), float(p)) for r, p in rows))
