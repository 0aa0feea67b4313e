"""Result tables with provenance headers.

Every command returns a SweepTable: an ordered set of columns, rows of
plain Python scalars, and a metadata dict that records exactly how the
table was produced (command, parameters, seed, jobs, backend, package
version, schema version).  Serialization is deterministic so a rerun
with the same config is bit-identical; in particular no timestamps.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

SCHEMA_VERSION = 1


@dataclass
class SweepTable:
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ParameterError(
                    f"row width {len(r)} != {len(self.columns)} columns"
                )

    def records(self):
        return [dict(zip(self.columns, row)) for row in self.rows]


def _fmt(v):
    # shortest round-trip formatting for floats, plain str otherwise
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if isinstance(v, (np.bool_,)):
        return str(bool(v))
    return str(v)


def _meta_lines(meta):
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    for key in sorted(meta):
        val = meta[key]
        if isinstance(val, (dict, list, tuple)):
            val = json.dumps(val, sort_keys=True)
        lines.append(f"# {key}: {val}")
    return lines


def write_csv(table, stream):
    """RFC-4180 body preceded by '#'-prefixed provenance lines."""
    for line in _meta_lines(table.meta):
        stream.write(line + "\r\n")
    w = csv.writer(stream, lineterminator="\r\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_json(table, stream):
    doc = {
        "meta": dict(table.meta, schema_version=SCHEMA_VERSION),
        "records": [
            {c: _jsonable(v) for c, v in zip(table.columns, row)}
            for row in table.rows
        ],
    }
    json.dump(doc, stream, indent=1, sort_keys=True)
    stream.write("\n")


def parse_grid(text):
    """Parse a numeric grid: 'start:stop:count', a comma list, or a scalar.

    Returns a non-empty ascending list of floats; anything else raises
    ParameterError (the CLI maps that to a usage error).
    """
    text = text.strip()
    if not text:
        raise ParameterError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid must be start:stop:count, got {text!r}")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError as exc:
            raise ParameterError(f"bad grid {text!r}") from exc
        if count < 1:
            raise ParameterError(f"grid count must be >= 1, got {count}")
        if count > 1 and not stop > start:
            raise ParameterError(f"grid needs stop > start, got {text!r}")
        return [float(x) for x in np.linspace(start, stop, count)]
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad grid {text!r}") from exc
    if not vals:
        raise ParameterError("empty grid")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ParameterError(f"grid must be strictly increasing, got {text!r}")
    return vals


def parse_int_list(text):
    """Comma list of strictly increasing positive integers."""
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad integer list {text!r}") from exc
    if not vals:
        raise ParameterError("empty integer list")
    if any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ParameterError(f"need strictly increasing positive integers, got {text!r}")
    return vals
