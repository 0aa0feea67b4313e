"""Table container and the text formats the command line tools emit."""

import csv
import io
import json
import math

import numpy as np
import pytest

from longrun.errors import ParameterError
from longrun.sweeps import (
    SCHEMA_VERSION,
    SweepTable,
    parse_grid,
    parse_int_list,
    write_csv,
    write_json,
)


def _table():
    return SweepTable(
        columns=["x", "value"],
        rows=[[0.1, 1.0 / 3.0], [1e-17, 123456.789012345]],
        meta={"command": "demo", "seed": 7},
    )


def test_row_width_validation():
    with pytest.raises(ParameterError):
        SweepTable(columns=["a", "b"], rows=[[1.0]], meta={})


def test_records():
    recs = _table().records()
    assert recs[0] == {"x": 0.1, "value": 1.0 / 3.0}
    assert len(recs) == 2


def test_csv_float_round_trip():
    buf = io.StringIO()
    write_csv(_table(), buf)
    lines = [ln for ln in buf.getvalue().splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    assert rows[0] == ["x", "value"]
    # shortest-repr floats must survive a parse round trip bit for bit
    assert float(rows[1][1]) == 1.0 / 3.0
    assert float(rows[2][0]) == 1e-17
    assert float(rows[2][1]) == 123456.789012345


def test_csv_quoting():
    table = SweepTable(
        columns=["a,b", "note"],
        rows=[[1.0, 'say "hi"']],
        meta={},
    )
    buf = io.StringIO()
    write_csv(table, buf)
    text = buf.getvalue()
    assert '"a,b"' in text
    assert '"say ""hi"""' in text
    # and the csv module reads it back intact
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    assert rows[0] == ["a,b", "note"]
    assert rows[1][1] == 'say "hi"'


def test_meta_header():
    table = SweepTable(
        columns=["x"],
        rows=[[1.0]],
        meta={"zeta": 2, "alpha": {"b": 1, "a": [1, 2]}},
    )
    buf = io.StringIO()
    write_csv(table, buf)
    header = [ln for ln in buf.getvalue().splitlines() if ln.startswith("#")]
    assert header[0] == f"# schema_version: {SCHEMA_VERSION}"
    # remaining keys sorted, nested values serialized with sorted keys too
    assert header[1] == '# alpha: {"a": [1, 2], "b": 1}'
    assert header[2] == "# zeta: 2"
    buf2 = io.StringIO()
    write_csv(table, buf2)
    assert buf.getvalue() == buf2.getvalue()


def test_csv_line_endings():
    buf = io.StringIO()
    write_csv(_table(), buf)
    text = buf.getvalue()
    assert "\r\n" in text
    assert text.endswith("\r\n")


def test_json_output():
    table = SweepTable(
        columns=["x", "y"],
        rows=[[float("nan"), 2.0], [float("inf"), float("-inf")]],
        meta={"seed": 7},
    )
    buf = io.StringIO()
    write_json(table, buf)
    doc = json.loads(buf.getvalue())
    assert doc["meta"]["schema_version"] == SCHEMA_VERSION
    assert doc["meta"]["seed"] == 7
    # JSON has no literal for non-finite floats, so they become null
    assert doc["records"][0]["x"] is None
    assert doc["records"][0]["y"] == 2.0
    assert doc["records"][1]["x"] is None
    assert doc["records"][1]["y"] is None


def test_numpy_values_coerce():
    table = SweepTable(
        columns=["n", "v"],
        rows=[[np.int64(3), np.float64(0.25)]],
        meta={},
    )
    buf = io.StringIO()
    write_json(table, buf)
    doc = json.loads(buf.getvalue())
    assert doc["records"][0] == {"n": 3, "v": 0.25}


def test_parse_grid():
    assert parse_grid("0.5") == [0.5]
    assert parse_grid("1,2,3.5") == [1.0, 2.0, 3.5]
    grid = parse_grid("0.1:0.9:5")
    assert len(grid) == 5
    assert grid[0] == 0.1 and grid[-1] == 0.9
    assert parse_grid("2.0:3.0:1") == [2.0]
    for bad in ("", "2:1:5", "0.1:0.9:0", "3,2", "1,1", "a,b", "1:2"):
        with pytest.raises(ParameterError):
            parse_grid(bad)


def test_parse_int_list():
    assert parse_int_list("2,5,10") == [2, 5, 10]
    assert parse_int_list("7") == [7]
    for bad in ("0,2", "5,3", "3,3", "1.5", ""):
        with pytest.raises(ParameterError):
            parse_int_list(bad)
