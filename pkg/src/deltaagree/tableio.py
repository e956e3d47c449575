"""Reading count tables from CSV and JSON files.

CSV: K rows of K comma-separated non-negative numbers.  A header row is
detected when its fields are not all numeric, and a leading label column
when every data row starts with a non-numeric field.  JSON: ``{"cells":
[[...], ...]}``.  Errors carry the 1-based line and column of the offending
value.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .core import ContingencyTable, InvalidTableError


class TableParseError(InvalidTableError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = "<input>"):
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _check_count(value: float, line, column, source):
    if not math.isfinite(value):
        raise TableParseError(f"count {value!r} is not finite", line, column, source)
    if value < 0:
        raise TableParseError(f"negative count {value!r}", line, column, source)


def _validate_shape(rows: list[list[float]], lines: list[int], source: str):
    if not rows:
        raise TableParseError("no data rows", source=source)
    K = len(rows)
    for r, line in zip(rows, lines):
        if len(r) != K:
            raise TableParseError(
                f"table is not square: {K} rows but this row has {len(r)} values", line, None, source
            )
    if K < 2:
        raise TableParseError(f"need at least 2 categories, got K={K}", lines[0], None, source)


def parse_csv(text: str, source: str = "<input>") -> ContingencyTable:
    records = [
        (i + 1, [f.strip() for f in row])
        for i, row in enumerate(csv.reader(io.StringIO(text)))
        if any(f.strip() for f in row)
    ]
    if not records:
        raise TableParseError("empty table", source=source)
    first = records[0][1]
    label_only = first and not _is_number(first[0]) and len(records) > 1 and _is_number(records[1][1][0])
    if not all(_is_number(f) for f in first[1:] if f) or label_only:
        records = records[1:]  # header
    if not records:
        raise TableParseError("header row but no data", source=source)
    labelled = all(row and not _is_number(row[0]) for _, row in records)
    offset = 1 if labelled else 0
    rows, lines = [], []
    for line, row in records:
        values = []
        for j, field in enumerate(row[offset:]):
            column = j + offset + 1
            if not _is_number(field):
                raise TableParseError(f"not a number: {field!r}", line, column, source)
            v = float(field)
            _check_count(v, line, column, source)
            values.append(v)
        rows.append(values)
        lines.append(line)
    _validate_shape(rows, lines, source)
    return ContingencyTable(rows)


def parse_json(text: str, source: str = "<input>") -> ContingencyTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableParseError(exc.msg, exc.lineno, exc.colno, source) from None
    cells = doc.get("cells") if isinstance(doc, dict) else None
    if not isinstance(cells, list):
        raise TableParseError('expected an object with a "cells" array of rows', source=source)
    rows = []
    for i, row in enumerate(cells):
        if not isinstance(row, list):
            raise TableParseError(f"row {i + 1} is not an array", i + 1, None, source)
        values = []
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TableParseError(f"not a number: {v!r}", i + 1, j + 1, source)
            _check_count(float(v), i + 1, j + 1, source)
            values.append(float(v))
        rows.append(values)
    # rows of the cells array play the role of lines here
    _validate_shape(rows, list(range(1, len(rows) + 1)), source)
    return ContingencyTable(rows)


def read_table(path: str | Path) -> ContingencyTable:
    """Read a table, choosing the format from the suffix (``.json`` or CSV otherwise)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TableParseError(exc.strerror or str(exc), source=str(path)) from None
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_json(text, str(path))
    return parse_csv(text, str(path))
