"""Input parsing for the plot tool: CSV tables and JSONL record journals.

Every loader validates the columns it needs and raises ``ColumnError``
naming the offending column, so the CLI can exit nonzero with a message
that points at the broken file.
"""

from __future__ import annotations

import csv
import json


class ColumnError(ValueError):
    """A required column is missing or holds non-numeric data."""

    def __init__(self, path, column, reason="missing"):
        self.path = path
        self.column = column
        super().__init__(f"{path}: column {column!r} {reason}")


def load_table_csv(path, required=(), numeric=True):
    """Read a header CSV into a dict of column -> list.

    ``required`` columns must be present; numeric columns failing float
    conversion raise ``ColumnError`` with the column name.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ColumnError(path, required[0] if required else "?")
        rows = [row for row in reader if row]
    for name in required:
        if name not in header:
            raise ColumnError(path, name)
    table = {name: [] for name in header}
    for row in rows:
        if len(row) != len(header):
            raise ColumnError(path, header[min(len(row), len(header) - 1)],
                              "has a ragged row")
        for name, cell in zip(header, row):
            if numeric:
                try:
                    cell = float(cell)
                except ValueError:
                    raise ColumnError(path, name,
                                      f"holds non-numeric value {cell!r}")
            table[name].append(cell)
    return table


def load_records_jsonl(path, required=()):
    """Read one JSON record per line, checking each for required keys."""
    records = []
    with open(path) as handle:
        for i, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                raise ColumnError(path, "?", f"line {i} is not valid JSON")
            for name in required:
                if name not in rec:
                    raise ColumnError(path, name, f"missing on line {i}")
            records.append(rec)
    if not records:
        raise ColumnError(path, required[0] if required else "?",
                          "file holds no records")
    return records
