"""Report container and its JSON / CSV serialisation.

A report has a mode, the config that produced it, a flat-ish ``summary``
mapping and an optional table. CSV output is the table (or the summary as
key/value rows when there is none). Floats are written with ``repr`` so the
output is exact and byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class Report:
    mode: str
    config: dict
    summary: dict
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "mode": self.mode,
            "config": _plain(self.config),
            "summary": _plain(self.summary),
            "table": {"columns": list(self.columns), "rows": _plain(self.rows)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
        table = data.get("table", {})
        return cls(data["mode"], data["config"], data["summary"],
                   list(table.get("columns", [])), [list(r) for r in table.get("rows", [])])


def _plain(obj):
    """numpy scalars/arrays to Python, NaN and inf to None."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _flatten(d: dict, prefix: str = ""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            yield key, json.dumps(v)
        else:
            yield key, v


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.columns:
        writer.writerow(report.columns)
        for row in _plain(report.rows):
            writer.writerow([_cell(v) for v in row])
    else:
        writer.writerow(["key", "value"])
        for k, v in _flatten(_plain(report.summary)):
            writer.writerow([k, _cell(v)])
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", path=None) -> str:
    """Serialise `report`; write it to `path` when given. Returns the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))
