"""Plain-text tables shared by the reports and the command line.

CSV: ``# key=value`` metadata lines, a header row, then rows with floats
written by ``repr`` (shortest round-trip form).  JSON: ``{"meta", "columns",
"rows"}``.  Both are deterministic for identical input.
"""

from __future__ import annotations

import csv
import io
import json
import math


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(meta: dict, columns, rows) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={_cell(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def render_json(meta: dict, columns, rows) -> str:
    doc = {"meta": {k: _json_value(v) for k, v in meta.items()},
           "columns": list(columns),
           "rows": [[_json_value(v) for v in row] for row in rows]}
    return json.dumps(doc) + "\n"


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_csv(text: str):
    """Inverse of ``render_csv``; returns (meta, columns, rows) with numeric cells converted."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse_cell(c) for c in r] for r in reader]
    return meta, columns, rows


def parse_json(text: str):
    doc = json.loads(text)
    conv = lambda v: float(v) if isinstance(v, str) and v in ("inf", "-inf", "nan") else v
    rows = [[conv(v) for v in r] for r in doc["rows"]]
    return doc["meta"], doc["columns"], rows
