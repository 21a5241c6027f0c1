"""Deterministic CSV/JSON emission.  Floats use repr (shortest round-trip decimal)."""

from __future__ import annotations

import csv
import io
import json
import math


def fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, complex):
        return {"re": jsonable(v.real), "im": jsonable(v.imag)}
    if hasattr(v, "dtype"):
        return jsonable(v.item())
    if isinstance(v, float) and not math.isfinite(v):
        return fmt(v)
    return v


def split_complex(name, v):
    v = complex(v)
    return {f"{name}_re": v.real, f"{name}_im": v.imag}


def render(table, fmt_kind: str) -> str:
    """``table`` = {"command", "columns", "rows", "summary"}; rows are lists aligned with columns."""
    if fmt_kind == "json":
        return json.dumps(jsonable(table), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table["columns"])
    for row in table["rows"]:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()
