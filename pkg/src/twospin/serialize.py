"""Deterministic JSON/CSV emission.

Identical invocations must produce byte-identical output, so floats are
rounded to 12 significant digits before dumping, keys are sorted, and exact
numbers (Fraction/Quad) serialise to both a float and a lossless string.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .exact import Quad

SCHEMA_VERSION = 1


def format_float(x: float) -> float:
    """Round to 12 significant digits (stable across invocations)."""
    return float(f"{float(x):.12g}")


def exact_str(value) -> str | None:
    """Lossless string form of an exact scalar, or None for floats."""
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (Fraction, Quad)):
        return str(value)
    return None


def jsonable(obj):
    """Recursively convert scalars so json.dumps output is deterministic."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (Fraction, Quad)):
        return {"float": format_float(float(obj)), "exact": str(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def dump_json(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2) + "\n"


def dump_csv(header: list[str], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()
