"""JSON and CSV persistence.

Floats are written with 17 significant digits so that every double
round-trips bit-exactly; infinities are written as the strings ``"inf"`` /
``"-inf"`` (JSON has no literal for them).
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ShapeError

__all__ = [
    "SCHEMA_VERSION",
    "dumps",
    "float_or_inf",
    "matrix_from_dict",
    "matrix_to_dict",
    "read_json",
    "rows_to_csv",
    "write_json",
    "write_text",
]

SCHEMA_VERSION = "v1"


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int, out: list) -> None:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, Mapping):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(pad + json.dumps(str(k)) + ": ")
            _encode(v, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), indent, level, out)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        flat = all(not isinstance(v, (Mapping, list, tuple, np.ndarray)) for v in obj)
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", " if flat else sep)
            if not flat:
                out.append(pad)
            _encode(v, indent, level + 1, out)
        out.append("]" if flat else end + "]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), indent, level, out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize ``obj`` to JSON with full-precision floats."""
    out: list = []
    _encode(obj, indent, 0, out)
    return "".join(out) + "\n"


def float_or_inf(x) -> float:
    """Inverse of the float encoding: accepts numbers and ``"inf"`` strings."""
    if isinstance(x, str):
        return float(x.replace("infinity", "inf"))
    return float(x)


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def write_json(path, obj: Any) -> None:
    write_text(path, dumps(obj))


def read_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def matrix_to_dict(a) -> dict:
    """``{"rows", "cols", "re", "im"}`` with row-major flattening."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d array, got shape {a.shape}")
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(v) for v in flat.real],
        "im": [float(v) for v in np.imag(flat)],
    }


def matrix_from_dict(obj: Mapping) -> np.ndarray:
    """Parse the matrix exchange format; rejects inconsistent lengths."""
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re, im = obj["re"], obj["im"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from None
    if rows < 1 or cols < 1:
        raise ShapeError("rows and cols must be positive")
    if len(re) != rows * cols or len(im) != rows * cols:
        raise ShapeError(
            f"expected {rows * cols} entries, got re={len(re)} im={len(im)}"
        )
    re = np.array([float_or_inf(v) for v in re], dtype=float)
    im = np.array([float_or_inf(v) for v in im], dtype=float)
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise ValueError("matrix entries must be finite")
    return (re + 1j * im).reshape(rows, cols)


def rows_to_csv(rows: Iterable[Mapping], fields: Sequence[str]) -> str:
    """Header plus comma-separated rows; floats at 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        cells = []
        for f in fields:
            v = row.get(f)
            if v is None:
                cells.append("")
            elif isinstance(v, (float, np.floating)):
                cells.append(_float(float(v)).strip('"'))
            else:
                cells.append(str(v))
        writer.writerow(cells)
    return buf.getvalue()
