"""JSON readers and writers for states, subalgebra chains and measures; CSV formatting."""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os

import numpy as np

from .algebra import SubalgebraChain
from .divergences import FdState
from .errors import ParseError
from .gicar import UnitIntervalMeasure


def _load(source):
    """JSON object from a path, a JSON string, or an already-parsed dict."""
    if isinstance(source, dict):
        return source
    text = None
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
        where = str(source)
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text, where = source, "<string>"
    else:
        raise ParseError(f"no such file: {source}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _complex_matrix(rows, field: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{field}: expected a nonempty list of rows")
    d = len(rows)
    out = np.zeros((d, d), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise ParseError(f"{field}[{i}]: expected {d} entries")
        for j, z in enumerate(row):
            if isinstance(z, (int, float)):
                out[i, j] = float(z)
            elif isinstance(z, list) and len(z) == 2 and all(isinstance(t, (int, float)) for t in z):
                out[i, j] = complex(z[0], z[1])
            else:
                raise ParseError(f"{field}[{i}][{j}]: expected a number or an [re, im] pair")
    return out


def parse_state(source) -> FdState:
    """Read ``{"blocks": [block, ...]}`` with blocks as row-major ``[re, im]`` matrices."""
    obj = _load(source)
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise ParseError("state JSON needs a top-level 'blocks' field")
    blocks = obj["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise ParseError("'blocks' must be a nonempty list")
    mats = [_complex_matrix(b, f"blocks[{k}]") for k, b in enumerate(blocks)]
    return FdState(mats)


def emit_state(state: FdState) -> dict:
    return {
        "blocks": [
            [[[float(z.real), float(z.imag)] for z in row] for row in b.entries] for b in state.blocks
        ]
    }


def parse_chain(source) -> SubalgebraChain:
    obj = _load(source)
    try:
        return SubalgebraChain.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed chain JSON: {exc}") from exc


def parse_measure(source) -> UnitIntervalMeasure:
    obj = _load(source)
    try:
        return UnitIntervalMeasure.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed measure JSON: {exc}") from exc


def format_number(x) -> str:
    """12 significant digits; ``inf``, ``-inf`` and ``nan`` spelled out."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x) + 0.0  # drops the sign of -0.0
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def to_csv(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def to_json(header, rows) -> str:
    def clean(v):
        if isinstance(v, (float, np.floating)) and not math.isfinite(v):
            return format_number(v)
        if isinstance(v, np.generic):
            return v.item()
        return v

    return json.dumps([{h: clean(v) for h, v in zip(header, row)} for row in rows], indent=2)

