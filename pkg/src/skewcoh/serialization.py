"""JSON encodings for matrices, states and measurement families.

A matrix is ``{"dim": d, "matrix": [[[re, im], ...], ...]}`` in row-major
order. A measurement family is wrapped in an envelope::

    {"kind": "mum" | "gsm" | "mub" | "sic", "dim": d,
     "params": {"t": ..., "kappa": ...} | {"t": ..., "a": ...},
     "elements": [<matrix>, ...]}

MUB vectors are stored as 1 x d matrices, basis by basis.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .measurements import GsmSet, MubSet, MumSet


class FormatError(ValueError):
    """Malformed JSON input; the message names the offending field."""


def matrix_to_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return {
        "dim": int(m.shape[-1]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def _entry(x, where: str) -> complex:
    if not (isinstance(x, (list, tuple)) and len(x) == 2):
        raise FormatError(f"{where}: expected a [re, im] pair, got {x!r}")
    re, im = x
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (int, float)) or not math.isfinite(part):
            raise FormatError(f"{where}: entries must be finite numbers, got {x!r}")
    return complex(re, im)


def matrix_from_json(obj, where: str = "matrix", rows: int | None = None) -> np.ndarray:
    """Decode a matrix; ``rows`` defaults to the square shape ``dim``."""
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object with 'dim' and 'matrix'")
    d = obj.get("dim")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise FormatError(f"{where}.dim: expected a positive integer, got {d!r}")
    data = obj.get("matrix")
    nrows = d if rows is None else rows
    if not isinstance(data, list) or len(data) != nrows:
        raise FormatError(f"{where}.matrix: expected {nrows} rows")
    out = np.empty((nrows, d), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != d:
            raise FormatError(f"{where}.matrix[{i}]: expected {d} entries")
        for j, x in enumerate(row):
            out[i, j] = _entry(x, f"{where}.matrix[{i}][{j}]")
    return out


def family_to_json(family) -> dict:
    d = family.dim
    if isinstance(family, MumSet):
        kind = "mum"
        params = {"t": family.t, "kappa": family.kappa}
        elements = [matrix_to_json(e) for e in np.asarray(family.elements).reshape(-1, d, d)]
    elif isinstance(family, GsmSet):
        kind = "sic" if family.t is None else "gsm"
        params = {"t": family.t, "a": family.a}
        elements = [matrix_to_json(e) for e in family.elements]
    elif isinstance(family, MubSet):
        kind = "mub"
        params = {}
        elements = [matrix_to_json(v[None]) for v in np.asarray(family.vectors).reshape(-1, d)]
    else:
        raise TypeError(f"cannot serialize {type(family).__name__}")
    return {"kind": kind, "dim": d, "params": params, "elements": elements}


def _param(params: dict, name: str, optional: bool = False):
    value = params.get(name)
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise FormatError(f"params.{name}: expected a finite number, got {value!r}")
    return float(value)


def family_from_json(obj):
    """Decode a measurement envelope back into a MumSet, GsmSet or MubSet.

    Only the structure is checked here; use
    :func:`skewcoh.measurements.verify_povm_family` for the defining conditions.
    """
    if not isinstance(obj, dict):
        raise FormatError("measurement: expected a JSON object")
    kind = obj.get("kind")
    d = obj.get("dim")
    if kind not in ("mum", "gsm", "mub", "sic"):
        raise FormatError(f"kind: expected one of mum/gsm/mub/sic, got {kind!r}")
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise FormatError(f"dim: expected an integer >= 2, got {d!r}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise FormatError("params: expected an object")
    elements = obj.get("elements")
    expected = {"mum": (d + 1) * d, "gsm": d * d, "sic": d * d, "mub": (d + 1) * d}[kind]
    if not isinstance(elements, list) or len(elements) != expected:
        raise FormatError(f"elements: expected {expected} entries for kind {kind!r}")

    if kind == "mub":
        vecs = [matrix_from_json(e, f"elements[{i}]", rows=1)[0] for i, e in enumerate(elements)]
        if any(len(v) != d for v in vecs):
            raise FormatError(f"elements: MUB vectors must have length {d}")
        return MubSet(d, np.array(vecs).reshape(d + 1, d, d))
    mats = []
    for i, e in enumerate(elements):
        m = matrix_from_json(e, f"elements[{i}]")
        if m.shape != (d, d):
            raise FormatError(f"elements[{i}]: expected a {d}x{d} matrix")
        mats.append(m)
    mats = np.array(mats)
    if kind == "mum":
        return MumSet(d, mats.reshape(d + 1, d, d, d), _param(params, "t"), _param(params, "kappa"))
    t = _param(params, "t", optional=(kind == "sic"))
    return GsmSet(d, mats, t, _param(params, "a"))


def load_json(path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
