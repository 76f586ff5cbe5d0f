"""Curve JSON, report JSON and sweep CSV formats.

Floats are written with 17 significant digits so a write/read round trip is
lossless. Output contains no timestamps; identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .closure import ClosureTarget
from .errors import SchemaError
from .params import ModelParams
from .trace import CurveTrace

_NUMBER = {"type": "number"}
_OPT_NUMBER = {"type": ["number", "null"]}
_OPT_INT = {"type": ["integer", "null"]}

CURVE_SCHEMA = {
    "type": "object",
    "required": ["meta", "samples"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["n", "p", "rho", "d", "l", "r", "period", "closure_integral", "tool_version"],
            "properties": {
                "n": {"type": "integer", "minimum": 3},
                "p": {"type": "string", "pattern": r"^\d+/\d+$"},
                "rho": _NUMBER,
                "d": {"type": "number", "exclusiveMinimum": 0},
                "l": _OPT_INT,
                "r": _OPT_INT,
                "period": {"type": "number", "exclusiveMinimum": 0},
                "closure_integral": _OPT_NUMBER,
                "tool_version": {"type": "string"},
            },
        },
        "samples": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["s", "u", "du", "kappa", "psi", "x"],
                "properties": {
                    "s": _NUMBER, "u": {"type": "number", "exclusiveMinimum": 0},
                    "du": _NUMBER, "kappa": _NUMBER, "psi": _NUMBER,
                    "x": {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3},
                },
            },
        },
    },
}


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot serialise non-finite value {value!r}")
    return "%.17g" % value


def dumps(obj, indent: int | None = None, _level: int = 0) -> str:
    """JSON text with every float rendered to 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + (end if items else "") + "}"
    if isinstance(obj, (list, tuple)):
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[" + sep.join(items) + (end if items else "") + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def curve_to_dict(trace: CurveTrace) -> dict:
    params = trace.params
    target = trace.target
    meta = {
        "n": params.n,
        "p": params.p_string(),
        "rho": params.rho,
        "d": params.d,
        "l": target.l if target else None,
        "r": target.r if target else None,
        "period": trace.period,
        "closure_integral": trace.closure_integral,
        "tool_version": __version__,
    }
    samples = [
        {"s": float(s), "u": float(u), "du": float(du), "kappa": float(k), "psi": float(psi),
         "x": [float(v) for v in x]}
        for s, u, du, k, psi, x in zip(trace.s, trace.u, trace.du, trace.kappa, trace.psi, trace.x)
    ]
    return {"meta": meta, "samples": samples}


def write_curve(trace: CurveTrace, path) -> None:
    Path(path).write_text(dumps(curve_to_dict(trace), indent=1) + "\n", encoding="utf-8")


def curve_from_dict(data: dict) -> CurveTrace:
    try:
        jsonschema.validate(data, CURVE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid curve file: {exc.message}") from exc
    meta = data["meta"]
    params = ModelParams(meta["n"], meta["d"], meta["rho"])
    if Fraction(meta["p"]) != params.p:
        raise SchemaError(f"meta.p = {meta['p']} does not match n = {meta['n']}")
    if (meta["l"] is None) != (meta["r"] is None):
        raise SchemaError("meta.l and meta.r must both be set or both be null")
    target = ClosureTarget(meta["l"], meta["r"]) if meta["l"] is not None else None
    samples = data["samples"]
    col = lambda key: np.array([smp[key] for smp in samples], dtype=float)
    s = col("s")
    if len(s) > 1 and not np.all(np.diff(s) > 0):
        raise SchemaError("samples must be strictly increasing in s")
    x = np.array([smp["x"] for smp in samples], dtype=float).reshape(-1, 3)
    trace = CurveTrace(params=params, period=meta["period"], s=s, u=col("u"), du=col("du"),
                       kappa=col("kappa"), psi=col("psi"), x=x, target=target,
                       closure_integral=meta["closure_integral"])
    if len(s):
        trace.closure_gap = float(np.linalg.norm(x[-1] - x[0]))
    return trace


def read_curve(path) -> CurveTrace:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return curve_from_dict(data)


def report_to_json(report) -> str:
    return dumps(report.to_dict(), indent=1) + "\n"


SWEEP_COLUMNS = ("d", "I", "period", "alpha", "beta", "regime", "I_limit")


def rows_to_csv(columns, rows) -> str:
    """Comma-separated text; floats at 17 significant digits, '.' decimal."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else ("" if v is None else v)
                         for v in row])
    return buf.getvalue()
