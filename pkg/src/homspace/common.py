"""
Shared plumbing: deterministic RNG streams, stable summation, log-log fits,
trend thresholds, and deterministic report serialization.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

# Default seed for every sampled scan; the CLI --seed flag overrides it.
DEFAULT_SEED = 0xD1AD1C


@dataclass(frozen=True)
class TrendConfig:
    """Thresholds used to call a decaying-constant trend on finite data.

    On a finite space every scaling bound holds with *some* constant, so a
    failure verdict is a trend statement. A check fails only when both
    prongs fire for some probe (a center's radial curve, or a cube
    ancestry chain):

      * the fitted mass-scaling exponent deviates from the declared omega
        by more than ``exponent_tol``, and
      * the running constant decays by at least a factor 1/``decay_frac``
        between its extremes over the resolved scale window.
    """

    exponent_tol: float = 0.2
    decay_frac: float = 0.1


def rng_stream(seed: int, *salt: int) -> np.random.Generator:
    """Deterministic generator for (seed, salt...); salts decorrelate uses."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF] + [int(s) & 0xFFFFFFFF for s in salt])


def stable_sum(values) -> float:
    """Sum with fsum over magnitude-ascending order (stable for q < 1 piles)."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        return 0.0
    order = np.argsort(np.abs(arr), kind="stable")
    return math.fsum(arr[order])


def lp_aggregate(values, p: float) -> float:
    """(sum |v|^p)^(1/p); sup for p = inf; 0 for an empty pile."""
    arr = np.abs(np.asarray(values, dtype=float)).ravel()
    if arr.size == 0:
        return 0.0
    if math.isinf(p):
        return float(arr.max())
    return float(stable_sum(arr**p) ** (1.0 / p))


def fit_loglog(x, y):
    """OLS (slope, intercept) of log y on log x; None when degenerate."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if int(keep.sum()) < 2:
        return None
    lx = np.log(x[keep])
    ly = np.log(y[keep])
    if float(np.ptp(lx)) == 0.0:
        return None
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def decay_span(values) -> float:
    """min/max of a positive curve; 1.0 when flat or too short."""
    arr = np.asarray([v for v in values if v > 0 and math.isfinite(v)], dtype=float)
    if arr.size < 2:
        return 1.0
    return float(arr.min() / arr.max())


# ---------------------------------------------------------------------------
# Report serialization. Reports must be byte-identical across runs for the
# same config + seed, and floats carry 17 significant digits.
# ---------------------------------------------------------------------------

def sanitize(obj):
    """Convert numpy containers/scalars to plain Python for serialization."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj, indent: int) -> str:
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad_in}{json.dumps(str(k))}: {_encode(v, indent + 1)}"
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad_in}{_encode(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"unserializable report value of type {type(obj)!r}")


def dumps_report(obj) -> str:
    """Deterministic JSON: sorted keys, 2-space indent, 17-digit floats."""
    return _encode(sanitize(obj), 0) + "\n"


def flatten_scalars(obj, prefix="") -> dict:
    """Flatten nested dicts to dotted keys, keeping scalar leaves only."""
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}{k}" if not prefix else f"{prefix}.{k}"
            out.update(flatten_scalars(v, key))
    elif isinstance(obj, (list, tuple)):
        pass  # lists handled by the per-witness expansion
    else:
        out[prefix] = obj
    return out


def report_to_csv(report) -> str:
    """Flatten a report to CSV: one row per witness dict, else one row."""
    report = sanitize(report)
    base = flatten_scalars(report)
    witnesses = report.get("witnesses") if isinstance(report, dict) else None
    rows = []
    if isinstance(witnesses, list) and witnesses and all(isinstance(w, dict) for w in witnesses):
        for w in witnesses:
            row = dict(base)
            row.update({f"witness.{k}": v for k, v in flatten_scalars(w).items()})
            rows.append(row)
    else:
        rows.append(base)
    cols = sorted({k for row in rows for k in row})
    lines = [",".join(cols)]
    for row in rows:
        cells = []
        for c in cols:
            v = row.get(c, "")
            if isinstance(v, float):
                cells.append(_fmt_float(v))
            else:
                cells.append(json.dumps(v) if isinstance(v, str) and ("," in v or '"' in v) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
