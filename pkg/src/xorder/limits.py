"""Limits of sequences sampled along x_j = x0 * 2**j, evaluated in log space.

Three outcomes are recognised: a finite limit (raw convergence or Neville
extrapolation in t = 1/log x, which handles slowly varying corrections), a
limit of 0 or +inf (monotone log trend past +-30), or no decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError

RAW_TOL = 1e-4
DIVERGENCE_LOG = 30.0
TREND_POINTS = 5
NEVILLE_POINTS = 6
NEVILLE_STRIDE = 3
NEVILLE_TOL = 1e-4


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    log_value: float
    converged: bool
    kind: str  # "finite" | "zero" | "infinite" | "undetermined"
    method: str  # "raw" | "extrapolated" | "trend" | "none"
    error: float
    trace: tuple[float, ...]
    xs: tuple[float, ...]

    def to_doc(self) -> dict:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "converged": self.converged,
            "kind": self.kind,
            "method": self.method,
            "error": self.error,
        }


def geometric_sequence(x0: float = 1.0, n: int = 41, ratio: float = 2.0, x_max: float | None = None) -> np.ndarray:
    xs = x0 * ratio ** np.arange(n, dtype=float)
    if x_max is not None:
        xs = xs[xs <= x_max]
    return xs


def neville(ts, ys, t0: float = 0.0) -> tuple[float, float]:
    """Polynomial extrapolation to t0; returns (value, |last correction|)."""
    ts = np.asarray(ts, dtype=float)
    p = np.array(ys, dtype=float)
    n = len(p)
    prev = p[-1]
    for level in range(1, n):
        prev = p[n - 1]
        for i in range(n - 1, level - 1, -1):
            p[i] = ((t0 - ts[i - level]) * p[i] - (t0 - ts[i]) * p[i - 1]) / (ts[i] - ts[i - level])
    return float(p[-1]), float(abs(p[-1] - prev))


def _exp(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def estimate_limit(log_values, xs) -> LimitEstimate:
    """Limit of exp(log_values[j]) as j grows; see the module docstring."""
    lv = np.asarray(log_values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    keep = ~np.isnan(lv)
    if not keep.any():
        raise RangeError("every probe underflowed; start the sequence at a smaller x0")
    lv, xs = lv[keep], xs[keep]
    trace = tuple(float(v) for v in lv)
    xt = tuple(float(v) for v in xs)

    tail = lv[-TREND_POINTS:]
    if np.isneginf(tail).any() and not np.isposinf(tail).any():
        return LimitEstimate(0.0, -math.inf, True, "zero", "trend", 0.0, trace, xt)
    if np.isposinf(tail).any() and not np.isneginf(tail).any():
        return LimitEstimate(math.inf, math.inf, True, "infinite", "trend", 0.0, trace, xt)

    fin = np.isfinite(lv)
    lv, xs = lv[fin], xs[fin]
    if lv.size == 0:
        return LimitEstimate(math.nan, math.nan, False, "undetermined", "none", math.inf, trace, xt)

    if lv.size >= TREND_POINTS:
        t = lv[-TREND_POINTS:]
        steps = np.diff(t)
        if abs(t[-1]) > DIVERGENCE_LOG and (np.all(steps < 0) or np.all(steps > 0)):
            if t[-1] < 0:
                return LimitEstimate(0.0, float(t[-1]), True, "zero", "trend", 0.0, trace, xt)
            return LimitEstimate(math.inf, float(t[-1]), True, "infinite", "trend", 0.0, trace, xt)

    if lv.size >= 3:
        last = lv[-3:]
        spread = float(np.max(last) - np.min(last))
        if spread < RAW_TOL:
            v = float(lv[-1])
            return LimitEstimate(_exp(v), v, True, "finite", "raw", spread, trace, xt)

    pick = np.arange(lv.size - 1, -1, -NEVILLE_STRIDE)[:NEVILLE_POINTS][::-1]
    usable = xs[pick] > 1.0
    pick = pick[usable]
    if pick.size >= 3:
        value, err = neville(1.0 / np.log(xs[pick]), lv[pick])
        converged = err < NEVILLE_TOL * max(1.0, abs(value))
        raw_err = float(abs(lv[-1] - lv[-2])) if lv.size >= 2 else math.inf
        if converged or err < raw_err:
            return LimitEstimate(_exp(value), value, bool(converged), "finite", "extrapolated", err, trace, xt)
    v = float(lv[-1])
    err = float(abs(lv[-1] - lv[-2])) if lv.size >= 2 else math.inf
    return LimitEstimate(_exp(v), v, False, "undetermined", "none", err, trace, xt)


def sequence_limit(log_fn, xs) -> LimitEstimate:
    """Limit of exp(log_fn(x)) along ``xs``."""
    with np.errstate(all="ignore"):
        vals = np.asarray(log_fn(np.asarray(xs, dtype=float)), dtype=float)
    return estimate_limit(vals, xs)
