"""Underflow-safe conversions between log-tail and log(-log cdf).

Every lifetime law exposes two log-space primitives:

* ``log_tail(x) = log(1 - F(x))``
* ``lnlc(x) = log(-log F(x))``

The first keeps relative precision where the tail is tiny, the second where
the cdf is tiny. The helpers below convert one into the other without losing
that precision.
"""

from __future__ import annotations

import numpy as np

LOG_HALF = -np.log(2.0)

# Below this, e^a is small enough that first-order series are exact in double.
_SERIES_CUTOFF = -30.0


def log1mexp(a):
    """log(1 - exp(a)) for a <= 0 (Maechler's two-branch form)."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a > LOG_HALF, np.log(-np.expm1(a)), np.log1p(-np.exp(a)))
    return out


def lnlc_from_log_tail(log_tail):
    """log(-log(1 - e^L)): turns a log-tail into log(-log cdf)."""
    a = np.asarray(log_tail, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = np.log(-log1mexp(a))
        series = a + 0.5 * np.exp(a)
    return np.where(a < _SERIES_CUTOFF, series, direct)


def log_tail_from_lnlc(m):
    """log(1 - exp(-e^M)): turns log(-log cdf) into a log-tail."""
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = np.exp(m)
        direct = log1mexp(-z)
        series = m - 0.5 * z
    return np.where(m < _SERIES_CUTOFF, series, direct)


def log_cdf_from_lnlc(m):
    with np.errstate(over="ignore"):
        return -np.exp(np.asarray(m, dtype=float))


def logsumexp_rows(values, axis=0):
    """logsumexp that tolerates all -inf slices (returns -inf, no warning)."""
    values = np.asarray(values, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        top = np.max(values, axis=axis, keepdims=True)
        safe = np.where(np.isfinite(top), top, 0.0)
        total = np.sum(np.exp(values - safe), axis=axis, keepdims=True)
        out = np.log(total) + safe
    out = np.where(np.isposinf(top), np.inf, out)
    return np.squeeze(out, axis=axis)


def scalarize(value, like):
    """Return a Python float when the caller passed a scalar."""
    if np.ndim(like) == 0:
        return float(np.asarray(value).reshape(()))
    return value
