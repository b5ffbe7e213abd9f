"""Single lifetime laws: evaluation, inversion, ageing class, scale equivalence.

Every law is an immutable :class:`Lifetime`. The two log-space primitives
``log_tail`` and ``log_neg_log_cdf`` are accurate in opposite regimes (far
tail, near the origin) and everything else is derived from them, so the
same object can be probed at ``x = 1e6`` and at ``x = 1e-12``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.special import gammainc, gammaln

from ._logspace import (
    LOG_HALF,
    lnlc_from_log_tail,
    log1mexp,
    log_cdf_from_lnlc,
    log_tail_from_lnlc,
    logsumexp_rows,
    scalarize,
)
from .errors import DomainError, UnboundedQuantileError, ValidationError

__all__ = [
    "AgeingClass",
    "BuiltinTail",
    "DistributionSpec",
    "Exponential",
    "GammaInt",
    "GenExponential",
    "Lifetime",
    "PowerOf",
    "TailPowerOf",
    "UQuadratic",
    "Weibull",
    "classify_failure_rate",
    "evaluate",
    "quantile",
    "scale_equivalent",
    "scaled",
]

# log(-log(1/2)): lnlc below this means cdf > 1/2.
_LNLC_HALF = math.log(math.log(2.0))

BISECTION_X_MAX = 1e12
BISECTION_ITERATIONS = 200


def _invert_decreasing(fn, target, x_max=BISECTION_X_MAX, iterations=BISECTION_ITERATIONS):
    """Vectorised bisection for fn(x) = target with fn nonincreasing on [0, inf)."""
    target = np.atleast_1d(np.asarray(target, dtype=float))
    with np.errstate(all="ignore"):
        return _bisect(fn, target, x_max, iterations)


def _bisect(fn, target, x_max, iterations):
    hi = np.ones_like(target)
    while True:
        short = fn(hi) > target
        if not short.any():
            break
        if np.any(hi[short] > x_max):
            raise UnboundedQuantileError(
                f"quantile not bracketed below x_max={x_max:g}"
            )
        hi = np.where(short, 2.0 * hi, hi)
    lo = np.zeros_like(target)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = fn(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _check_representable(out, coordinate):
    bad = ~np.isfinite(out) & np.isfinite(coordinate)
    if np.any(bad):
        raise UnboundedQuantileError("quantile exceeds the largest representable double")


def _positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


class Lifetime(ABC):
    """A nonnegative lifetime law with F(0) = 0.

    Subclasses provide ``_log_tail`` or ``_lnlc`` (or both) and ``_log_pdf``
    for arrays of nonnegative ``x``. Closed-form inverses, when known, go in
    ``_inv_log_tail`` / ``_inv_lnlc``; otherwise bisection is used.
    """

    closed_form_quantile: ClassVar[bool] = False

    def _log_tail(self, x):
        return log_tail_from_lnlc(self._lnlc(x))

    def _lnlc(self, x):
        return lnlc_from_log_tail(self._log_tail(x))

    @abstractmethod
    def _log_pdf(self, x): ...

    def support(self) -> tuple[float, float]:
        return (0.0, math.inf)

    # -- evaluators -------------------------------------------------------

    def log_tail(self, x):
        xa = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = self._log_tail(np.maximum(xa, 0.0))
        return scalarize(out, x)

    def log_neg_log_cdf(self, x):
        """log(-log F(x)); +inf at the origin, -inf past the right endpoint."""
        xa = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = self._lnlc(np.maximum(xa, 0.0))
        return scalarize(out, x)

    def log_cdf(self, x):
        return scalarize(log_cdf_from_lnlc(self.log_neg_log_cdf(x)), x)

    def tail(self, x):
        return scalarize(np.exp(self.log_tail(x)), x)

    def cdf(self, x):
        return scalarize(np.exp(self.log_cdf(x)), x)

    def log_pdf(self, x):
        xa = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.where(xa < 0.0, -np.inf, self._log_pdf(np.maximum(xa, 0.0)))
        return scalarize(out, x)

    def pdf(self, x):
        return scalarize(np.exp(self.log_pdf(x)), x)

    def failure_rate(self, x):
        lt = np.asarray(self.log_tail(x))
        if np.any(np.isneginf(lt)):
            raise DomainError("failure rate undefined where the tail vanishes")
        return scalarize(np.exp(np.asarray(self.log_pdf(x)) - lt), x)

    # -- inversion --------------------------------------------------------

    def _inv_log_tail(self, log_tail):
        lt = np.asarray(log_tail, dtype=float)
        out = np.empty_like(lt)
        far = lt < LOG_HALF
        if far.any():
            out[far] = _invert_decreasing(self._log_tail, lt[far])
        if (~far).any():
            out[~far] = _invert_decreasing(self._lnlc, lnlc_from_log_tail(lt[~far]))
        return out

    def _inv_lnlc(self, m):
        m = np.asarray(m, dtype=float)
        out = np.empty_like(m)
        near = m >= _LNLC_HALF
        if near.any():
            out[near] = _invert_decreasing(self._lnlc, m[near])
        if (~near).any():
            out[~near] = _invert_decreasing(self._log_tail, log_tail_from_lnlc(m[~near]))
        return out

    def inv_log_tail(self, log_tail):
        """x with log(1 - F(x)) = log_tail."""
        lt = np.atleast_1d(np.asarray(log_tail, dtype=float))
        out = np.zeros_like(lt)
        inner = lt < 0.0
        if inner.any():
            out[inner] = self._inv_log_tail(lt[inner])
        _check_representable(out, lt)
        out = np.where(np.isneginf(lt), self.support()[1], out)
        return scalarize(out, log_tail)

    def inv_log_neg_log_cdf(self, m):
        """x with log(-log F(x)) = m."""
        m = np.atleast_1d(np.asarray(m, dtype=float))
        out = np.zeros_like(m)
        inner = np.isfinite(m)
        if inner.any():
            out[inner] = self._inv_lnlc(m[inner])
        _check_representable(out, m)
        out = np.where(np.isneginf(m), self.support()[1], out)
        return scalarize(out, m)

    def inverse_from(self, log_tail, lnlc):
        """Invert using whichever of the two coordinates carries precision."""
        lt = np.atleast_1d(np.asarray(log_tail, dtype=float))
        m = np.atleast_1d(np.asarray(lnlc, dtype=float))
        out = np.empty_like(lt)
        far = lt < LOG_HALF
        if far.any():
            out[far] = np.atleast_1d(self.inv_log_tail(lt[far]))
        if (~far).any():
            out[~far] = np.atleast_1d(self.inv_log_neg_log_cdf(m[~far]))
        return scalarize(out, log_tail)

    def quantile(self, p):
        pa = np.atleast_1d(np.asarray(p, dtype=float))
        if np.any(~((pa > 0.0) & (pa < 1.0))):
            raise DomainError("quantile requires 0 < p < 1")
        with np.errstate(divide="ignore"):
            lt = np.log1p(-pa)
            m = np.log(-np.log(pa))
        return scalarize(self.inverse_from(lt, m), p)

    def median(self) -> float:
        return float(self.quantile(0.5))

    # -- structure --------------------------------------------------------

    @abstractmethod
    def scale_signature(self):
        """(shape key, rates) with F(x) = Phi_key(rates * x) jointly in x."""

    @abstractmethod
    def rescaled(self, k: float) -> "Lifetime":
        """Law of k * X."""

    @abstractmethod
    def to_doc(self) -> dict: ...


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential(Lifetime):
    rate: float
    family: ClassVar[str] = "exponential"
    closed_form_quantile: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def _log_tail(self, x):
        return -self.rate * x

    def _log_pdf(self, x):
        return math.log(self.rate) - self.rate * x

    def _inv_log_tail(self, lt):
        return -lt / self.rate

    def _inv_lnlc(self, m):
        return -log_tail_from_lnlc(m) / self.rate

    def scale_signature(self):
        return (("weibull", 1.0), (self.rate,))

    def rescaled(self, k):
        return Exponential(self.rate / k)

    def to_doc(self):
        return {"family": self.family, "rate": self.rate}


@dataclass(frozen=True)
class Weibull(Lifetime):
    """F(x) = 1 - exp(-(rate * x)^shape)."""

    shape: float
    rate: float = 1.0
    family: ClassVar[str] = "weibull"
    closed_form_quantile: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def _log_tail(self, x):
        return -((self.rate * x) ** self.shape)

    def _log_pdf(self, x):
        t = self.rate * x
        power = 0.0 if self.shape == 1.0 else (self.shape - 1.0) * np.log(t)
        return math.log(self.shape) + math.log(self.rate) + power - t**self.shape

    def _inv_log_tail(self, lt):
        return (-lt) ** (1.0 / self.shape) / self.rate

    def _inv_lnlc(self, m):
        return (-log_tail_from_lnlc(m)) ** (1.0 / self.shape) / self.rate

    def scale_signature(self):
        return (("weibull", self.shape), (self.rate,))

    def rescaled(self, k):
        return Weibull(self.shape, self.rate / k)

    def to_doc(self):
        return {"family": self.family, "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class GammaInt(Lifetime):
    """Gamma law with integer shape; tail e^{-t} sum_{l<a} t^l / l!, t = rate x."""

    shape: int
    rate: float = 1.0
    family: ClassVar[str] = "gamma_int"

    def __post_init__(self):
        a = self.shape
        if isinstance(a, bool) or not isinstance(a, (int, np.integer, float)) or a != int(a) or a < 1:
            raise ValidationError(f"shape must be an integer >= 1, got {a!r}")
        object.__setattr__(self, "shape", int(a))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def _series_log_tail(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == 1:
            return -t
        flat = t.reshape(-1)
        ells = np.arange(1, self.shape)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.vstack([np.zeros((1, flat.size)), ells * np.log(flat)[None, :] - gammaln(ells + 1)])
        return (-flat + logsumexp_rows(terms, axis=0)).reshape(t.shape)

    def _log_lower(self, t):
        """log P(a, t), with the leading power term where gammainc underflows."""
        p = gammainc(self.shape, t)
        with np.errstate(divide="ignore"):
            direct = np.log(p)
            lead = self.shape * np.log(t) - gammaln(self.shape + 1)
        return np.where(p > 1e-290, direct, lead)

    def _log_tail(self, x):
        t = self.rate * np.asarray(x, dtype=float)
        p = gammainc(self.shape, t)
        series = self._series_log_tail(t)
        return np.where(p < 0.5, np.log1p(-p), series)

    def _lnlc(self, x):
        t = self.rate * np.asarray(x, dtype=float)
        p = gammainc(self.shape, t)
        near = np.log(-self._log_lower(t))
        far = lnlc_from_log_tail(self._series_log_tail(t))
        return np.where(p < 0.5, near, far)

    def _log_pdf(self, x):
        t = self.rate * x
        power = 0.0 if self.shape == 1 else (self.shape - 1) * np.log(t)
        return math.log(self.rate) + power - t - gammaln(self.shape)

    def scale_signature(self):
        if self.shape == 1:
            return (("weibull", 1.0), (self.rate,))
        return (("gamma", self.shape), (self.rate,))

    def rescaled(self, k):
        return GammaInt(self.shape, self.rate / k)

    def to_doc(self):
        return {"family": self.family, "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class GenExponential(Lifetime):
    """Generalized exponential GE(shape, rate): F(x) = (1 - e^{-rate x})^shape."""

    shape: float
    rate: float = 1.0
    family: ClassVar[str] = "gen_exponential"
    closed_form_quantile: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def _lnlc(self, x):
        return math.log(self.shape) + lnlc_from_log_tail(-self.rate * x)

    def _log_pdf(self, x):
        lam = self.rate
        power = 0.0 if self.shape == 1.0 else (self.shape - 1.0) * log1mexp(-lam * x)
        return math.log(self.shape) + math.log(lam) - lam * x + power

    def _inv_lnlc(self, m):
        return -log_tail_from_lnlc(m - math.log(self.shape)) / self.rate

    def _inv_log_tail(self, lt):
        return self._inv_lnlc(lnlc_from_log_tail(lt))

    def scale_signature(self):
        if self.shape == 1.0:
            return (("weibull", 1.0), (self.rate,))
        return (("power", self.shape, ("weibull", 1.0)), (self.rate,))

    def rescaled(self, k):
        return GenExponential(self.shape, self.rate / k)

    def to_doc(self):
        return {"family": self.family, "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class UQuadratic(Lifetime):
    """U-shaped density 12/(b-a)^3 (x - (a+b)/2)^2 on [a, b]."""

    left: float
    right: float
    family: ClassVar[str] = "u_quadratic"
    closed_form_quantile: ClassVar[bool] = True

    def __post_init__(self):
        a, b = self.left, self.right
        for name, v in (("left", a), ("right", b)):
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if not (0.0 <= a < b):
            raise ValidationError(f"u_quadratic requires 0 <= left < right, got [{a}, {b}]")
        object.__setattr__(self, "left", float(a))
        object.__setattr__(self, "right", float(b))

    @property
    def _mid(self):
        return 0.5 * (self.left + self.right)

    @property
    def _half(self):
        return 0.5 * (self.right - self.left)

    def _cdf_tail(self, x):
        a, b, m, h = self.left, self.right, self._mid, self._half
        w3 = (b - a) ** 3
        xc = np.clip(x, a, b)
        d = xc - m
        # factored forms keep relative precision at both endpoints
        cdf = 4.0 * (xc - a) * (d * d - d * h + h * h) / w3
        tail = 4.0 * (b - xc) * (h * h + h * d + d * d) / w3
        return cdf, tail

    def _log_tail(self, x):
        cdf, tail = self._cdf_tail(x)
        with np.errstate(divide="ignore"):
            return np.where(cdf < 0.5, np.log1p(-cdf), np.log(tail))

    def _lnlc(self, x):
        cdf, tail = self._cdf_tail(x)
        with np.errstate(divide="ignore"):
            log_cdf = np.where(cdf < 0.5, np.log(cdf), np.log1p(-tail))
            return np.log(-log_cdf)

    def _log_pdf(self, x):
        a, b = self.left, self.right
        k = 12.0 / (b - a) ** 3
        inside = (x >= a) & (x <= b)
        with np.errstate(divide="ignore"):
            return np.where(inside, math.log(k) + 2.0 * np.log(np.abs(x - self._mid)), -np.inf)

    def _endpoint_distance(self, p):
        """e >= 0 with e (e^2 - 3 e h + 3 h^2) = p w^3 / 4 (distance from the nearer endpoint)."""
        h, w3 = self._half, (self.right - self.left) ** 3
        target = p * w3 / 4.0
        e = h + np.cbrt(target - h**3)
        # the cube-root form cancels near the endpoint; polish on the factored cubic
        with np.errstate(all="ignore"):
            for _ in range(3):
                slope = 3.0 * (e - h) ** 2
                step = (e * (e * e - 3.0 * e * h + 3.0 * h * h) - target) / slope
                e = np.where((slope > 0) & np.isfinite(step), e - step, e)
        return np.clip(e, 0.0, h)

    def _from_cdf(self, p):
        return self.left + self._endpoint_distance(p)

    def _from_tail(self, q):
        return self.right - self._endpoint_distance(q)

    def _inv_log_tail(self, lt):
        q = np.exp(lt)
        return np.where(q < 0.5, self._from_tail(q), self._from_cdf(-np.expm1(lt)))

    def _inv_lnlc(self, m):
        p = np.exp(-np.exp(m))
        return np.where(p < 0.5, self._from_cdf(p), self._from_tail(-np.expm1(-np.exp(m))))

    def support(self):
        return (self.left, self.right)

    def scale_signature(self):
        return (("uquad", self.left / self.right), (1.0 / self.right,))

    def rescaled(self, k):
        return UQuadratic(self.left * k, self.right * k)

    def to_doc(self):
        return {"family": self.family, "left": self.left, "right": self.right}


@dataclass(frozen=True)
class PowerOf(Lifetime):
    """cdf F_base(x)^exponent; houses homogeneous maxima and exponentiated laws."""

    base: Lifetime
    exponent: float
    family: ClassVar[str] = "power_of"

    def __post_init__(self):
        if not isinstance(self.base, DISTRIBUTION_TYPES):
            raise ValidationError("power_of base must be a distribution spec")
        object.__setattr__(self, "exponent", _positive("exponent", self.exponent))

    @property
    def closed_form_quantile(self):
        return self.base.closed_form_quantile

    def _lnlc(self, x):
        return math.log(self.exponent) + self.base._lnlc(x)

    def _log_pdf(self, x):
        t = self.exponent
        log_f = self.base._log_pdf(x)
        if t == 1.0:
            return log_f
        log_F = log_cdf_from_lnlc(self.base._lnlc(x))
        return math.log(t) + (t - 1.0) * log_F + log_f

    def _inv_lnlc(self, m):
        return self.base._inv_lnlc(m - math.log(self.exponent))

    def _inv_log_tail(self, lt):
        return self._inv_lnlc(lnlc_from_log_tail(lt))

    def support(self):
        return self.base.support()

    def scale_signature(self):
        key, rates = self.base.scale_signature()
        if self.exponent == 1.0:
            return key, rates
        if key[0] == "power":
            return (("power", key[1] * self.exponent, key[2]), rates)
        return (("power", self.exponent, key), rates)

    def rescaled(self, k):
        return PowerOf(self.base.rescaled(k), self.exponent)

    def to_doc(self):
        return {"family": self.family, "exponent": self.exponent, "base": self.base.to_doc()}


@dataclass(frozen=True)
class TailPowerOf(Lifetime):
    """tail (1 - F_base(x))^exponent; houses homogeneous minima."""

    base: Lifetime
    exponent: float
    family: ClassVar[str] = "tail_power_of"

    def __post_init__(self):
        if not isinstance(self.base, DISTRIBUTION_TYPES):
            raise ValidationError("tail_power_of base must be a distribution spec")
        object.__setattr__(self, "exponent", _positive("exponent", self.exponent))

    @property
    def closed_form_quantile(self):
        return self.base.closed_form_quantile

    def _log_tail(self, x):
        return self.exponent * self.base._log_tail(x)

    def _log_pdf(self, x):
        t = self.exponent
        log_f = self.base._log_pdf(x)
        if t == 1.0:
            return log_f
        return math.log(t) + (t - 1.0) * self.base._log_tail(x) + log_f

    def _inv_log_tail(self, lt):
        return self.base._inv_log_tail(lt / self.exponent)

    def _inv_lnlc(self, m):
        return self._inv_log_tail(log_tail_from_lnlc(m))

    def support(self):
        return self.base.support()

    def scale_signature(self):
        key, rates = self.base.scale_signature()
        t = self.exponent
        if t == 1.0:
            return key, rates
        if key[0] == "weibull":
            # (e^{-(r x)^s})^t is Weibull with rate r t^{1/s}
            return key, (rates[0] * t ** (1.0 / key[1]),)
        if key[0] == "tailpower":
            return (("tailpower", key[1] * t, key[2]), rates)
        return (("tailpower", t, key), rates)

    def rescaled(self, k):
        return TailPowerOf(self.base.rescaled(k), self.exponent)

    def to_doc(self):
        return {"family": self.family, "exponent": self.exponent, "base": self.base.to_doc()}


BUILTIN_TAILS = ("inv_quadratic", "inv_log", "exp_log_squared")


@dataclass(frozen=True)
class BuiltinTail(Lifetime):
    """Named non-parametric tails used as variation-class counterexamples.

    * ``inv_quadratic``: 1 / (x^2 + 1)
    * ``inv_log``: 1 / (log(x + 1) + 1)
    * ``exp_log_squared``: exp(-log(x + 1)^2)
    """

    name: str
    family: ClassVar[str] = "builtin_tail"
    closed_form_quantile: ClassVar[bool] = True

    def __post_init__(self):
        if self.name not in BUILTIN_TAILS:
            raise ValidationError(f"unknown builtin tail {self.name!r}; expected one of {BUILTIN_TAILS}")

    def _log_tail(self, x):
        if self.name == "inv_quadratic":
            return -np.log1p(x * x)
        if self.name == "inv_log":
            return -np.log1p(np.log1p(x))
        return -np.log1p(x) ** 2

    def _log_pdf(self, x):
        if self.name == "inv_quadratic":
            return math.log(2.0) + np.log(x) - 2.0 * np.log1p(x * x)
        if self.name == "inv_log":
            return -np.log1p(x) - 2.0 * np.log1p(np.log1p(x))
        u = np.log1p(x)
        return math.log(2.0) + np.log(u) - u - u * u

    def _inv_log_tail(self, lt):
        with np.errstate(over="ignore"):
            if self.name == "inv_quadratic":
                return np.sqrt(np.expm1(-lt))
            if self.name == "inv_log":
                return np.expm1(np.expm1(-lt))
            return np.expm1(np.sqrt(-lt))

    def _inv_lnlc(self, m):
        return self._inv_log_tail(log_tail_from_lnlc(m))

    def scale_signature(self):
        return (("builtin", self.name), ())

    def rescaled(self, k):
        raise ValidationError("builtin tails have no scale parameter")

    def to_doc(self):
        return {"family": self.family, "name": self.name}


DISTRIBUTION_TYPES = (
    Exponential,
    Weibull,
    GammaInt,
    GenExponential,
    UQuadratic,
    PowerOf,
    TailPowerOf,
    BuiltinTail,
)
DistributionSpec = (
    Exponential | Weibull | GammaInt | GenExponential | UQuadratic | PowerOf | TailPowerOf | BuiltinTail
)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

FUNCTIONALS = ("cdf", "tail", "log_tail", "pdf", "failure_rate", "log_cdf", "log_pdf")


def evaluate(spec: Lifetime, x, functional: str):
    """Evaluate one functional of a law (or system) at ``x >= 0``."""
    if functional not in FUNCTIONALS:
        raise ValidationError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")
    if np.any(np.asarray(x, dtype=float) < 0.0):
        raise DomainError("evaluation points must be nonnegative")
    return getattr(spec, functional)(x)


def quantile(spec: Lifetime, p):
    return spec.quantile(p)


def scaled(spec: Lifetime, k: float) -> Lifetime:
    """Law of ``k * X`` for X ~ spec."""
    return spec.rescaled(_positive("k", k))


def _keys_close(a, b, rel=1e-12) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_keys_close(u, v, rel) for u, v in zip(a, b))
    if isinstance(a, (float, int)) and isinstance(b, (float, int)):
        return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
    return a == b


def scale_equivalent(a: Lifetime, b: Lifetime) -> float | None:
    """k > 0 with F_a(x) = F_b(k x) when the two laws differ only by scale."""
    key_a, rates_a = a.scale_signature()
    key_b, rates_b = b.scale_signature()
    if not _keys_close(key_a, key_b) or len(rates_a) != len(rates_b):
        return None
    if not rates_a:
        return 1.0
    k = rates_a[0] / rates_b[0]
    for ra, rb in zip(rates_a, rates_b):
        if not math.isclose(ra / rb, k, rel_tol=1e-12):
            return None
    return k


@dataclass(frozen=True)
class AgeingClass:
    """Failure-rate monotonicity verdict on a probe grid."""

    label: str  # "IFR" | "DFR" | "ConstantFR" | "NonMonotoneFR" | "Inconclusive"
    grid: dict
    tolerance: float
    rate_range: tuple[float, float]


def failure_rate_grid(spec: Lifetime, n: int = 512, margin: float = 1e-6) -> np.ndarray:
    """Uniform grid over the support, trimmed by ``margin`` of its width at both ends.

    Unbounded supports are cut at the 1 - 1e-6 quantile before trimming.
    """
    lo, hi = spec.support()
    if not math.isfinite(hi):
        hi = float(spec.quantile(1.0 - 1e-6))
    width = hi - lo
    return np.linspace(lo + margin * width, hi - margin * width, n)


def classify_failure_rate(spec: Lifetime, grid=None, tol: float = 1e-9, margin: float = 1e-6) -> AgeingClass:
    """IFR / DFR / constant classification from successive failure-rate differences."""
    if grid is None:
        grid = failure_rate_grid(spec, margin=margin)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("failure-rate grid must be strictly increasing with >= 2 points")
    lo, hi = spec.support()
    if grid[0] < lo or grid[-1] > hi:
        raise DomainError(f"failure-rate grid leaves the support [{lo}, {hi}]")
    rates = np.asarray(spec.failure_rate(grid))
    descriptor = {"lo": float(grid[0]), "hi": float(grid[-1]), "n": int(grid.size)}
    rng = (float(np.min(rates)), float(np.max(rates)))
    if not np.all(np.isfinite(rates)):
        return AgeingClass("Inconclusive", descriptor, tol, rng)
    scale = float(np.max(np.abs(rates)))
    step = np.diff(rates)
    up = bool(np.any(step > tol * scale))
    down = bool(np.any(step < -tol * scale))
    if not up and not down and rng[1] - rng[0] <= tol * scale:
        label = "ConstantFR"
    elif up and not down:
        label = "IFR"
    elif down and not up:
        label = "DFR"
    elif not up and not down:
        # tiny drift accumulating past the tolerance: monotone in aggregate
        label = "IFR" if rates[-1] > rates[0] else "DFR"
    else:
        label = "NonMonotoneFR"
    return AgeingClass(label, descriptor, tol, rng)
