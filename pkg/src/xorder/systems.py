"""Composite lifetimes: independent maxima/minima, series-of-parallel trees, F-G-M maxima.

Nodes implement the same :class:`~xorder.distcore.Lifetime` interface as the
single laws, so orders and asymptotics accept either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import terms as T
from ._logspace import log_cdf_from_lnlc, logsumexp_rows
from .distcore import (
    DISTRIBUTION_TYPES,
    BuiltinTail,
    Exponential,
    GammaInt,
    GenExponential,
    Lifetime,
    PowerOf,
    TailPowerOf,
    UQuadratic,
    Weibull,
    evaluate,
)
from .documents import _dist, validate
from .errors import (
    ConstraintViolation,
    DepthError,
    NoExponentialAsymptoteError,
    UnsupportedDependenceError,
    ValidationError,
)

__all__ = [
    "FGM",
    "Component",
    "Independent",
    "Max",
    "Min",
    "SystemSpec",
    "TailLeadingTerm",
    "build_system",
    "evaluate_system",
    "leading_asymptote",
    "tail_series",
]

MAX_DEPTH = 2
FGM_SLACK = 1e-12


@dataclass(frozen=True)
class Independent:
    def to_doc(self):
        return {"type": "independent"}


@dataclass(frozen=True)
class FGM:
    """Pairwise coefficients, stored as the strict upper triangle row by row."""

    c: tuple[tuple[float, ...], ...]

    @classmethod
    def from_matrix(cls, rows, k: int) -> "FGM":
        rows = [list(map(float, r)) for r in rows]
        if len(rows) == k and all(len(r) == k for r in rows):
            upper = tuple(tuple(rows[i][i + 1 :]) for i in range(k - 1))
        elif [len(r) for r in rows] in ([k - 1 - i for i in range(k - 1)], [k - 1 - i for i in range(k)]):
            upper = tuple(tuple(r) for r in rows[: k - 1])
        else:
            raise ValidationError(
                f"fgm c must be a {k}x{k} matrix or a ragged upper triangle with row lengths "
                f"{list(range(k - 1, 0, -1))}"
            )
        if not all(math.isfinite(v) for r in upper for v in r):
            raise ValidationError("fgm c entries must be finite")
        return cls(upper)

    def pairs(self):
        for i, row in enumerate(self.c):
            for off, cij in enumerate(row):
                if cij != 0.0:
                    yield i, i + 1 + off, cij

    @property
    def total(self) -> float:
        return sum(abs(v) for r in self.c for v in r)

    def to_doc(self):
        return {"type": "fgm", "c": [list(r) for r in self.c]}


Dependence = Independent | FGM


class _Node(Lifetime):
    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class Component(_Node):
    dist: Lifetime

    def __post_init__(self):
        if not isinstance(self.dist, DISTRIBUTION_TYPES):
            raise ValidationError("component must wrap a distribution spec")

    @property
    def closed_form_quantile(self):
        return self.dist.closed_form_quantile

    def _log_tail(self, x):
        return self.dist._log_tail(x)

    def _lnlc(self, x):
        return self.dist._lnlc(x)

    def _log_pdf(self, x):
        return self.dist._log_pdf(x)

    def _inv_log_tail(self, lt):
        return self.dist._inv_log_tail(lt)

    def _inv_lnlc(self, m):
        return self.dist._inv_lnlc(m)

    def support(self):
        return self.dist.support()

    def scale_signature(self):
        return self.dist.scale_signature()

    def rescaled(self, k):
        return Component(self.dist.rescaled(k))

    def to_doc(self):
        return {"op": "component", "distribution": self.dist.to_doc()}


def _wrap(child) -> _Node:
    if isinstance(child, _Node):
        return child
    if isinstance(child, DISTRIBUTION_TYPES):
        return Component(child)
    raise ValidationError(f"system child must be a node or distribution, got {type(child).__name__}")


def _sort_key(sig):
    key, rates = sig
    return (repr(_rounded(key)), tuple(round(r, 12) for r in rates))


def _rounded(obj):
    if isinstance(obj, tuple):
        return tuple(_rounded(v) for v in obj)
    if isinstance(obj, float):
        return float(f"{obj:.10g}")
    return obj


@dataclass(frozen=True)
class _Composite(_Node):
    children: tuple
    dependence: Dependence = field(default_factory=Independent)
    op = ""

    def __post_init__(self):
        kids = tuple(_wrap(c) for c in self.children)
        if not kids:
            raise ValidationError(f"{self.op} node needs at least one component")
        object.__setattr__(self, "children", kids)
        if self.depth() > MAX_DEPTH:
            raise DepthError(f"system tree depth {self.depth()} exceeds the supported {MAX_DEPTH}")
        if isinstance(self.dependence, FGM):
            self._check_fgm()
        elif not isinstance(self.dependence, Independent):
            raise ValidationError("dependence must be Independent or FGM")

    def _check_fgm(self):
        raise UnsupportedDependenceError(f"F-G-M dependence is only supported on max nodes, not {self.op}")

    def depth(self) -> int:
        return 1 + max(c.depth() for c in self.children)

    def support(self):
        los, his = zip(*(c.support() for c in self.children))
        return (min(los), max(his)) if self.op == "max" else (min(los), min(his))

    def scale_signature(self):
        sigs = [c.scale_signature() for c in self.children]
        if isinstance(self.dependence, Independent):
            sigs.sort(key=_sort_key)
            dep = ("independent",)
        else:
            dep = ("fgm", self.dependence.c)
        key = (self.op, dep, tuple(k for k, _ in sigs))
        rates = tuple(r for _, rs in sigs for r in rs)
        return key, rates

    def rescaled(self, k):
        return type(self)(tuple(c.rescaled(k) for c in self.children), self.dependence)

    def to_doc(self):
        return {
            "op": self.op,
            "components": [c.to_doc() for c in self.children],
            "dependence": self.dependence.to_doc(),
        }


class Max(_Composite):
    op = "max"

    def _check_fgm(self):
        k = len(self.children)
        c = self.dependence.c
        if len(c) != k - 1 or any(len(r) != k - 1 - i for i, r in enumerate(c)):
            raise ValidationError(f"fgm coefficients do not match {k} components")
        for child in self.children:
            if not (isinstance(child, Component) and isinstance(child.dist, (Exponential, Weibull))):
                raise UnsupportedDependenceError(
                    "F-G-M dependence requires exponential or Weibull component leaves"
                )
        total = self.dependence.total
        if total > 1.0 + FGM_SLACK:
            raise ConstraintViolation(
                f"F-G-M coefficients sum to sum |c_ij| = {total:.6g} > 1; the model requires sum |c_ij| <= 1"
            )

    def _fgm_terms(self, x):
        lt = np.stack([np.broadcast_to(c._log_tail(x), np.shape(x)) for c in self.children])
        m = np.stack([np.broadcast_to(c._lnlc(x), np.shape(x)) for c in self.children])
        return lt, m

    def _lnlc(self, x):
        if isinstance(self.dependence, Independent):
            return logsumexp_rows(np.stack([np.broadcast_to(c._lnlc(x), np.shape(x)) for c in self.children]), 0)
        lt, m = self._fgm_terms(x)
        lsum = logsumexp_rows(m, 0)
        # S = sum c_ij T_i T_j; sr = S / (-log prod F_i)
        s = np.zeros(np.shape(x))
        sr = np.zeros(np.shape(x))
        for i, j, cij in self.dependence.pairs():
            s = s + cij * np.exp(lt[i] + lt[j])
            sr = sr + cij * np.exp(lt[i] + lt[j] - lsum)
        small = np.abs(s) < 1e-5
        with np.errstate(invalid="ignore"):
            q = np.where(small, sr * (1.0 - s / 2.0 + s * s / 3.0), np.log1p(s) * np.exp(-lsum))
            out = lsum + np.log1p(-q)
        # F = 0 already from the margins (x = 0), whatever the copula factor
        return np.where(np.isposinf(lsum), np.inf, out)

    def _log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        shape = np.shape(x)
        lf = np.stack([np.broadcast_to(c._log_pdf(x), shape) for c in self.children])
        m = np.stack([np.broadcast_to(c._lnlc(x), shape) for c in self.children])
        log_F = log_cdf_from_lnlc(m)
        total_F = np.sum(log_F, axis=0)
        k = len(self.children)
        # explicit products (not total minus own) so that log F_i = -inf at x = 0 stays exact
        parts = np.stack([lf[i] + np.sum(np.delete(log_F, i, axis=0), axis=0) for i in range(k)])
        head = logsumexp_rows(parts, 0)
        if isinstance(self.dependence, Independent):
            return head
        lt = np.stack([np.broadcast_to(c._log_tail(x), shape) for c in self.children])
        s = np.zeros(shape)
        ratio = np.zeros(shape)
        for i, j, cij in self.dependence.pairs():
            s = s + cij * np.exp(lt[i] + lt[j])
        base = head + np.log1p(s)
        for i, j, cij in self.dependence.pairs():
            ratio = ratio - cij * (np.exp(total_F + lf[i] + lt[j] - base) + np.exp(total_F + lt[i] + lf[j] - base))
        out = base + np.log1p(np.maximum(ratio, -1.0))
        return np.where(np.isneginf(head), -np.inf, out)


class Min(_Composite):
    op = "min"

    def _log_tail(self, x):
        return np.sum(np.stack([np.broadcast_to(c._log_tail(x), np.shape(x)) for c in self.children]), axis=0)

    def _log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        shape = np.shape(x)
        lf = np.stack([np.broadcast_to(c._log_pdf(x), shape) for c in self.children])
        lt = np.stack([np.broadcast_to(c._log_tail(x), shape) for c in self.children])
        k = len(self.children)
        parts = np.stack([lf[i] + np.sum(np.delete(lt, i, axis=0), axis=0) for i in range(k)])
        return logsumexp_rows(parts, 0)


SystemSpec = Component | Max | Min


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def build_system(document) -> SystemSpec:
    """Validate a system document (or a bare distribution document) into a node."""
    validate(document, "system")
    return _node(document)


def _node(doc) -> SystemSpec:
    if "family" in doc:
        return Component(_dist(doc))
    op = doc["op"]
    if op == "component":
        return Component(_dist(doc["distribution"]))
    children = tuple(_node(c) for c in doc["components"])
    dep_doc = doc.get("dependence", {"type": "independent"})
    dependence: Dependence = Independent()
    if dep_doc["type"] == "fgm":
        if op != "max":
            raise UnsupportedDependenceError("F-G-M dependence is only supported on max nodes")
        dependence = FGM.from_matrix(dep_doc["c"], len(children))
    return (Max if op == "max" else Min)(children, dependence)


def evaluate_system(sys: Lifetime, x, functional: str):
    return evaluate(sys, x, functional)


# ---------------------------------------------------------------------------
# Leading tail asymptotes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailLeadingTerm:
    """tail(x) ~ coefficient * x**degree * exp(-sum mu * x**alpha over decay)."""

    coefficient: float
    degree: float
    decay: tuple[tuple[float, float], ...]

    @property
    def alpha(self) -> float:
        return self.decay[0][0]

    @property
    def rate(self) -> float:
        """lambda with (lambda x)^alpha equal to the top decay power."""
        alpha, mu = self.decay[0]
        return mu ** (1.0 / alpha)

    @property
    def single_power(self) -> bool:
        return len(self.decay) == 1

    def log_value(self, x):
        x = np.asarray(x, dtype=float)
        out = math.log(self.coefficient) + self.degree * np.log(x)
        for alpha, mu in self.decay:
            out = out - mu * x**alpha
        return out

    def to_doc(self):
        return {
            "N": self.coefficient,
            "p": self.degree,
            "rate": self.rate,
            "alpha": self.alpha,
            "decay": [list(d) for d in self.decay],
        }


def _leaf_series(d: Lifetime) -> T.Series:
    if isinstance(d, Exponential):
        return T.Series((T.Term(1.0, 0.0, ((1.0, d.rate),)),))
    if isinstance(d, Weibull):
        return T.Series((T.Term(1.0, 0.0, ((d.shape, d.rate**d.shape),)),))
    if isinstance(d, GammaInt):
        return T.Series.of(
            T.Term(d.rate**ell / math.factorial(ell), float(ell), ((1.0, d.rate),)) for ell in range(d.shape)
        )
    if isinstance(d, GenExponential):
        return T.complement_power(_leaf_series(Exponential(d.rate)), d.shape)
    if isinstance(d, PowerOf):
        return T.complement_power(_leaf_series(d.base), d.exponent)
    if isinstance(d, TailPowerOf):
        return _leaf_series(d.base).power(d.exponent)
    if isinstance(d, (UQuadratic, BuiltinTail)):
        raise NoExponentialAsymptoteError(f"{d.family} tail has no exponential-type expansion")
    raise NoExponentialAsymptoteError(f"unsupported law {type(d).__name__}")


def tail_series(sys: Lifetime) -> T.Series:
    """Asymptotic expansion of the tail as a finite sum of exponential-type terms."""
    if isinstance(sys, Component):
        return _leaf_series(sys.dist)
    if isinstance(sys, DISTRIBUTION_TYPES):
        return _leaf_series(sys)
    if isinstance(sys, Min):
        out = T.ONE
        for c in sys.children:
            out = out * tail_series(c)
        return out
    if isinstance(sys, Max):
        cdf = T.ONE
        for c in sys.children:
            cdf = cdf * (T.ONE - tail_series(c))
        if isinstance(sys.dependence, FGM):
            tails = [tail_series(c) for c in sys.children]
            s = T.Series(())
            for i, j, cij in sys.dependence.pairs():
                s = s + (tails[i] * tails[j]).scale(cij)
            cdf = cdf * (T.ONE + s)
        return T.ONE - cdf
    raise NoExponentialAsymptoteError(f"unsupported system node {type(sys).__name__}")


def leading_asymptote(sys: Lifetime) -> TailLeadingTerm:
    series = tail_series(sys)
    if not series.terms:
        raise NoExponentialAsymptoteError("tail expansion cancelled to zero")
    lead = series.lead
    if not lead.decay or lead.coef <= 0:
        raise NoExponentialAsymptoteError("tail expansion has no decaying positive leading term")
    return TailLeadingTerm(lead.coef, lead.degree, lead.decay)
