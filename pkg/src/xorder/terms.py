"""Asymptotic tail expansions as finite sums of exponential-type terms.

A term ``N * x**p * exp(-sum_k mu_k * x**alpha_k)`` is stored with its decay
as ``((alpha, mu), ...)`` sorted by decreasing power. Series are kept sorted
slowest-decaying first and truncated to the leading ``MAX_TERMS``; products
and complements only ever lose terms that are negligible next to the ones
kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cmp_to_key

MAX_TERMS = 12
BINOMIAL_ORDER = 8
_REL = 1e-12


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=_REL, abs_tol=1e-14)


@dataclass(frozen=True)
class Term:
    coef: float
    degree: float
    decay: tuple[tuple[float, float], ...] = ()


def _merge_decay(d1, d2, sign=1.0):
    out: list[list[float]] = [list(p) for p in d1]
    for alpha, mu in d2:
        for entry in out:
            if _close(entry[0], alpha):
                entry[1] += sign * mu
                break
        else:
            out.append([alpha, sign * mu])
    kept = [(a, m) for a, m in out if not _close(m, 0.0)]
    return tuple(sorted(kept, key=lambda p: -p[0]))


def compare_decay(d1, d2) -> int:
    """-1 if d1 decays slower than d2, 1 if faster, 0 if equal."""
    diff = _merge_decay(d1, d2, sign=-1.0)
    if not diff:
        return 0
    # leading power of the difference decides
    return -1 if diff[0][1] < 0 else 1


def compare_terms(t1: Term, t2: Term) -> int:
    c = compare_decay(t1.decay, t2.decay)
    if c:
        return c
    if _close(t1.degree, t2.degree):
        return 0
    return -1 if t1.degree > t2.degree else 1


_term_key = cmp_to_key(compare_terms)


def _combine(terms) -> tuple[Term, ...]:
    merged: list[Term] = []
    for term in sorted(terms, key=_term_key):
        if merged and compare_terms(merged[-1], term) == 0:
            last = merged[-1]
            merged[-1] = Term(last.coef + term.coef, last.degree, last.decay)
        else:
            merged.append(term)
    scale = max((abs(t.coef) for t in merged), default=0.0)
    kept = [t for t in merged if abs(t.coef) > 1e-13 * scale]
    return tuple(kept[:MAX_TERMS])


@dataclass(frozen=True)
class Series:
    terms: tuple[Term, ...]

    @classmethod
    def of(cls, terms) -> "Series":
        return cls(_combine(terms))

    @property
    def lead(self) -> Term:
        if not self.terms:
            raise ValueError("empty series has no leading term")
        return self.terms[0]

    def __add__(self, other: "Series") -> "Series":
        return Series.of(self.terms + other.terms)

    def __neg__(self) -> "Series":
        return Series(tuple(Term(-t.coef, t.degree, t.decay) for t in self.terms))

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        return Series.of(
            Term(a.coef * b.coef, a.degree + b.degree, _merge_decay(a.decay, b.decay))
            for a in self.terms
            for b in other.terms
        )

    def scale(self, k: float) -> "Series":
        return Series.of(Term(k * t.coef, t.degree, t.decay) for t in self.terms)

    def power(self, t: float) -> "Series":
        """Series for self**t; leading coefficient must be positive for real t."""
        if float(t).is_integer() and 0 < t <= BINOMIAL_ORDER:
            out = self
            for _ in range(int(t) - 1):
                out = out * self
            return out
        lead = self.lead
        if lead.coef <= 0:
            raise ValueError("real power of a series with nonpositive leading coefficient")
        rest = Series.of(
            Term(
                term.coef / lead.coef,
                term.degree - lead.degree,
                _merge_decay(term.decay, lead.decay, sign=-1.0),
            )
            for term in self.terms[1:]
        )
        head = Series((Term(lead.coef**t, lead.degree * t, tuple((a, m * t) for a, m in lead.decay)),))
        return head * binomial_series(rest, t)


ONE = Series((Term(1.0, 0.0, ()),))


def binomial_series(u: Series, t: float) -> Series:
    """(1 + u)**t for a series u that vanishes at infinity."""
    total = ONE
    power = ONE
    coef = 1.0
    for j in range(1, BINOMIAL_ORDER + 1):
        coef *= (t - (j - 1)) / j
        if coef == 0.0:
            break
        power = power * u
        if not power.terms:
            break
        total = total + power.scale(coef)
    return total


def complement_power(tail: Series, t: float) -> Series:
    """Tail series of F**t given the tail series of F: 1 - (1 - T)**t."""
    return ONE - binomial_series(-tail, t)
