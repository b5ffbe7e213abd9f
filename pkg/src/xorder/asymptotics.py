"""Tail variation classes, asymptotic lines, tail-ratio limits and the comparability pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distcore import BuiltinTail, Lifetime, UQuadratic, scale_equivalent
from .errors import NoExponentialAsymptoteError, ValidationError, XOrderError
from .limits import LimitEstimate, geometric_sequence, sequence_limit
from .orders import Evidence, SweepConfig, composition, convex_order_test, star_order_test
from .systems import Component, TailLeadingTerm, leading_asymptote

__all__ = [
    "ComparisonVerdict",
    "LinearAsymptote",
    "SandwichResult",
    "VariationClass",
    "asymptotic_line",
    "classify_variation",
    "decide_comparability",
    "density_sandwich_check",
    "erpv_probe",
    "line_verdict",
    "locate_sandwich_threshold",
    "tail_ratio_limit",
    "variation_ratio_limit",
]

SV_BAND = 0.02
ONE_TOL = 1e-3
TAIL_RATIO_XMAX = 1e6
MATCH_TOL = 1e-9


def _log_tail_fn(tail) -> Callable:
    """Accept a law/system (its log-tail is used) or a callable returning tail values."""
    if isinstance(tail, Lifetime):
        return tail.log_tail
    if callable(tail):
        def fn(x):
            with np.errstate(divide="ignore"):
                return np.log(np.asarray(tail(x), dtype=float))
        return fn
    raise ValidationError("expected a lifetime law or a callable tail")


def _ratio_limit(log_num, log_den, xs) -> LimitEstimate:
    def diff(x):
        a, b = np.asarray(log_num(x), dtype=float), np.asarray(log_den(x), dtype=float)
        out = a - b
        # both sides underflowed: no information at that probe
        return np.where(np.isneginf(a) & np.isneginf(b), np.nan, out)

    return sequence_limit(diff, xs)


def variation_ratio_limit(tail, lam: float, xs=None) -> LimitEstimate:
    """lim tail(lam x) / tail(x) along a geometric sequence."""
    if not lam > 0:
        raise ValidationError("lambda must be positive")
    f = _log_tail_fn(tail)
    xs = geometric_sequence() if xs is None else np.asarray(xs, dtype=float)
    return _ratio_limit(lambda x: f(lam * x), f, xs)


def erpv_probe(tail, delta: float = 1.0, xs=None) -> LimitEstimate:
    """lim tail(x + delta) / tail(x); a limit of 1 rules out ERPV."""
    if delta == 0:
        raise ValidationError("shift must be nonzero")
    f = _log_tail_fn(tail)
    xs = geometric_sequence() if xs is None else np.asarray(xs, dtype=float)
    return _ratio_limit(lambda x: f(x + delta), f, xs)


def tail_ratio_limit(F, G, c: float, xs=None, x_max: float = TAIL_RATIO_XMAX) -> LimitEstimate:
    """lim tail_F(x) / tail_G(c x)."""
    if not c > 0:
        raise ValidationError("c must be positive")
    f, g = _log_tail_fn(F), _log_tail_fn(G)
    xs = geometric_sequence(x_max=x_max) if xs is None else np.asarray(xs, dtype=float)
    return _ratio_limit(f, lambda x: g(c * x), xs)


# ---------------------------------------------------------------------------
# Variation classes
# ---------------------------------------------------------------------------

LABELS = ("SlowlyVarying", "RegularlyVarying", "RapidlyVaryingMinusInf", "ERPVMinusInf", "Unknown")


@dataclass(frozen=True)
class VariationClass:
    label: str
    origin: str  # "analytic" | "estimate"
    index: float | None = None
    index_error: float | None = None
    erpv: bool | None = None  # None: consistent with ERPV but not certified

    @property
    def rapidly_varying(self) -> bool:
        return self.label in ("RapidlyVaryingMinusInf", "ERPVMinusInf")

    def to_doc(self) -> dict:
        short = {
            "SlowlyVarying": "sv",
            "RegularlyVarying": "rv",
            "RapidlyVaryingMinusInf": "rpv_minus_inf",
            "ERPVMinusInf": "erpv_minus_inf",
            "Unknown": "unknown",
        }[self.label]
        return {
            "class": short,
            "origin": self.origin,
            "index": self.index,
            "index_error": self.index_error,
            "erpv": self.erpv,
        }


def analytic_is_erpv(term: TailLeadingTerm) -> bool:
    """exp(-mu x^alpha) loses a fixed factor under a unit shift only when alpha >= 1."""
    return term.alpha >= 1.0


def _analytic_class(spec: Lifetime) -> VariationClass | None:
    if isinstance(spec, Component):
        spec = spec.dist
    if isinstance(spec, UQuadratic):
        return VariationClass("Unknown", "analytic")
    if isinstance(spec, BuiltinTail):
        return None
    try:
        lead = leading_asymptote(spec)
    except NoExponentialAsymptoteError:
        return None
    if analytic_is_erpv(lead):
        return VariationClass("ERPVMinusInf", "analytic", erpv=True)
    return VariationClass("RapidlyVaryingMinusInf", "analytic", erpv=False)


def classify_variation(tail) -> VariationClass:
    """Analytic tag for known families and systems, numeric estimate otherwise."""
    if isinstance(tail, Lifetime):
        tagged = _analytic_class(tail)
        if tagged is not None:
            return tagged
        if math.isfinite(tail.support()[1]):
            return VariationClass("Unknown", "analytic")
    up = variation_ratio_limit(tail, 2.0)
    down = variation_ratio_limit(tail, 0.5)
    if up.kind == "zero" and down.kind == "infinite":
        probe = erpv_probe(tail, 1.0)
        not_erpv = probe.kind == "finite" and abs(probe.value - 1.0) <= ONE_TOL
        return VariationClass("RapidlyVaryingMinusInf", "estimate", erpv=False if not_erpv else None)
    if up.kind == "finite" and down.kind == "finite" and up.converged and down.converged:
        rho_up = up.log_value / math.log(2.0)
        rho_down = down.log_value / math.log(0.5)
        rho = 0.5 * (rho_up + rho_down)
        err = abs(rho_up - rho_down) + (up.error + down.error) / math.log(2.0)
        if abs(rho) <= SV_BAND:
            return VariationClass("SlowlyVarying", "estimate", 0.0, err, erpv=False)
        return VariationClass("RegularlyVarying", "estimate", rho, err, erpv=False)
    return VariationClass("Unknown", "estimate")


# ---------------------------------------------------------------------------
# Asymptotic lines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearAsymptote:
    b: float
    c: float
    converged: bool
    residuals: tuple[float, ...]
    xs: tuple[float, ...]
    pick: int

    def to_doc(self) -> dict:
        return {"b": self.b, "c": self.c, "converged": self.converged, "x_pick": self.xs[self.pick]}


def asymptotic_line(h: Callable, x0: float = 1.0, n: int = 41, tol: float = 1e-6) -> LinearAsymptote:
    """Slope and intercept of the line h approaches at infinity.

    Secants b_j = (h(2x) - h(x)) / x and intercepts c_j = 2 h(x) - h(2x) are
    taken along x_j = x0 2^j. Intercepts converge while rounding in h grows
    with x, so the reported pair is the one with the smallest local change
    |c_{j+1} - c_j| + |c_j - c_{j-1}| plus the expected rounding of c_j.
    """
    xs = geometric_sequence(x0, n + 1)
    hv = _probe(h, xs)
    ok = np.isfinite(hv)
    if not ok[:4].all():
        return LinearAsymptote(math.nan, math.nan, False, (), tuple(xs.tolist()), 0)
    last = int(np.argmin(ok)) if not ok.all() else len(xs)
    xs, hv = xs[:last], hv[:last]
    b = (hv[1:] - hv[:-1]) / xs[:-1]
    c = 2.0 * hv[:-1] - hv[1:]
    res = np.abs(np.diff(c))
    # rounding in c_j grows like eps * |h(2 x_j)|; charge it so that exact ties favour small x
    noise = 8.0 * np.finfo(float).eps * np.abs(hv[1:])
    local = res[1:] + res[:-1] + noise[1:-1]
    if local.size == 0:
        return LinearAsymptote(float(b[-1]), float(c[-1]), False, tuple(res.tolist()), tuple(xs[:-1].tolist()), len(b) - 1)
    j = int(np.argmin(local)) + 1
    scale = max(1.0, abs(c[j]))
    window = res[max(0, j - 3) : j]
    slack = 1e-12 * scale
    monotone = window.size >= 1 and bool(np.all(np.diff(window) <= slack))
    converged = bool(local[j - 1] < tol * scale and monotone)
    return LinearAsymptote(float(b[j]), float(c[j]), converged, tuple(res.tolist()), tuple(xs[:-1].tolist()), j)


def _probe(h, xs) -> np.ndarray:
    """h on xs; points where h cannot be evaluated (unbracketed quantiles) become nan."""
    with np.errstate(all="ignore"):
        try:
            return np.asarray(h(xs), dtype=float)
        except XOrderError:
            out = np.full(xs.shape, np.nan)
            for i, x in enumerate(xs):
                try:
                    out[i] = float(h(np.array([x]))[0])
                except XOrderError:
                    break
            return out


def line_verdict(asymptote: LinearAsymptote, h_linear: bool, tol: float = 1e-6) -> str:
    if not asymptote.converged:
        return "Inconclusive"
    if h_linear:
        return "Inconclusive"
    if asymptote.c > tol:
        return "NotConvex"
    if asymptote.c < -tol:
        return "NotConcave"
    return "NeitherConvexNorConcave"


def is_linear(h: Callable, lo: float, hi: float, n: int = 256, rel_tol: float = 1e-8) -> bool:
    xs = np.linspace(lo, hi, n)
    hv = np.asarray(h(xs), dtype=float)
    s = np.diff(hv) / np.diff(xs)
    return bool(np.all(np.isfinite(s)) and np.ptp(s) <= rel_tol * max(1.0, float(np.max(np.abs(s)))))


# ---------------------------------------------------------------------------
# Density sandwich
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SandwichResult:
    passed: bool
    first_failure: float | None
    side: str | None  # "lower" | "upper"
    grid: dict

    def to_doc(self):
        return {"passed": self.passed, "first_failure": self.first_failure, "side": self.side, "grid": self.grid}


def default_sandwich_grid(A: float, n: int = 1000) -> np.ndarray:
    return np.linspace(A, max(10.0 * A, A + 50.0), n)


def density_sandwich_check(f: Lifetime, g: Lifetime, c: float, eps: float, A: float, grid=None, slack: float = 1e-12) -> SandwichResult:
    """c g(c x + eps) <= f(x) <= c g(c x - eps) on ``grid`` within [A, inf), in log space."""
    if not (c > 0 and eps > 0):
        raise ValidationError("density sandwich needs c > 0 and eps > 0")
    xs = default_sandwich_grid(A) if grid is None else np.asarray(grid, dtype=float)
    if np.any(xs < A):
        raise ValidationError("sandwich grid must lie in [A, inf)")
    lf = np.asarray(f.log_pdf(xs))
    lc = math.log(c)
    low = lc + np.asarray(g.log_pdf(c * xs + eps))
    high = lc + np.asarray(g.log_pdf(np.maximum(c * xs - eps, 0.0)))
    tol = slack * np.maximum(1.0, np.abs(np.where(np.isfinite(lf), lf, 0.0)))
    bad_low = low > lf + tol
    bad_high = lf > high + tol
    bad = bad_low | bad_high
    gd = {"lo": float(xs[0]), "hi": float(xs[-1]), "n": int(xs.size)}
    if not bad.any():
        return SandwichResult(True, None, None, gd)
    i = int(np.argmax(bad))
    return SandwichResult(False, float(xs[i]), "lower" if bad_low[i] else "upper", gd)


def locate_sandwich_threshold(f, g, c, eps, candidates=None) -> float | None:
    """Smallest candidate A at which the sandwich holds on its default grid."""
    candidates = np.arange(0.0, 201.0, 1.0) if candidates is None else candidates
    for A in candidates:
        if density_sandwich_check(f, g, c, eps, float(A)).passed:
            return float(A)
    return None


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


@dataclass
class ComparisonVerdict:
    relation: str
    candidate_c: float | None
    evidence: list[Evidence] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def decisive(self) -> bool:
        return self.relation != "inconclusive"

    def to_doc(self) -> dict:
        return {
            "relation": self.relation,
            "candidate_c": self.candidate_c,
            "evidence": [e.to_doc() for e in self.evidence],
            "diagnostics": self.diagnostics,
        }


def candidate_c(lx: TailLeadingTerm, ly: TailLeadingTerm) -> tuple[float, bool, str]:
    """c with tail_X(x) ~ tail_Y(c x) at leading order, and whether the terms match."""
    c = lx.rate / ly.rate
    if not (lx.single_power and ly.single_power):
        return c, False, "leading decay mixes several powers of x"
    if not math.isclose(lx.alpha, ly.alpha, rel_tol=1e-12):
        return c, False, f"leading shapes differ (alpha {lx.alpha:.6g} vs {ly.alpha:.6g})"
    if not math.isclose(lx.degree, ly.degree, rel_tol=1e-12, abs_tol=1e-12):
        return c, False, f"polynomial degrees differ ({lx.degree:g} vs {ly.degree:g})"
    ratio = lx.coefficient / (ly.coefficient * c**ly.degree)
    if abs(ratio - 1.0) > MATCH_TOL:
        return c, False, f"coefficient ratio after rescaling is {ratio:.6g}, not 1"
    return c, True, "leading terms match"


def _sweep_verdict(X, Y, config, verdict: ComparisonVerdict) -> ComparisonVerdict:
    res = convex_order_test(X, Y, config=config)
    verdict.evidence.extend(res.evidence)
    verdict.diagnostics["convex_sweep"] = {
        "relation": res.relation,
        "forward_checked": res.forward.checked,
        "reverse_checked": res.reverse.checked,
    }
    if res.relation == "non_comparable":
        verdict.relation = "non_comparable"
    elif res.relation == "le_convex":
        verdict.relation = "le_convex"
    elif res.relation == "ge_convex":
        verdict.relation = "ge_convex"
    else:
        # both directions survive: check the weaker order before calling it equivalent
        fwd = star_order_test(X, Y, config=config)
        rev = star_order_test(Y, X, config=config)
        verdict.evidence.extend(fwd.witnesses + rev.witnesses)
        verdict.relation = "equivalent" if fwd.holds and rev.holds else "inconclusive"
    return verdict


def decide_comparability(X: Lifetime, Y: Lifetime, config: SweepConfig | None = None) -> ComparisonVerdict:
    """Convex-order comparability of two laws or systems.

    Order of checks: scale equivalence; matched leading tail terms with
    ERPV tails and a tail-ratio limit of 1 (non-comparable); matched terms
    without ERPV go through the asymptotic line of h; everything else falls
    back to sign-pattern sweeps.
    """
    config = config or SweepConfig()
    diag: dict = {}
    verdict = ComparisonVerdict("inconclusive", None, [], diag)

    k = scale_equivalent(X, Y)
    if k is not None:
        verdict.relation = "scale_equivalent"
        verdict.candidate_c = k
        diag["route"] = "scale_equivalence"
        diag["k"] = k
        return verdict

    try:
        lx, ly = leading_asymptote(X), leading_asymptote(Y)
    except NoExponentialAsymptoteError as exc:
        diag["route"] = "sweep"
        diag["asymptote_refused"] = str(exc)
        return _sweep_verdict(X, Y, config, verdict)

    c, matched, why = candidate_c(lx, ly)
    verdict.candidate_c = c
    diag["leading_terms"] = {"lhs": lx.to_doc(), "rhs": ly.to_doc()}
    diag["match"] = {"matched": matched, "reason": why}
    erpv = analytic_is_erpv(lx) and analytic_is_erpv(ly)
    diag["erpv"] = erpv

    h = composition(X, Y)
    if matched and erpv:
        lim = tail_ratio_limit(X, Y, c)
        diag["tail_ratio"] = lim.to_doc()
        verdict.evidence.append(
            Evidence("tail_ratio", f"tail_X(x) / tail_Y({c:.6g} x) -> {lim.value:.6g}", {"c": c, **lim.to_doc()})
        )
        if lim.kind == "finite" and abs(lim.value - 1.0) <= ONE_TOL:
            line = asymptotic_line(h)
            diag["asymptotic_line"] = line.to_doc()
            # tail_X(x) ~ tail_Y(c x) means h(x) ~ c x
            verdict.evidence.append(
                Evidence("asymptotic_line", f"h(x) - ({line.b:.6g} x + {line.c:.3g}) -> 0", line.to_doc())
            )
            diag["route"] = "tail_ratio"
            diag["corroborated"] = bool(
                line.converged and abs(line.b - c) <= ONE_TOL * max(1.0, c) and abs(line.c) <= ONE_TOL
            )
            verdict.relation = "non_comparable"
            return verdict

    if matched:
        line = asymptotic_line(h)
        lin = is_linear(h, *_probe_span(X))
        lv = line_verdict(line, lin)
        diag["asymptotic_line"] = {**line.to_doc(), "verdict": lv}
        verdict.evidence.append(Evidence("asymptotic_line", f"asymptotic line verdict {lv}", {**line.to_doc(), "verdict": lv}))
        if lv == "NeitherConvexNorConcave":
            diag["route"] = "asymptotic_line"
            verdict.relation = "non_comparable"
            return verdict

    diag["route"] = "sweep"
    return _sweep_verdict(X, Y, config, verdict)


def _probe_span(X: Lifetime) -> tuple[float, float]:
    return float(X.quantile(1e-3)), float(X.quantile(1 - 1e-6))

