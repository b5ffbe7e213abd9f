"""The fixture matrix behind ``xorder fixtures``.

Each fixture recomputes one published claim (or one trivial sanity case)
with the current numerical settings and compares it with the expected
outcome. Expected numbers live here; nothing is read back from earlier runs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .asymptotics import (
    asymptotic_line,
    classify_variation,
    decide_comparability,
    density_sandwich_check,
    erpv_probe,
    line_verdict,
    tail_ratio_limit,
)
from .distcore import BuiltinTail, Exponential, GammaInt, GenExponential, PowerOf, TailPowerOf, UQuadratic, Weibull
from .errors import ConfigurationError, ConstraintViolation
from .limits import geometric_sequence, sequence_limit
from .orders import (
    PowerFamily,
    ScaleFamily,
    SweepConfig,
    composition,
    convex_order_test,
    quantile_compose,
    saunders_moran_D,
    shape_probe,
    sm_order_test,
    star_order_test,
)
from .systems import FGM, Max, Min, leading_asymptote

E, G, GE, W = Exponential, GammaInt, GenExponential, Weibull


@dataclass(frozen=True)
class RunConfig:
    x_max: float = 1e6
    grid: int = 4096
    tol: float = 1e-9
    a_count: int = 64
    b_count: int = 33
    threads: int | None = None

    def __post_init__(self):
        if self.grid < 64:
            raise ConfigurationError("grid size must be >= 64")
        if not self.x_max > 1:
            raise ConfigurationError("x_max must exceed 1")
        if not self.tol > 0:
            raise ConfigurationError("tolerance must be positive")

    def sweep(self) -> SweepConfig:
        return SweepConfig(
            a_sweep=tuple(np.geomspace(0.05, 20.0, self.a_count)),
            b_count=self.b_count,
            grid_size=self.grid,
            eps=self.tol,
            threads=1,
        )


@dataclass(frozen=True)
class Fixture:
    name: str
    suite: str  # "paper" | "extra"
    claim: str
    run: Callable[[RunConfig], dict]


@dataclass
class Outcome:
    name: str
    passed: bool
    claim: str
    observed: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_doc(self):
        return {"name": self.name, "passed": self.passed, "claim": self.claim, "observed": self.observed, "failures": self.failures}


class _Check:
    """Collects named comparisons for one fixture."""

    def __init__(self):
        self.observed: dict = {}
        self.failures: list = []

    def close(self, key, value, expected, tol):
        self.observed[key] = value
        if not (value is not None and math.isfinite(value) and abs(value - expected) <= tol):
            self.failures.append(f"{key}: expected {expected} +- {tol}, got {value}")

    def equal(self, key, value, expected):
        self.observed[key] = value
        if value != expected:
            self.failures.append(f"{key}: expected {expected!r}, got {value!r}")

    def result(self):
        return {"observed": self.observed, "failures": self.failures}


def _deriv(h, x, step=1e-5):
    return float((h(np.array([x + step]))[0] - h(np.array([x - step]))[0]) / (2 * step))


# -- transform orders ---------------------------------------------------------


def _c21_constant(cfg):
    ck = _Check()
    Wb = W(2.0)
    h = composition(PowerOf(Wb, 2), Wb)
    ck.close("h(1)", float(h(1.0)), 0.714227, 1e-6)
    ck.close("h'(1)", _deriv(h, 1.0), 1.08453, 1e-3)
    ck.close("h'(0+)", _deriv(h, 1e-4, 1e-6), 0.0, 1e-3)
    ck.close("h'(inf)", _deriv(h, 50.0, 1e-3), 1.0, 1e-3)
    return ck.result()


def _c21_shape(cfg):
    ck = _Check()
    Wb = W(2.0)
    X, Y = PowerOf(Wb, 2), Wb
    xs = np.geomspace(float(X.quantile(1e-6)), float(X.quantile(1 - 1e-10)), cfg.grid)
    ck.equal("convex_shape", shape_probe(xs, quantile_compose(X, Y, xs), "convex", rel_tol=max(cfg.tol, 1e-8)).value, "Neither")
    return ck.result()


def _weibull_star(alpha, k, m):
    def run(cfg):
        ck = _Check()
        Wb = W(alpha)
        res = star_order_test(PowerOf(Wb, k), PowerOf(Wb, m), config=cfg.sweep())
        ck.equal("star_holds", res.holds, True)
        ck.observed["checked"] = res.checked
        # a violation of the reverse direction must exist unless the laws coincide
        rev = star_order_test(PowerOf(Wb, m), PowerOf(Wb, k), config=cfg.sweep())
        ck.equal("reverse_violated", not rev.holds, True)
        return ck.result()

    return run


def _c21_convex(cfg):
    ck = _Check()
    Wb = W(2.0)
    res = convex_order_test(PowerOf(Wb, 2), Wb, config=cfg.sweep())
    ck.equal("relation", res.relation, "non_comparable")
    ck.observed["witnesses"] = [w.payload["pattern"] for w in res.evidence]
    return ck.result()


def _uquad_star(cfg):
    ck = _Check()
    U = UQuadratic(0.0, 4.0)
    fwd = star_order_test(PowerOf(U, 2), U, config=cfg.sweep())
    rev = star_order_test(U, PowerOf(U, 2), config=cfg.sweep())
    ck.equal("forward_violated", not fwd.holds, True)
    ck.equal("reverse_violated", not rev.holds, True)
    return ck.result()


def _uquad_sm(cfg):
    ck = _Check()
    fam = PowerFamily(UQuadratic(0.0, 4.0))
    ck.close("D(1,4)", saunders_moran_D(fam, 1.0, 4.0), 0.0, 1e-15)
    ck.equal("relation", sm_order_test(fam, 1.0, 2.0).relation, "non_comparable")
    return ck.result()


def _ge_n(cfg):
    ck = _Check()
    fam = PowerFamily(E(1.0))
    # oracle: (e - 1) log(1 - 1/e), evaluated directly
    ck.close("D(1,1)", saunders_moran_D(fam, 1.0, 1.0), (math.e - 1.0) * math.log1p(-math.exp(-1.0)), 1e-12)
    for k, m in ((1, 2), (2, 3), (2, 5)):
        res = sm_order_test(fam, float(k), float(m))
        ck.equal(f"X_{k}:{k} vs X_{m}:{m}", res.relation, "ge_star")
        ck.equal(f"direction_{k}{m}", res.direction, "increasing")
    return ck.result()


def _ge_lambda(cfg):
    ck = _Check()
    fam = ScaleFamily(GE(2.0, 1.0))
    xs = np.linspace(0.05, 10.0, 257)
    d = saunders_moran_D(fam, 2.0, xs)
    ck.equal("D == 1/lambda", bool(np.all(d == 0.5)), True)
    ck.equal("relation", sm_order_test(fam, 1.0, 2.0).relation, "equivalent")
    return ck.result()


def _ge_alpha(cfg):
    ck = _Check()
    fam = PowerFamily(E(1.0))
    ck.equal("relation", sm_order_test(fam, 1.5, 2.5).relation, "ge_star")
    return ck.result()


# -- asymptotic lines and the Kochar-Xu generalization --------------------------


def _c21_line(cfg):
    ck = _Check()
    Wb = W(2.0)
    line = asymptotic_line(composition(PowerOf(Wb, 2), Wb))
    ck.close("b", line.b, 1.0, 1e-3)
    ck.close("c", line.c, 0.0, 1e-3)
    ck.equal("verdict", line_verdict(line, False), "NeitherConvexNorConcave")
    return ck.result()


def _max_min_line(cfg):
    ck = _Check()
    Wb = W(2.0)
    k = 3
    line = asymptotic_line(composition(TailPowerOf(Wb, k), PowerOf(Wb, 2)))
    ck.close("b", line.b, k ** 0.5, 1e-3)
    ck.close("c", line.c, 0.0, 1e-3)
    return ck.result()


def _kochar(lhs, rhs, c_expected):
    def run(cfg):
        ck = _Check()
        X, Y = Max(tuple(E(r) for r in lhs)), Max(tuple(E(r) for r in rhs))
        line = asymptotic_line(composition(X, Y))
        ck.close("b", line.b, c_expected, 1e-3)
        ck.close("c", line.c, 0.0, 1e-3)
        ck.equal("line_verdict", line_verdict(line, False), "NeitherConvexNorConcave")
        v = decide_comparability(X, Y, cfg.sweep())
        ck.equal("relation", v.relation, "non_comparable")
        ck.close("candidate_c", v.candidate_c, c_expected, 1e-9)
        return ck.result()

    return run


def _sandwich(cfg):
    ck = _Check()
    X, Y = Max((E(1), E(2), E(3))), Max((E(1.5), E(2.5)))
    ck.equal("passes_at_A=40", density_sandwich_check(X, Y, 1 / 1.5, 0.01, 40.0).passed, True)
    ck.equal("equal_laws_c=2_fails", density_sandwich_check(E(1), E(1), 2.0, 0.01, 40.0).passed, False)
    return ck.result()


# -- variation classes -------------------------------------------------------------


def _tails(cfg):
    ck = _Check()
    ck.equal("inv_log", classify_variation(BuiltinTail("inv_log")).label, "SlowlyVarying")
    rv = classify_variation(BuiltinTail("inv_quadratic"))
    ck.equal("inv_quadratic", rv.label, "RegularlyVarying")
    ck.close("inv_quadratic_index", rv.index, -2.0, 0.05)
    rp = classify_variation(BuiltinTail("exp_log_squared"))
    ck.equal("exp_log_squared", rp.label, "RapidlyVaryingMinusInf")
    ck.equal("exp_log_squared_erpv", rp.erpv, False)
    ck.close("erpv_probe", erpv_probe(BuiltinTail("exp_log_squared"), 1.0).value, 1.0, 1e-3)
    ck.equal("exponential", classify_variation(E(1.0)).label, "ERPVMinusInf")
    return ck.result()


def _eq_rv(cfg):
    """f = 1 / tail of Exp(1) is RPV(+inf); phi(x) = 1.1 x, psi(x) = x."""
    ck = _Check()
    xs = np.linspace(1.0, 200.0, 2000)
    log_f = lambda x: -np.asarray(E(1.0).log_tail(x))
    log_ratio = log_f(1.1 * xs) - log_f(xs)
    above = log_ratio > math.log(1e6)
    hit = float(xs[np.argmax(above)]) if above.any() else None
    ck.equal("ratio exceeds 1e6 before x = 200", hit is not None, True)
    ck.observed["first_x"] = hit
    return ck.result()


def _corollary_rv(cfg):
    ck = _Check()
    f = BuiltinTail("inv_quadratic")
    for b, c in ((1.0, 2.0), (3.0, 1.0)):
        lim = sequence_limit(lambda x: f.log_tail(b * x + np.sqrt(x)) - f.log_tail(c * x), geometric_sequence())
        expected = (b / c) ** -2
        ck.close(f"ratio({b:g},{c:g})", lim.value, expected, 0.02 * expected)
    return ck.result()


# -- systems ----------------------------------------------------------------------


def _system_pair(X, Y, c_expected, relation="non_comparable"):
    def run(cfg):
        ck = _Check()
        lim = tail_ratio_limit(X, Y, c_expected, x_max=cfg.x_max)
        ck.close("tail_ratio", lim.value, 1.0, 1e-3)
        v = decide_comparability(X, Y, cfg.sweep())
        ck.equal("relation", v.relation, relation)
        ck.close("candidate_c", v.candidate_c, c_expected, 1e-9)
        ck.observed["route"] = v.diagnostics.get("route")
        return ck.result()

    return run


def _gamma_literal(cfg):
    """Largest-index parameters agree; leading terms (smallest rates) do not."""
    ck = _Check()
    X, Y = Max((G(1, 1.0), G(2, 2.0))), Max((G(2, 1.5), G(2, 2.0)))
    lx, ly = leading_asymptote(X), leading_asymptote(Y)
    ck.observed["literal_condition_holds"] = True
    ck.equal("leading_degrees", (lx.degree, ly.degree), (0.0, 1.0))
    v = decide_comparability(X, Y, cfg.sweep())
    ck.equal("shortcut_refused", v.diagnostics.get("route"), "sweep")
    ck.observed["engine_relation"] = v.relation
    ck.observed["literal_reading"] = "non_comparable"
    ck.observed["leading_term_reading"] = "no tail-ratio conclusion"
    return ck.result()


def _fgm_rejected(cfg):
    ck = _Check()
    try:
        Max((E(1), E(2), E(3)), FGM(((0.6, 0.5), (0.0,))))
        ck.equal("rejected", False, True)
    except ConstraintViolation as exc:
        ck.equal("rejected", True, True)
        ck.observed["message"] = str(exc)
    return ck.result()


# -- extra sanity cases -------------------------------------------------------------


def _self_scale(cfg):
    ck = _Check()
    X = Max((E(1), E(2), E(3)))
    v = decide_comparability(X, X.rescaled(3.0), cfg.sweep())
    ck.equal("relation", v.relation, "scale_equivalent")
    return ck.result()


def _exp_maxima_convex(cfg):
    ck = _Check()
    res = convex_order_test(PowerOf(E(1), 2), E(1), config=cfg.sweep())
    ck.equal("relation", res.relation, "le_convex")
    return ck.result()


def _spec_values(cfg):
    ck = _Check()
    ck.close("max_cdf", float(Max((E(1), E(2))).cdf(math.log(2))), 0.375, 1e-15)
    ck.close("min_tail", float(Min((GE(2, 1), GE(3, 1))).tail(math.log(2))), 0.65625, 1e-15)
    ck.close("h_exp", float(quantile_compose(E(2), E(1), 1.5)), 3.0, 1e-12)
    return ck.result()


def _fixtures() -> list[Fixture]:
    fx = [
        Fixture("c21_constant", "paper", "C_{2,1}'(1) = 1.08453, slopes 0 and 1 at the ends", _c21_constant),
        Fixture("c21_shape", "paper", "C_{2,1} is neither convex nor concave", _c21_shape),
    ]
    for alpha in (0.5, 1.0, 2.0):
        for k, m in ((2, 1), (3, 2), (5, 2)):
            fx.append(Fixture(f"weibull_star_a{alpha:g}_{k}{m}", "paper", f"X_{k}:{k} <=_* X_{m}:{m}, Weibull shape {alpha:g}", _weibull_star(alpha, k, m)))
    fx += [
        Fixture("c21_convex_noncomparable", "paper", "X_2:2, X_1:1 Weibull(2) convex non-comparable", _c21_convex),
        Fixture("uquad_star", "paper", "u-quadratic X_2:2 and X_1:1 not star comparable", _uquad_star),
        Fixture("uquad_sm", "paper", "u-quadratic power family: D(4) = 0, D not monotone", _uquad_sm),
        Fixture("ge_n_sm", "paper", "GE in n: X_m:m <=_* X_k:k for m > k", _ge_n),
        Fixture("ge_lambda_sm", "paper", "GE in lambda: D = 1/lambda, equivalent", _ge_lambda),
        Fixture("ge_alpha_sm", "paper", "GE in shape: larger shape is star-smaller", _ge_alpha),
        Fixture("c21_line", "paper", "C_{2,1}(x) - x -> 0", _c21_line),
        Fixture("weibull_max_min_line", "paper", "max vs min slope lambda k^{1/alpha}", _max_min_line),
        Fixture("kochar_xu_123_vs_15_25", "paper", "rates (1,2,3) vs (1.5,2.5) non-comparable", _kochar((1, 2, 3), (1.5, 2.5), 1 / 1.5)),
        Fixture("kochar_xu_12_vs_13", "paper", "rates (1,2) vs (1,3) non-comparable", _kochar((1, 2), (1, 3), 1.0)),
        Fixture("kochar_xu_sum_constraint", "paper", "rates (1,3) vs (1.5,2.5), equal sums", _kochar((1, 3), (1.5, 2.5), 1 / 1.5)),
        Fixture("density_sandwich", "paper", "f_3 and g_2 satisfy the density sandwich beyond A = 40", _sandwich),
        Fixture("variation_tails", "paper", "SV, RV(-2) and RPV-not-ERPV counterexample tails", _tails),
        Fixture("eq_rv_property", "paper", "exponential tail under a 1.1x stretch", _eq_rv),
        Fixture("corollary_rv_property", "paper", "RV(-2) tail ratio (b/c)^{-2}", _corollary_rv),
        Fixture("weibull_parallel_a2", "paper", "Weibull(2) parallel systems non-comparable",
                _system_pair(Max((W(2, 1), W(2, 2))), Max((W(2, 1.5), W(2, 2.5))), 1 / 1.5)),
        Fixture("weibull_parallel_a0.5", "paper", "Weibull(0.5) parallel systems non-comparable",
                _system_pair(Max((W(0.5, 1), W(0.5, 2))), Max((W(0.5, 1.5), W(0.5, 2.5))), 1 / 1.5)),
        Fixture("gamma_parallel_matched", "paper", "integer Gamma parallel systems with matched leading terms",
                _system_pair(Max((G(2, 1.0), G(3, 2.0))), Max((G(2, 1.5), G(3, 2.5))), 1 / 1.5)),
        Fixture("gamma_parallel_literal", "paper", "literal largest-index condition vs leading terms", _gamma_literal),
        Fixture("ge_min", "paper", "GE series systems, prod alpha matched, c = sum lambda / sum theta",
                _system_pair(Min((GE(2, 1), GE(3, 2))), Min((GE(1.5, 1.5), GE(4, 2.5))), 3 / 4)),
        Fixture("ge_max", "paper", "GE parallel systems with alpha_1 = beta_1",
                _system_pair(Max((GE(2, 1), GE(3, 2))), Max((GE(2, 1.5), GE(1, 3))), 1 / 1.5)),
        Fixture("series_of_parallel", "paper", "series of parallel exponential blocks, N = M",
                _system_pair(Min((Max((E(1), E(1))), Max((E(1), E(3))))), Min((Max((E(1.5), E(1.5))), Max((E(1.5), E(4))))), 2 / 3)),
        Fixture("fgm_exponential", "paper", "F-G-M exponential maximum vs independent maximum",
                _system_pair(Max((E(1), E(2), E(3))), Max((E(1.5), E(2), E(2.5)), FGM(((0.3, -0.2), (0.4,)))), 1 / 1.5)),
        Fixture("fgm_weibull", "paper", "F-G-M Weibull maximum vs independent maximum",
                _system_pair(Max((W(2, 1), W(3, 2))), Max((W(2, 1.5), W(3, 1)), FGM(((0.5,),))), 1 / 1.5)),
        Fixture("fgm_constraint", "paper", "F-G-M coefficients with sum |c_ij| > 1 are rejected", _fgm_rejected),
        Fixture("self_scale", "extra", "X vs 3X is scale equivalent", _self_scale),
        Fixture("exp_maxima_convex", "extra", "X_2:2 <=_c X_1:1 for exponential components", _exp_maxima_convex),
        Fixture("spec_values", "extra", "closed-form evaluations", _spec_values),
    ]
    return fx


SUITES = ("paper", "all")


def select(suite: str) -> list[Fixture]:
    if suite not in SUITES:
        raise ConfigurationError(f"unknown fixture suite {suite!r}; expected one of {SUITES}")
    fx = _fixtures()
    return [f for f in fx if suite == "all" or f.suite == "paper"]


def _run_one(fixture: Fixture, cfg: RunConfig) -> Outcome:
    try:
        res = fixture.run(cfg)
    except Exception as exc:  # a crash is a failed fixture, reported like any mismatch
        return Outcome(fixture.name, False, fixture.claim, {}, [f"raised {type(exc).__name__}: {exc}"])
    return Outcome(fixture.name, not res["failures"], fixture.claim, res["observed"], res["failures"])


def run_suite(suite: str, cfg: RunConfig | None = None) -> list[Outcome]:
    cfg = cfg or RunConfig()
    fx = select(suite)
    workers = cfg.threads or int(os.environ.get("XORDER_THREADS", "1") or 1)
    if workers <= 1:
        return [_run_one(f, cfg) for f in fx]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: _run_one(f, cfg), fx))


def with_tol(cfg: RunConfig, tol: float) -> RunConfig:
    return replace(cfg, tol=tol)
