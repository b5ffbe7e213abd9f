"""Acceptance criteria, one test per criterion.

Each test prints a single ``[acceptance N] PASS|FAIL ...`` line; the lines are
also repeated in the pytest terminal summary. Run this file directly to see
only those lines.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import stats

from xorder import (
    FGM,
    BuiltinTail,
    Exponential,
    GammaInt,
    GenExponential,
    Max,
    Min,
    PowerFamily,
    PowerOf,
    ScaleFamily,
    UQuadratic,
    Weibull,
    asymptotic_line,
    classify_variation,
    convex_order_test,
    decide_comparability,
    erpv_probe,
    line_verdict,
    quantile_compose,
    saunders_moran_D,
    sign_pattern,
    sm_order_test,
    star_order_test,
    tail_ratio_limit,
    v_curve,
)
from xorder.cli import main as cli_main
from xorder.orders import composition

RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"[acceptance {n}] {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 ----------------------------------------------------------------------------


def test_criterion_1_weibull_composition_constant():
    W = Weibull(2.0)
    h = composition(PowerOf(W, 2), W)

    def slope(x, step):
        return float((h(x + step) - h(x - step)) / (2 * step))

    d1 = slope(1.0, 1e-5)
    d0 = slope(1e-4, 1e-6)
    dinf = slope(50.0, 1e-3)
    ok = abs(d1 - 1.08453) <= 1e-3 and abs(d0) <= 1e-3 and abs(dinf - 1.0) <= 1e-3
    report(1, ok, f"h'(1) = {d1:.6f} (1.08453), h'(1e-4) = {d0:.2e} (0), h'(50) = {dinf:.6f} (1)")


# 2 ----------------------------------------------------------------------------


def test_criterion_2_weibull_star_and_convex_witnesses():
    bad = []
    for alpha in (0.5, 1.0, 2.0):
        W = Weibull(alpha)
        for k, m in ((2, 1), (3, 2), (5, 2)):
            res = star_order_test(PowerOf(W, k), PowerOf(W, m))
            if not res.holds:
                bad.append(f"star alpha={alpha} ({k},{m})")
    W = Weibull(2.0)
    conv = convex_order_test(PowerOf(W, 2), W, use_star_shortcut=False)
    if conv.forward.holds or conv.reverse.holds:
        bad.append("convex witnesses missing")
    pats = sorted({w.payload["pattern"] for w in conv.evidence})
    report(2, not bad, f"9/9 star cases hold, convex witnesses both ways {pats}" if not bad else "; ".join(bad))


# 3 ----------------------------------------------------------------------------


def test_criterion_3_generalized_kochar_xu():
    notes, ok = [], True
    for lhs, rhs, c in (((1, 2, 3), (1.5, 2.5), 1 / 1.5), ((1, 2), (1, 3), 1.0)):
        X = Max(tuple(Exponential(r) for r in lhs))
        Y = Max(tuple(Exponential(r) for r in rhs))
        line = asymptotic_line(composition(X, Y))
        verdict = line_verdict(line, h_linear=False)
        v = decide_comparability(X, Y)
        good = (
            abs(line.b - c) <= 1e-3
            and abs(line.c) <= 1e-3
            and verdict == "NeitherConvexNorConcave"
            and v.relation == "non_comparable"
            and abs(v.candidate_c - c) <= 1e-9
        )
        ok &= good
        notes.append(f"{lhs} vs {rhs}: b={line.b:.6f} c={line.c:.1e} {verdict} {v.relation} c*={v.candidate_c:.6f}")
    report(3, ok, " | ".join(notes))


# 4 ----------------------------------------------------------------------------


def test_criterion_4_variation_classifier():
    sv = classify_variation(BuiltinTail("inv_log"))
    rv = classify_variation(BuiltinTail("inv_quadratic"))
    rp = classify_variation(BuiltinTail("exp_log_squared"))
    probe = erpv_probe(BuiltinTail("exp_log_squared"))
    ok = (
        sv.label == "SlowlyVarying"
        and rv.label == "RegularlyVarying"
        and abs(rv.index + 2.0) <= 0.05
        and rp.label == "RapidlyVaryingMinusInf"
        and abs(probe.value - 1.0) <= 1e-3
    )
    report(4, ok, f"{sv.label}, {rv.label}({rv.index:.4f}), {rp.label} with erpv_probe {probe.value:.6f}")


# 5 ----------------------------------------------------------------------------


def test_criterion_5_saunders_moran_suite():
    ge_n = PowerFamily(Exponential(1.0))
    n_ok = all(sm_order_test(ge_n, float(k), float(m)).relation == "ge_star" for k, m in ((1, 2), (2, 3), (2, 5), (3, 7)))

    ge_lam = ScaleFamily(GenExponential(2.0, 1.0))
    xs = np.linspace(0.01, 10.0, 500)
    exact = all(np.all(saunders_moran_D(ge_lam, lam, xs) == 1.0 / lam) for lam in (0.5, 1.0, 3.0))
    lam_ok = exact and sm_order_test(ge_lam, 1.0, 3.0).relation == "equivalent"

    uq = sm_order_test(PowerFamily(UQuadratic(0.0, 4.0)), 1.0, 2.0).relation
    ok = n_ok and lam_ok and uq == "non_comparable"
    report(5, ok, f"GE in n: X_m:m <=_* X_k:k ({n_ok}); GE in lambda: D == 1/lambda exactly ({lam_ok}); u-quadratic: {uq}")


# 6 ----------------------------------------------------------------------------

E, W, G, GE = Exponential, Weibull, GammaInt, GenExponential

APPLICATIONS = [
    ("weibull parallel a=2", Max((W(2, 1), W(2, 2))), Max((W(2, 1.5), W(2, 2.5))), 1 / 1.5),
    ("weibull parallel a=0.5", Max((W(0.5, 1), W(0.5, 2))), Max((W(0.5, 1.5), W(0.5, 2.5))), 1 / 1.5),
    ("gamma parallel", Max((G(2, 1.0), G(3, 2.0))), Max((G(2, 1.5), G(3, 2.5))), 1 / 1.5),
    ("GE series", Min((GE(2, 1), GE(3, 2))), Min((GE(1.5, 1.5), GE(4, 2.5))), 3 / 4),
    ("series of parallel", Min((Max((E(1), E(1))), Max((E(1), E(3))))), Min((Max((E(1.5), E(1.5))), Max((E(1.5), E(4))))), 2 / 3),
    ("FGM exponential", Max((E(1), E(2), E(3))), Max((E(1.5), E(2), E(2.5)), FGM(((0.3, -0.2), (0.4,)))), 1 / 1.5),
    ("FGM weibull", Max((W(2, 1), W(3, 2))), Max((W(2, 1.5), W(3, 1)), FGM(((0.5,),))), 1 / 1.5),
]


def test_criterion_6_applications():
    bad, notes = [], []
    for name, X, Y, c in APPLICATIONS:
        lim = tail_ratio_limit(X, Y, c)
        v = decide_comparability(X, Y)
        good = lim.kind == "finite" and abs(lim.value - 1.0) <= 1e-3 and v.relation == "non_comparable"
        good &= abs(v.candidate_c - c) <= 1e-9
        notes.append(f"{name}: ratio {lim.value:.6f}, {v.relation}")
        if not good:
            bad.append(name)
    report(6, not bad, f"{len(APPLICATIONS) - len(bad)}/{len(APPLICATIONS)} fixtures; " + "; ".join(notes))


# 7 ----------------------------------------------------------------------------


def _scipy_tail(kind, params):
    """Survival function built from scipy.stats only."""
    if kind == "exp":
        return stats.expon(scale=1 / params[0]).sf
    if kind == "weibull":
        return stats.weibull_min(params[0], scale=1 / params[1]).sf
    if kind == "gamma":
        return stats.gamma(params[0], scale=1 / params[1]).sf
    if kind == "ge":
        return stats.exponweib(params[0], 1.0, scale=1 / params[1]).sf
    if kind in ("max", "min"):
        parts = [_scipy_tail(*p) for p in params]
        if kind == "max":
            return lambda x: 1.0 - np.prod([1.0 - f(x) for f in parts], axis=0)
        return lambda x: np.prod([f(x) for f in parts], axis=0)
    raise ValueError(kind)


def _library(kind, params):
    if kind == "exp":
        return Exponential(params[0])
    if kind == "weibull":
        return Weibull(*params)
    if kind == "gamma":
        return GammaInt(int(params[0]), params[1])
    if kind == "ge":
        return GenExponential(*params)
    kids = tuple(_library(*p) for p in params)
    return Max(kids) if kind == "max" else Min(kids)


def _random_law(rng, allow_system=True):
    kind = rng.choice(["exp", "weibull", "gamma", "ge", "max", "min"] if allow_system else ["exp", "weibull", "gamma", "ge"])
    rate = float(np.round(rng.uniform(0.5, 2.5), 3))
    if kind == "exp":
        return kind, (rate,)
    if kind == "weibull":
        return kind, (float(np.round(rng.uniform(0.5, 3.0), 3)), rate)
    if kind == "gamma":
        return kind, (int(rng.integers(1, 5)), rate)
    if kind == "ge":
        return kind, (float(np.round(rng.uniform(0.5, 4.0), 3)), rate)
    return kind, tuple(_random_law(rng, False) for _ in range(int(rng.integers(2, 4))))


def _brute_force_changes(values, eps):
    """Plain-loop sign collapse: entries within eps * max|v| of zero are skipped."""
    scale = max(abs(v) for v in values)
    signs = []
    for v in values:
        if scale == 0 or abs(v) <= eps * scale:
            continue
        s = "+" if v > 0 else "-"
        if not signs or signs[-1] != s:
            signs.append(s)
    return ",".join(signs)


def test_criterion_7_sign_pattern_oracle():
    rng = np.random.default_rng(7)
    n_points, eps = 65536, 1e-9
    mismatches, patterns = [], {}
    for i in range(50):
        lx, ly = _random_law(rng), _random_law(rng)
        a = float(np.round(rng.uniform(0.3, 3.0), 4))
        b = float(np.round(rng.uniform(-1.0, 1.0), 4))
        sx, sy = _scipy_tail(*lx), _scipy_tail(*ly)
        X, Y = _library(*lx), _library(*ly)
        # span: where either law carries mass, located by bisection on the scipy tails
        hi = 1.0
        while min(sx(hi), sy(hi)) > 1e-9:
            hi *= 2.0
        xs = np.geomspace(1e-4, hi, n_points)
        ref_v = sy(xs) - sx(np.maximum(a * xs + b, 0.0))
        ref = _brute_force_changes(ref_v.tolist(), eps)
        got = sign_pattern(v_curve(X, Y, a, b, xs, normalized=False), eps).text
        patterns[got] = patterns.get(got, 0) + 1
        if ref != got:
            mismatches.append(f"#{i} {lx} vs {ly} a={a} b={b}: oracle {ref!r}, library {got!r}")
    summary = ", ".join(f"{k or '(empty)'}: {v}" for k, v in sorted(patterns.items()))
    report(7, not mismatches, f"50 instances, {len(mismatches)} discrepancies; patterns {summary}" + ("; " + "; ".join(mismatches[:3]) if mismatches else ""))


# 8 ----------------------------------------------------------------------------


def _infrastructure_laws():
    w = Weibull(2.0)
    return [
        Exponential(1.3),
        Weibull(0.5, 2.0),
        GammaInt(3, 1.5),
        GenExponential(2.5, 0.7),
        UQuadratic(0.0, 4.0),
        PowerOf(w, 3.0),
        Max((Exponential(1.0), Weibull(2.0, 0.5))),
        Min((GammaInt(2, 1.0), GenExponential(3.0, 2.0))),
    ]


def test_criterion_8_infrastructure(tmp_path):
    notes, ok = [], True

    # quantile round trip, relative in the smaller tail probability; pdf * ulp(x) is the
    # resolution floor where a finite right endpoint makes x itself coarse
    worst = 0.0
    ps = np.concatenate([np.geomspace(1e-12, 0.5, 60), 1 - np.geomspace(1e-12, 0.5, 60)])
    for law in _infrastructure_laws():
        xs = law.quantile(ps)
        back = np.where(ps < 0.5, law.cdf(xs), law.tail(xs))
        target = np.where(ps < 0.5, ps, 1 - ps)
        excess = np.abs(back - target) - 2 * law.pdf(xs) * np.spacing(xs)
        worst = max(worst, float(np.max(np.maximum(excess, 0.0) / target)))
    ok &= worst <= 1e-10
    notes.append(f"round-trip {worst:.1e}")

    # cdf + tail
    worst_sum = 0.0
    for law in _infrastructure_laws():
        lo, hi = law.support()
        xs = np.linspace(lo, min(hi, float(law.quantile(1 - 1e-12))), 2001)
        worst_sum = max(worst_sum, float(np.max(np.abs(law.cdf(xs) + law.tail(xs) - 1.0))))
    ok &= worst_sum <= 1e-12
    notes.append(f"cdf+tail {worst_sum:.1e}")

    # Monte Carlo, 10^6 samples per system
    rng = np.random.default_rng(8)
    n = 1_000_000
    t0 = time.perf_counter()
    draws = {
        "max": (Max((Exponential(1.0), Exponential(2.0), Weibull(2.0, 1.0))),
                lambda: np.maximum.reduce([rng.exponential(1.0, n), rng.exponential(0.5, n), rng.weibull(2.0, n)])),
        "min": (Min((Exponential(1.0), Weibull(0.5, 1.0))),
                lambda: np.minimum(rng.exponential(1.0, n), rng.weibull(0.5, n))),
        "min_of_max": (Min((Max((Exponential(1.0), Exponential(1.0))), Exponential(0.5))),
                       lambda: np.minimum(np.maximum(rng.exponential(1.0, n), rng.exponential(1.0, n)), rng.exponential(2.0, n))),
    }
    worst_mc = 0.0
    for system, sampler in draws.values():
        sample = np.sort(sampler())
        xs = np.quantile(sample, np.linspace(0.0005, 0.9995, 400))
        emp = np.searchsorted(sample, xs, side="right") / n
        worst_mc = max(worst_mc, float(np.max(np.abs(emp - system.cdf(xs)))))
    elapsed = time.perf_counter() - t0
    ok &= worst_mc <= 3e-3 and elapsed < 60
    notes.append(f"Monte Carlo sup {worst_mc:.1e} in {elapsed:.1f}s")

    # determinism of CLI outputs
    lhs, rhs = tmp_path / "l.json", tmp_path / "r.json"
    lhs.write_text(json.dumps({"op": "max", "components": [{"family": "exponential", "rate": r} for r in (1, 2, 3)]}))
    rhs.write_text(json.dumps({"op": "max", "components": [{"family": "exponential", "rate": r} for r in (1.5, 2.5)]}))
    blobs = []
    for i in range(2):
        v, h = tmp_path / f"v{i}.json", tmp_path / f"h{i}.csv"
        cli_main(["compare", "--lhs", str(lhs), "--rhs", str(rhs), "--out", str(v), "--curves", str(h)])
        blobs.append(v.read_bytes() + h.read_bytes())
    same = blobs[0] == blobs[1]
    ok &= same
    notes.append(f"byte-identical reruns {same}")
    report(8, ok, ", ".join(notes))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
