import json
import math

import numpy as np
import pytest

from xorder import (
    FGM,
    BuiltinTail,
    Exponential,
    GammaInt,
    GenExponential,
    Max,
    Min,
    PowerOf,
    TailPowerOf,
    UQuadratic,
    ValidationError,
    Weibull,
    asymptotic_line,
    classify_variation,
    convex_order_test,
    decide_comparability,
    density_sandwich_check,
    erpv_probe,
    estimate_limit,
    line_verdict,
    locate_sandwich_threshold,
    sequence_limit,
    tail_ratio_limit,
    variation_ratio_limit,
)
from xorder import documents
from xorder.limits import geometric_sequence, neville
from xorder.orders import composition

E = Exponential


# -- limits ---------------------------------------------------------------------


def test_neville_recovers_polynomial_in_t():
    ts = np.array([0.5, 0.25, 0.2, 0.1])
    ys = 3.0 + 2.0 * ts - ts**2
    value, err = neville(ts, ys)
    assert value == pytest.approx(3.0, abs=1e-13)


def test_estimate_limit_kinds():
    xs = geometric_sequence()
    assert estimate_limit(np.full(xs.size, math.log(2.0)), xs).value == pytest.approx(2.0)
    assert estimate_limit(-xs, xs).kind == "zero"
    assert estimate_limit(xs, xs).kind == "infinite"
    slow = estimate_limit(0.7 + 1.0 / np.log(xs[1:]), xs[1:])
    assert slow.kind == "finite" and slow.log_value == pytest.approx(0.7, abs=1e-4)


def test_tail_ratio_limits():
    X = Max((E(1.0), E(2.0), E(3.0)))
    Y = Max((E(1.5), E(2.5)))
    assert tail_ratio_limit(X, Y, 2.0 / 3.0).value == pytest.approx(1.0, abs=1e-3)
    assert tail_ratio_limit(X, Y, 1.0).kind == "infinite"
    with pytest.raises(ValidationError):
        tail_ratio_limit(X, Y, -1.0)


def test_variation_ratio_with_callable_tail():
    lim = variation_ratio_limit(lambda x: 1.0 / (1.0 + x**3), 2.0)
    assert lim.value == pytest.approx(0.125, rel=1e-6)


# -- classification -------------------------------------------------------------


def test_classify_builtin_tails():
    sv = classify_variation(BuiltinTail("inv_log"))
    assert sv.label == "SlowlyVarying"
    rv = classify_variation(BuiltinTail("inv_quadratic"))
    assert rv.label == "RegularlyVarying" and rv.index == pytest.approx(-2.0, abs=0.05)
    rpv = classify_variation(BuiltinTail("exp_log_squared"))
    assert rpv.label == "RapidlyVaryingMinusInf" and rpv.erpv is False


def test_classify_analytic_families():
    assert classify_variation(E(1.0)).to_doc()["class"] == "erpv_minus_inf"
    assert classify_variation(E(1.0)).origin == "analytic"
    assert classify_variation(GammaInt(3, 1.0)).label == "ERPVMinusInf"
    w = classify_variation(Weibull(0.5))
    assert w.label == "RapidlyVaryingMinusInf" and w.erpv is False
    assert classify_variation(UQuadratic(0, 1)).label == "Unknown"


def test_erpv_probe():
    assert erpv_probe(BuiltinTail("exp_log_squared")).value == pytest.approx(1.0, abs=1e-3)
    assert erpv_probe(E(1.0)).value == pytest.approx(math.exp(-1.0), rel=1e-12)


# -- asymptotic lines -------------------------------------------------------------


def test_asymptotic_line_exact_linear():
    line = asymptotic_line(lambda x: 2.5 * x - 1.25)
    assert line.converged
    assert (line.b, line.c) == pytest.approx((2.5, -1.25), abs=1e-12)
    assert line_verdict(line, h_linear=True) == "Inconclusive"


def test_asymptotic_line_with_decaying_correction():
    line = asymptotic_line(lambda x: 3.0 * x + 0.5 + np.exp(-x))
    assert line.converged
    assert (line.b, line.c) == pytest.approx((3.0, 0.5), abs=1e-9)
    assert line_verdict(line, h_linear=False) == "NotConvex"


def test_asymptotic_line_kochar_xu():
    X = Max((E(1.0), E(2.0), E(3.0)))
    Y = Max((E(1.5), E(2.5)))
    line = asymptotic_line(composition(X, Y))
    assert line.b == pytest.approx(1 / 1.5, abs=1e-3)
    assert line.c == pytest.approx(0.0, abs=1e-3)
    assert line_verdict(line, h_linear=False) == "NeitherConvexNorConcave"


def test_asymptotic_line_weibull_max_min():
    # h = F_max^{-1}(G_min) for Weibull(2): slope sqrt(3), intercept 0
    W = Weibull(2.0)
    line = asymptotic_line(composition(TailPowerOf(W, 3), PowerOf(W, 2)))
    assert line.b == pytest.approx(math.sqrt(3.0), abs=1e-6)
    assert line.c == pytest.approx(0.0, abs=1e-6)


def test_asymptotic_line_not_converged_for_sqrt():
    assert not asymptotic_line(np.sqrt).converged


# -- density sandwich ------------------------------------------------------------


def test_density_sandwich():
    f = Max((E(1.0), E(2.0)))
    g = E(1.0)
    assert density_sandwich_check(f, g, 1.0, 0.5, A=10.0).passed
    res = density_sandwich_check(f, g, 1.0, 0.5, A=0.0)
    assert not res.passed and res.first_failure is not None
    A = locate_sandwich_threshold(f, g, 1.0, 0.5)
    assert A is not None and density_sandwich_check(f, g, 1.0, 0.5, A=A).passed
    with pytest.raises(ValidationError):
        density_sandwich_check(f, g, 1.0, 0.0, A=1.0)


# -- comparability --------------------------------------------------------------


def test_decide_identical_is_scale_equivalent():
    X = Max((E(1.0), E(2.0)))
    v = decide_comparability(X, X)
    assert v.relation == "scale_equivalent" and v.candidate_c == 1.0
    v = decide_comparability(X, Max((E(2.0), E(4.0))))
    assert v.relation == "scale_equivalent" and v.candidate_c == pytest.approx(0.5)


@pytest.mark.parametrize(
    "X,Y,c",
    [
        (Max((E(1.0), E(2.0), E(3.0))), Max((E(1.5), E(2.5))), 2.0 / 3.0),
        (Max((E(1.0), E(2.0))), Max((E(1.0), E(3.0))), 1.0),
        (Min((GenExponential(2.0, 1.0), GenExponential(3.0, 2.0))), Min((GenExponential(6.0, 2.0),)), 1.5),
        (Max((E(1.0), E(2.0)), FGM(((0.3,),))), Max((E(1.0), E(3.0)), FGM(((0.2,),))), 1.0),
    ],
)
def test_decide_noncomparable_matched_tails(X, Y, c):
    v = decide_comparability(X, Y)
    assert v.relation == "non_comparable"
    assert v.candidate_c == pytest.approx(c, rel=1e-12)
    assert v.diagnostics["route"] == "tail_ratio"


def test_decide_weibull_below_one_is_not_erpv():
    X = Max((Weibull(0.5, 1.0), Weibull(0.5, 2.0)))
    Y = Max((Weibull(0.5, 1.5), Weibull(0.5, 2.5)))
    v = decide_comparability(X, Y)
    assert v.diagnostics["erpv"] is False
    assert v.diagnostics["match"]["matched"]
    assert v.relation == "non_comparable"
    assert v.candidate_c == pytest.approx(1 / 1.5)


def test_decide_unmatched_falls_back_to_sweep():
    v = decide_comparability(PowerOf(Weibull(0.5), 2), Max((Weibull(0.5), Weibull(0.5, 2.0))))
    assert not v.diagnostics["match"]["matched"]
    assert v.diagnostics["route"] == "sweep"


def test_verdict_document_validates():
    v = decide_comparability(Max((E(1.0), E(2.0))), Max((E(1.0), E(3.0))))
    doc = json.loads(documents.dumps(v.to_doc()))
    documents.validate(doc, "verdict")


# -- invariants ---------------------------------------------------------------------


def test_asymptotic_line_recovers_random_exact_lines():
    rng = np.random.default_rng(11)
    for b, c in zip(rng.uniform(0.1, 10.0, 20), rng.uniform(-5.0, 5.0, 20)):
        line = asymptotic_line(lambda x, b=b, c=c: b * x + c)
        assert line.converged
        assert abs(line.b - b) <= 1e-10 and abs(line.c - c) <= 1e-10


def test_regularly_varying_shifted_argument_ratio():
    f = BuiltinTail("inv_quadratic")
    for b, c in ((1.0, 2.0), (3.0, 1.0)):
        lim = sequence_limit(lambda x: f.log_tail(b * x + np.sqrt(x)) - f.log_tail(c * x), geometric_sequence())
        assert lim.value == pytest.approx((b / c) ** -2, rel=0.02)


def test_rapidly_increasing_ratio_passes_1e6_before_200():
    # f = 1 / tail of Exp(1) grows like e^x; f(1.1 x) / f(x) = e^{0.1 x}
    xs = np.linspace(1.0, 200.0, 4000)
    log_f = lambda x: -np.asarray(E(1.0).log_tail(x))
    assert np.any(log_f(1.1 * xs) - log_f(xs) > math.log(1e6))


SYMMETRY_PAIRS = [
    (Max((E(1.0), E(2.0), E(3.0))), Max((E(1.5), E(2.5)))),
    (Max((E(1.0), E(2.0))), Max((E(2.0), E(4.0)))),
    (Min((GenExponential(2, 1), GenExponential(3, 2))), Min((GenExponential(1.5, 1.5), GenExponential(4, 2.5)))),
    (Max((E(1.0), E(1.0))), E(1.0)),
]


@pytest.mark.parametrize("X,Y", SYMMETRY_PAIRS, ids=["kochar_xu", "scaled", "ge_min", "directional"])
def test_decide_comparability_is_symmetric(X, Y):
    swap = {"le_convex": "ge_convex", "ge_convex": "le_convex", "le_star": "ge_star", "ge_star": "le_star"}
    fwd, rev = decide_comparability(X, Y).relation, decide_comparability(Y, X).relation
    assert rev == swap.get(fwd, fwd)


@pytest.mark.parametrize("X,Y", SYMMETRY_PAIRS[:1] + SYMMETRY_PAIRS[2:3] + [
    (Max((Weibull(2, 1), Weibull(2, 2))), Max((Weibull(2, 1.5), Weibull(2, 2.5)))),
    (Max((E(1), E(2), E(3))), Max((E(1.5), E(2), E(2.5)), FGM(((0.3, -0.2), (0.4,))))),
], ids=["kochar_xu", "ge_min", "weibull_parallel", "fgm"])
def test_tail_ratio_verdicts_have_sweep_witnesses(X, Y):
    v = decide_comparability(X, Y)
    assert v.relation == "non_comparable" and v.diagnostics["route"] == "tail_ratio"
    res = convex_order_test(X, Y, use_star_shortcut=False)
    assert not res.forward.holds and not res.reverse.holds
