import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import every_family
from xorder import (
    BuiltinTail,
    DomainError,
    Exponential,
    GammaInt,
    GenExponential,
    PowerOf,
    TailPowerOf,
    UQuadratic,
    ValidationError,
    Weibull,
    classify_failure_rate,
    evaluate,
    scale_equivalent,
    scaled,
)
from xorder.documents import dist_from_doc


def _scipy(law):
    """Independent reference laws for the families scipy ships."""
    if isinstance(law, Exponential):
        return stats.expon(scale=1 / law.rate)
    if isinstance(law, Weibull):
        return stats.weibull_min(law.shape, scale=1 / law.rate)
    if isinstance(law, GammaInt):
        return stats.gamma(law.shape, scale=1 / law.rate)
    return None


@pytest.mark.parametrize("law", [Exponential(0.7), Weibull(0.5, 2.0), Weibull(3.0, 0.4), GammaInt(1, 2.0), GammaInt(4, 0.8)])
def test_cdf_and_pdf_match_scipy(law):
    ref = _scipy(law)
    xs = ref.ppf(np.linspace(0.001, 0.999, 101))
    np.testing.assert_allclose(law.cdf(xs), ref.cdf(xs), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(law.pdf(xs), ref.pdf(xs), rtol=1e-10)
    np.testing.assert_allclose(law.log_tail(xs), ref.logsf(xs), rtol=1e-12, atol=1e-15)


def test_gamma_deep_tail_matches_scipy_logsf():
    g = GammaInt(3, 1.0)
    xs = np.array([50.0, 200.0, 700.0])
    np.testing.assert_allclose(g.log_tail(xs), stats.gamma(3).logsf(xs), rtol=1e-12)


def test_generalized_exponential_closed_form():
    ge = GenExponential(2.5, 0.7)
    xs = np.linspace(0.01, 12, 50)
    np.testing.assert_allclose(ge.cdf(xs), (1 - np.exp(-0.7 * xs)) ** 2.5, rtol=1e-13)


def test_u_quadratic_closed_form():
    u = UQuadratic(1.0, 3.0)
    xs = np.linspace(1.0, 3.0, 41)
    alpha = 12 / 2.0**3
    cdf = alpha / 3 * ((xs - 2.0) ** 3 + 1.0)
    np.testing.assert_allclose(u.cdf(xs), cdf, atol=1e-14)
    np.testing.assert_allclose(u.pdf(xs[1:-1]), alpha * (xs[1:-1] - 2.0) ** 2, rtol=1e-12, atol=1e-15)
    assert u.support() == (1.0, 3.0)


def test_power_of_and_tail_power_of():
    w = Weibull(2.0, 1.0)
    xs = np.linspace(0.05, 3, 30)
    np.testing.assert_allclose(PowerOf(w, 3).cdf(xs), w.cdf(xs) ** 3, rtol=1e-13)
    np.testing.assert_allclose(TailPowerOf(w, 2).tail(xs), w.tail(xs) ** 2, rtol=1e-13)


@pytest.mark.parametrize("law", every_family(), ids=lambda d: d.family)
def test_cdf_plus_tail_is_one(law):
    lo, hi = law.support()
    xs = np.linspace(lo, min(hi, float(law.quantile(1 - 1e-9))), 257)
    np.testing.assert_allclose(law.cdf(xs) + law.tail(xs), 1.0, atol=1e-12)


@pytest.mark.parametrize("law", every_family(), ids=lambda d: d.family)
def test_quantile_round_trip(law):
    ps = np.concatenate([np.geomspace(1e-12, 0.5, 40), 1 - np.geomspace(1e-12, 0.5, 40)])
    xs = law.quantile(ps)
    back = np.where(ps < 0.5, law.cdf(xs), law.tail(xs))
    target = np.where(ps < 0.5, ps, 1 - ps)
    # beside a finite right endpoint x itself cannot resolve the tail mass finer than pdf * ulp(x)
    slack = 2 * law.pdf(xs) * np.spacing(xs)
    assert np.all(np.abs(back - target) <= 1e-10 * target + slack)


def test_far_tail_stays_finite_in_log_space():
    e = Exponential(1.0)
    assert e.log_tail(1e5) == -1e5
    assert e.tail(1e5) == 0.0
    assert float(e.inv_log_tail(-1e5)) == pytest.approx(1e5, rel=1e-15)


def test_quantile_rejects_out_of_range():
    with pytest.raises(DomainError):
        Exponential(1.0).quantile(1.0)
    with pytest.raises(DomainError):
        Exponential(1.0).quantile(0.0)


def test_evaluate_rejects_negative_points_and_unknown_functional():
    with pytest.raises(DomainError):
        evaluate(Exponential(1.0), -1.0, "cdf")
    with pytest.raises(ValidationError):
        evaluate(Exponential(1.0), 1.0, "hazard")


def test_invalid_parameters():
    with pytest.raises(ValidationError):
        Exponential(-1.0)
    with pytest.raises(ValidationError):
        GammaInt(2.5, 1.0)
    with pytest.raises(ValidationError):
        UQuadratic(2.0, 1.0)
    with pytest.raises(ValidationError):
        BuiltinTail("cauchy")


def test_scaling_and_scale_equivalence():
    w = Weibull(2.0, 1.0)
    w3 = scaled(w, 3.0)
    xs = np.linspace(0.1, 5, 20)
    np.testing.assert_allclose(w3.cdf(3 * xs), w.cdf(xs), rtol=1e-13)
    assert scale_equivalent(w, w3) == pytest.approx(3.0)
    assert scale_equivalent(w, Weibull(3.0, 1.0)) is None
    assert scale_equivalent(GenExponential(2, 1), GenExponential(2, 4)) == pytest.approx(0.25)


def test_failure_rate_classes():
    assert classify_failure_rate(Weibull(2.0)).label == "IFR"
    assert classify_failure_rate(Weibull(0.5)).label == "DFR"
    assert classify_failure_rate(Exponential(2.0)).label == "ConstantFR"
    assert classify_failure_rate(GammaInt(3, 1.0)).label == "IFR"


def test_builtin_tails_match_their_formulas():
    xs = np.array([0.0, 0.5, 3.0, 100.0])
    np.testing.assert_allclose(BuiltinTail("inv_quadratic").tail(xs), 1 / (xs**2 + 1), rtol=1e-14)
    np.testing.assert_allclose(BuiltinTail("inv_log").tail(xs), 1 / (np.log1p(xs) + 1), rtol=1e-14)
    np.testing.assert_allclose(BuiltinTail("exp_log_squared").tail(xs), np.exp(-np.log1p(xs) ** 2), rtol=1e-14)


def test_document_round_trip():
    for law in every_family():
        assert dist_from_doc(law.to_doc()) == law


@settings(max_examples=60, deadline=None)
@given(
    shape=st.floats(0.3, 6.0),
    rate=st.floats(0.1, 10.0),
    p=st.floats(1e-9, 1 - 1e-9),
)
def test_weibull_quantile_property(shape, rate, p):
    w = Weibull(shape, rate)
    x = float(w.quantile(p))
    assert math.isclose(float(w.cdf(x)), p, rel_tol=1e-10) or math.isclose(float(w.tail(x)), 1 - p, rel_tol=1e-10)


@settings(max_examples=40, deadline=None)
@given(shape=st.floats(0.2, 8.0), rate=st.floats(0.1, 5.0), x=st.floats(0.0, 50.0))
def test_generalized_exponential_cdf_tail_sum(shape, rate, x):
    ge = GenExponential(shape, rate)
    assert abs(float(ge.cdf(x)) + float(ge.tail(x)) - 1.0) <= 1e-12


# -- worked examples and invariants -------------------------------------------------


def test_worked_examples():
    assert float(Exponential(1.0).tail(math.log(2))) == pytest.approx(0.5, rel=1e-15)
    assert float(GammaInt(2, 1.0).tail(1.0)) == pytest.approx(2 / math.e, rel=1e-15)
    assert float(UQuadratic(0.0, 4.0).pdf(2.0)) == 0.0
    assert float(Exponential(2.0).quantile(1 - math.exp(-2))) == pytest.approx(1.0, rel=1e-14)
    assert float(PowerOf(Exponential(1.0), 2).quantile(0.25)) == pytest.approx(math.log(2), rel=1e-14)
    assert float(GammaInt(2, 1.0).quantile(1 - 2 / math.e)) == pytest.approx(1.0, abs=1e-10)
    assert scale_equivalent(Weibull(2, 1), Weibull(2, 5)) == pytest.approx(1 / 5)


@pytest.mark.parametrize("law", every_family(), ids=lambda d: d.family)
def test_log_grid_invariants(law):
    lo, hi = law.support()
    xs = np.geomspace(max(lo, 1e-6), min(hi, 1e3), 400)
    cdf, tail, pdf = law.cdf(xs), law.tail(xs), law.pdf(xs)
    assert np.all(np.abs(cdf + tail - 1) <= 1e-12)
    assert np.all(np.diff(cdf) >= 0)
    assert np.all(pdf >= 0)
    live = tail >= 1e-300
    assert np.all(np.abs(np.exp(law.log_tail(xs[live])) - tail[live]) <= 1e-12 * np.maximum(1.0, tail[live]))


def test_failure_rate_is_pdf_over_tail_and_fails_past_support():
    g = GammaInt(3, 2.0)
    xs = np.linspace(0.1, 5, 30)
    np.testing.assert_allclose(g.failure_rate(xs), g.pdf(xs) / g.tail(xs), rtol=1e-12)
    with pytest.raises(DomainError):
        UQuadratic(0.0, 1.0).failure_rate(1.0)


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_gamma_tail_against_integrated_pdf(a):
    from scipy.integrate import quad

    g = GammaInt(a, 1.7)
    for x in (0.1, 1.0, 3.0, 8.0):
        integral, _ = quad(lambda t: float(g.pdf(t)), x, np.inf, epsabs=1e-13, epsrel=1e-12)
        assert abs(integral - float(g.tail(x))) <= 1e-8


def test_power_of_exponential_is_generalized_exponential():
    p, ge = PowerOf(Exponential(0.8), 2.7), GenExponential(2.7, 0.8)
    xs = np.geomspace(1e-4, 60, 300)
    for fn in ("cdf", "tail", "pdf", "log_tail", "log_cdf"):
        np.testing.assert_allclose(getattr(p, fn)(xs), getattr(ge, fn)(xs), rtol=1e-12, atol=1e-300)
    ps = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(p.quantile(ps), ge.quantile(ps), rtol=1e-12)
