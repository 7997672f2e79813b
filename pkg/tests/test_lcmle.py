"""Unit tests for the maximum likelihood solver and fit utilities."""

import math

import numpy as np
import pytest

from lctails import (
    ReferenceDensity,
    SortedSample,
    cdf_hat,
    eval_phi,
    eval_phi_rderiv,
    exp_linear_integral,
    fit_mle,
    kink_set,
    load_fit,
    mean_excess_emp,
    mean_excess_hat,
    save_fit,
)
from lctails.oracle import adaptive_quadrature


def test_exp_linear_integral_against_quadrature():
    for a, b, ln in [(0.0, 0.0, 1.0), (-1.0, 2.0, 0.7), (3.0, 3.0 + 1e-9, 2.0),
                     (-5.0, -20.0, 4.0)]:
        ref = adaptive_quadrature(
            lambda t: math.exp(a + (b - a) * t / ln), 0.0, ln)
        got = float(exp_linear_integral(np.array([a]), np.array([b]), np.array([ln]))[0])
        assert abs(got - ref) < 1e-9 * (1.0 + abs(ref))


def test_sorted_sample_merges_ties():
    s = SortedSample.from_data(np.array([1.0, 3.0, 1.0, 2.0]))
    assert np.array_equal(s.values, [1.0, 2.0, 3.0])
    assert np.allclose(s.weights, [0.5, 0.25, 0.25])
    assert s.n_obs == 4


def test_two_point_closed_form():
    s = SortedSample.from_data(np.array([0.2, 0.7]))
    fit = fit_mle(s)
    assert fit.converged
    assert abs(fit.slopes[0]) < 1e-6
    assert abs(fit.values[0] - (-math.log(0.5))) < 1e-6


def test_fit_is_concave_and_normalized():
    d = ReferenceDensity.gaussian()
    s = d.sample(500, 11)
    fit = fit_mle(s)
    assert fit.converged
    assert np.all(np.diff(fit.slopes) < 1e-9)
    assert fit.norm_residual <= 1e-8
    # integral of the fitted density, recomputed independently
    total = adaptive_quadrature(
        lambda x: math.exp(eval_phi(fit, x)) if fit.knots[0] <= x <= fit.knots[-1] else 0.0,
        float(fit.knots[0]), float(fit.knots[-1]))
    assert abs(total - 1.0) < 1e-7


def test_eval_phi_outside_hull():
    s = SortedSample.from_data(np.array([0.0, 0.5, 1.0]))
    fit = fit_mle(s)
    assert eval_phi(fit, -0.1) == -np.inf
    assert eval_phi(fit, 1.1) == -np.inf
    assert eval_phi_rderiv(fit, 1.1) == -np.inf
    with pytest.raises(ValueError):
        eval_phi_rderiv(fit, -0.1)


def test_kink_set_contains_endpoints():
    d = ReferenceDensity.logistic()
    s = d.sample(200, 5)
    fit = fit_mle(s)
    kinks = kink_set(fit)
    assert kinks[0] == fit.knots[0]
    assert kinks[-1] == fit.knots[-1]
    assert np.all(np.isin(kinks, s.values))


def test_cdf_hat_monotone():
    d = ReferenceDensity.gamma(2.0, 1.0)
    s = d.sample(300, 7)
    fit = fit_mle(s)
    grid = np.linspace(fit.knots[0] - 1, fit.knots[-1] + 1, 200)
    c = cdf_hat(fit, grid)
    assert np.all(np.diff(c) >= -1e-12)
    assert c[0] == 0.0
    assert abs(c[-1] - 1.0) < 1e-8


def test_mean_excess_hat_matches_quadrature():
    d = ReferenceDensity.gaussian()
    s = d.sample(200, 3)
    fit = fit_mle(s)
    x0 = float(np.median(s.values))
    num = adaptive_quadrature(
        lambda t: (t - x0) * math.exp(eval_phi(fit, t)), x0, float(fit.knots[-1]))
    den = 1.0 - float(cdf_hat(fit, x0))
    assert abs(mean_excess_hat(fit, x0) - num / den) < 1e-8


def test_mean_excess_emp_simple():
    s = SortedSample.from_data(np.array([0.0, 1.0, 2.0, 3.0]))
    # beyond 1.5 the surviving points are 2 and 3; mean excess 1.0
    assert abs(mean_excess_emp(s, 1.5) - 1.0) < 1e-12
    assert mean_excess_emp(s, 3.0) == 0.0


def test_save_load_roundtrip(tmp_path):
    d = ReferenceDensity.exponential()
    s = d.sample(80, 9)
    fit = fit_mle(s)
    path = tmp_path / "fit.txt"
    save_fit(fit, path)
    back = load_fit(path)
    assert np.array_equal(back.knots, fit.knots)
    assert np.array_equal(back.values, fit.values)
    assert np.array_equal(back.slopes, fit.slopes)
    assert back.converged == fit.converged
    assert back.n_obs == fit.n_obs


def test_loglik_beats_gaussian_reference():
    # the MLE log-likelihood must dominate any fixed log-concave candidate;
    # compare with the moment-matched gaussian at the sample points
    d = ReferenceDensity.logistic()
    s = d.sample(400, 21)
    fit = fit_mle(s)
    m = float(np.dot(s.weights, s.values))
    sd = math.sqrt(float(np.dot(s.weights, (s.values - m) ** 2)))
    ref = ReferenceDensity.gaussian(m, sd)
    ref_ll = float(np.dot(s.weights, ref.log_density(s.values)))
    assert fit.loglik >= ref_ll - 1e-9
