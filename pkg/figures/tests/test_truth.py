"""Truth-overlay curves: spot checks of the closed forms."""

import math

import numpy as np
import pytest

from lcfigures import log_density, log_density_deriv


def test_gaussian_closed_form():
    x = np.array([-1.0, 0.0, 2.5])
    expected = -0.5 * x * x - math.log(math.sqrt(2 * math.pi))
    assert np.allclose(log_density("gaussian", x), expected, atol=1e-14)
    assert np.allclose(log_density_deriv("gaussian", x), -x, atol=1e-14)


def test_uniform_support():
    assert log_density("uniform", 0.5) == 0.0
    assert log_density("uniform", 1.5) == -np.inf
    assert log_density_deriv("uniform", 0.5) == 0.0


def test_exponential_with_params():
    assert abs(log_density("exponential", 2.0, (3.0,))
               - (math.log(3.0) - 6.0)) < 1e-14
    assert log_density_deriv("exponential", 2.0, (3.0,)) == -3.0


def test_logistic_symmetry_and_mass():
    x = np.linspace(-30, 30, 2001)
    f = np.exp(log_density("logistic", x))
    assert abs(np.trapezoid(f, x) - 1.0) < 1e-6
    assert np.allclose(log_density("logistic", x), log_density("logistic", -x))


def test_gamma_mode():
    # gamma(2, 1): log f = log x - x; derivative zero at x = 1
    assert abs(log_density("gamma", 1.0, (2.0, 1.0)) - (-1.0)) < 1e-14
    assert abs(log_density_deriv("gamma", 1.0, (2.0, 1.0))) < 1e-14


def test_unknown_family():
    with pytest.raises(ValueError):
        log_density("cauchy", 0.0)
