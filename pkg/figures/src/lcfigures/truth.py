"""True log-density curves for the overlay, recomputed locally from the
family name and parameters so the CSV schema stays minimal."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["log_density", "log_density_deriv"]


def _check(family: str, params: tuple) -> tuple:
    defaults = {
        "uniform": (0.0, 1.0),
        "gaussian": (0.0, 1.0),
        "exponential": (1.0,),
        "logistic": (0.0, 1.0),
        "gamma": (2.0, 1.0),
    }
    if family not in defaults:
        raise ValueError(f"unknown family {family!r}")
    return tuple(params) if params else defaults[family]


def log_density(family: str, x, params: tuple = ()) -> np.ndarray:
    """log f(x) for the named family; -inf outside the support."""
    p = _check(family, params)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if family == "uniform":
            a, b = p
            out = np.where((x >= a) & (x <= b), -math.log(b - a), -np.inf)
        elif family == "gaussian":
            m, s = p
            z = (x - m) / s
            out = -0.5 * z * z - math.log(s * math.sqrt(2.0 * math.pi))
        elif family == "exponential":
            (lam,) = p
            out = np.where(x >= 0, math.log(lam) - lam * x, -np.inf)
        elif family == "logistic":
            m, s = p
            z = np.abs(x - m) / s
            out = -z - 2.0 * np.log1p(np.exp(-z)) - math.log(s)
        else:  # gamma
            k, lam = p
            out = np.where(
                x > 0,
                k * math.log(lam) - math.lgamma(k)
                + (k - 1.0) * np.log(np.where(x > 0, x, 1.0)) - lam * x,
                -np.inf,
            )
    return out


def log_density_deriv(family: str, x, params: tuple = ()) -> np.ndarray:
    """d/dx log f(x); -inf past a bounded support, +inf before it."""
    p = _check(family, params)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if family == "uniform":
            a, b = p
            out = np.where((x >= a) & (x < b), 0.0,
                           np.where(x < a, np.inf, -np.inf))
        elif family == "gaussian":
            m, s = p
            out = -(x - m) / (s * s)
        elif family == "exponential":
            (lam,) = p
            out = np.where(x >= 0, -lam, np.inf)
        elif family == "logistic":
            m, s = p
            out = -np.tanh((x - m) / (2.0 * s)) / s
        else:  # gamma
            k, lam = p
            out = np.where(x > 0, (k - 1.0) / np.where(x > 0, x, 1.0) - lam, np.inf)
    return out
