"""Tail diagnostics: the nu envelope function, the Chernov rate function,
concentration thresholds, the Doob supremum bound, and the optimality
certificates for fitted log-concave densities.

All functions are pure over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import ReferenceDensity
from .lcmle import LogConcaveFit, SortedSample, cdf_hat, excess_integral, kink_set

__all__ = [
    "nu",
    "chernov_H",
    "chernov_tail_bound",
    "TailBoundSpec",
    "prop2_threshold",
    "doob_sup_bound",
    "prop1b_envelope",
    "prop1c_envelope",
    "CertTolerances",
    "CertificateReport",
    "certify",
]

# Taylor series of nu(t) - used below the switch radius, where the closed
# form suffers cancellation of order eps/t^2.  The series truncation error
# at radius 1e-2 is below 1e-20.
_NU_SWITCH = 1e-2


def nu(t):
    """Mean of the log-linear density on [0, 1] with slope t.

    nu(t) = int_0^1 u e^{tu} du / int_0^1 e^{tu} du, with nu(-inf) = 0 and
    nu(inf) = 1; nu(0) = 1/2, nu'(0) = 1/12.
    """
    ta = np.asarray(t, dtype=float)
    out = np.empty_like(ta)
    small = np.abs(ta) < _NU_SWITCH
    ts = np.where(small, 0.0, ta)
    # closed form written in terms of e^{-|t|} to avoid overflow
    pos = ts > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        em = np.exp(-np.abs(ts))
        # t > 0: (t - 1 + e^-t) / (t (1 - e^-t)); t < 0 by the same formula in t
        num_p = ts - 1.0 + em
        den_p = ts * (1.0 - em)
        num_n = em * (ts - 1.0) + 1.0
        den_n = ts * (em - 1.0)
        closed = np.where(pos, num_p / np.where(den_p != 0, den_p, 1.0),
                          num_n / np.where(den_n != 0, den_n, 1.0))
    with np.errstate(invalid="ignore"):
        series = 0.5 + ta / 12.0 - ta**3 / 720.0 + ta**5 / 30240.0
    out = np.where(small, series, closed)
    out = np.where(ta == np.inf, 1.0, out)
    out = np.where(ta == -np.inf, 0.0, out)
    return float(out) if np.ndim(t) == 0 else out


def chernov_H(t):
    """Rate function H(t) = t - log(1 + t) for t > -1, +inf for t <= -1."""
    ta = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ta > -1.0, ta - np.log1p(np.where(ta > -1.0, ta, 0.0)), np.inf)
    return float(out) if np.ndim(t) == 0 else out


def chernov_tail_bound(n: int, eps, two_sided: bool = False):
    """exp(-n H(eps)) one-sided (pass eps < 0 for the lower deviation),
    2 exp(-n H(|eps|)) two-sided; the raw bound, never clamped to 1."""
    ea = np.asarray(eps, dtype=float)
    if two_sided:
        out = 2.0 * np.exp(-n * chernov_H(np.abs(ea)))
    else:
        out = np.exp(-n * chernov_H(ea))
    return float(out) if np.ndim(eps) == 0 else out


@dataclass(frozen=True)
class TailBoundSpec:
    """Parameters of the simultaneous mean-excess concentration bound."""

    n: int
    k: int
    tau: float

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("tau must exceed 1")
        if not 1 <= self.k <= self.n - 1:
            raise ValueError("k must lie in 1..n-1")


def prop2_threshold(spec: TailBoundSpec) -> float:
    """sqrt(2 tau log(n)/(n-k)) + tau log(n)/(n-k); the associated global
    guarantee on the violation probability is 2 n^(1-tau)."""
    r = spec.tau * math.log(spec.n) / (spec.n - spec.k)
    return math.sqrt(2.0 * r) + r


def doob_sup_bound(n: int, f_b: float) -> float:
    """4 / (n (1 - F(b))), the martingale bound on
    E sup_{x<=b} |(F_emp - F)/(1 - F)|^2."""
    if not 0.0 <= f_b < 1.0:
        raise ValueError("F(b) must lie in [0, 1)")
    return 4.0 / (n * (1.0 - f_b))


def _inv_neg(slope: float) -> float:
    """-1/slope with -1/(-inf) := 0."""
    if slope == -np.inf:
        return 0.0
    return -1.0 / slope


def prop1b_envelope(d: ReferenceDensity, x: float):
    """(lower, upper) envelope of mu(x) for bounded support:
    (b_o - x) nu(phi'(b_o-)(b_o - x)) <= mu(x) <= (b_o - x) nu(phi'(x+)(b_o - x))."""
    a_o, b_o = d.support
    if not np.isfinite(b_o):
        raise ValueError("the bounded-support envelope requires b_o < inf")
    if not a_o <= x < b_o:
        raise ValueError("x must lie in [a_o, b_o)")
    gap = b_o - x
    lower = gap * nu(d.slope_at_sup() * gap)
    slope_x = d.log_density_rderiv(x)
    upper = gap * nu(slope_x * gap if np.isfinite(slope_x) else slope_x)
    return lower, upper


def prop1c_envelope(d: ReferenceDensity, x: float):
    """(lower, upper) envelope of mu(x) for unbounded support:
    -1/phi'(inf-) <= mu(x) <= -1/phi'(x+), with -1/(-inf) := 0."""
    a_o, b_o = d.support
    if np.isfinite(b_o):
        raise ValueError("the unbounded-support envelope requires b_o = inf")
    slope_x = d.log_density_rderiv(x)
    if not slope_x < 0:
        raise ValueError("phi'(x+) must be negative")
    return _inv_neg(d.slope_at_sup()), _inv_neg(slope_x)


# ---------------------------------------------------------------------------
# Optimality certificates.


@dataclass(frozen=True)
class CertTolerances:
    ineq: float = 1e-6   # slack of the first-moment inequality over all points
    eq: float = 1e-6     # |slack| at kinks
    cdf: float = 1e-8    # breach of the sandwich for F_hat at kinks


@dataclass(frozen=True)
class CertificateReport:
    """Residuals of the characterization inequalities for a fit."""

    max_violation_char1: float   # most negative slack over all sample values
    max_eq_residual_char1: float  # largest |slack| over the kink set
    max_violation_char2: float   # largest breach of the cdf sandwich at kinks
    passed: bool

    def to_csv_row(self) -> str:
        return (
            f"{self.max_violation_char1!r},{self.max_eq_residual_char1!r},"
            f"{self.max_violation_char2!r},{int(self.passed)}"
        )

    @classmethod
    def from_csv_row(cls, row: str) -> "CertificateReport":
        a, b, c, p = row.strip().split(",")
        return cls(float(a), float(b), float(c), bool(int(p)))


def certify(fit: LogConcaveFit, sample: SortedSample,
            tol: CertTolerances | None = None) -> CertificateReport:
    """Evaluate the characterization inequalities of the MLE.

    At every sample value b, int (x-b)^+ under the empirical distribution
    must weakly dominate the same integral under the fit, with equality at
    kinks; and at kinks the fitted cdf is sandwiched between F_emp - w and
    F_emp.
    """
    if not fit.converged:
        raise ValueError("certify requires a converged fit")
    if tol is None:
        tol = CertTolerances()
    v, w = sample.values, sample.weights
    suff_w = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))
    suff_wx = np.concatenate((np.cumsum((w * v)[::-1])[::-1], [0.0]))
    idx = np.arange(v.size)
    g_emp = (suff_wx[idx + 1] - v * suff_w[idx + 1])
    g_fit = excess_integral(fit, v)
    slack = g_emp - g_fit
    kinks = kink_set(fit)
    kpos = np.searchsorted(v, kinks)
    max_violation = float(np.min(slack))
    max_eq = float(np.max(np.abs(slack[kpos])))
    f_hat = np.atleast_1d(cdf_hat(fit, kinks))
    f_emp = np.cumsum(w)[kpos]
    breach = np.maximum(f_hat - f_emp, (f_emp - w[kpos]) - f_hat)
    max_breach = float(max(np.max(breach), 0.0))
    passed = (max_violation >= -tol.ineq) and (max_eq <= tol.eq) and (max_breach <= tol.cdf)
    return CertificateReport(max_violation, max_eq, max_breach, passed)
