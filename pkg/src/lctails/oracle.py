"""Independent brute-force references used in tests and acceptance runs:
a tiny-sample MLE solver, adaptive quadrature, and a Monte Carlo estimator
of the simultaneous mean-excess violation rate.

Nothing here shares a code path with the production solver beyond the
sample container.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .distributions import ReferenceDensity
from .lcmle import SortedSample
from .tails import TailBoundSpec, prop2_threshold

__all__ = ["OracleFit", "brute_force_mle", "adaptive_quadrature", "mc_violation_rate"]


@dataclass(frozen=True)
class OracleFit:
    """Concave piecewise-linear candidate from the brute-force search."""

    grid: np.ndarray
    phi: np.ndarray
    loglik: float


def _seg_log_integral(values: np.ndarray, x: np.ndarray) -> float:
    """log of int exp(linear interpolation of values over x); local closed
    form, independent of the production exp-linear kernel."""
    total = 0.0
    for a, b, lo, hi in zip(values[:-1], values[1:], x[:-1], x[1:]):
        d = b - a
        length = hi - lo
        if abs(d) < 1e-9:
            total += length * math.exp(0.5 * (a + b))
        else:
            total += length * (math.exp(b) - math.exp(a)) / d
    return math.log(total)


def _objective(values: np.ndarray, x: np.ndarray, w: np.ndarray) -> float:
    return float(np.dot(w, values)) - _seg_log_integral(values, x)


def _values_from_params(p: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """Knot values from the sorted-slope parametrization: p[0] is the first
    slope, p[1:] the non-negative slope decrements; v[0] is pinned at 0
    (the objective is invariant under adding a constant)."""
    slopes = p[0] - np.concatenate(([0.0], np.cumsum(p[1:])))
    return np.concatenate(([0.0], np.cumsum(slopes * dx)))


def brute_force_mle(sample: SortedSample, resolution: int = 6) -> OracleFit:
    """Maximize the normalized log-likelihood over concave piecewise-linear
    candidates by nested coordinate refinement.

    Capped at n <= 5 distinct points.  Candidates are parametrized by the
    first slope and the non-negative slope decrements, so concavity holds
    by construction and every coordinate has an independent box constraint;
    coordinate-wise scans with shrinking windows then converge on this
    concave objective.
    """
    x, w = sample.values, sample.weights
    m = x.size
    if m > 5:
        raise ValueError("brute_force_mle is capped at n <= 5")
    dx = np.diff(x)
    p = np.zeros(m - 1) if m > 1 else np.zeros(0)
    if m == 1:
        raise ValueError("need at least 2 distinct points")
    best = _objective(_values_from_params(p, dx), x, w)
    width = 8.0
    for _level in range(max(3, resolution)):
        for _sweep in range(12):
            improved = False
            for j in range(m - 1):
                lo = p[j] - width if j == 0 else max(0.0, p[j] - width)
                cand = np.linspace(lo, p[j] + width, 41)
                vals = np.empty(cand.size)
                for i, c in enumerate(cand):
                    trial = p.copy()
                    trial[j] = c
                    vals[i] = _objective(_values_from_params(trial, dx), x, w)
                k = int(np.argmax(vals))
                if vals[k] > best + 1e-15:
                    p[j] = cand[k]
                    best = vals[k]
                    improved = True
            if not improved:
                break
        width /= 8.0
    # the coordinate scans can zigzag in nearly flat coupled directions;
    # a box-constrained quasi-Newton polish from the scan result removes
    # the residual error (the objective is concave, so this is global)
    if p.size:
        bounds = [(None, None)] + [(0.0, None)] * (p.size - 1)
        res = scipy.optimize.minimize(
            lambda q: -_objective(_values_from_params(q, dx), x, w),
            p, method="L-BFGS-B", bounds=bounds,
            options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500},
        )
        if -res.fun > best:
            p = res.x
    v = _values_from_params(p, dx)
    phi = v - _seg_log_integral(v, x)
    return OracleFit(grid=x.copy(), phi=phi, loglik=float(np.dot(w, phi)))


def adaptive_quadrature(f, a: float, b: float, rel_tol: float = 1e-10,
                        max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with relative tolerance; infinite limits
    are mapped to [0, 1) via y = a + t/(1-t)."""
    if rel_tol < 1e-12:
        raise ValueError("rel_tol must be at least 1e-12")
    if a == -np.inf and b == np.inf:
        return (adaptive_quadrature(f, 0.0, np.inf, rel_tol, max_depth)
                + adaptive_quadrature(lambda y: f(-y), 0.0, np.inf, rel_tol, max_depth))
    if a == -np.inf:
        return adaptive_quadrature(lambda y: f(-y), -b, np.inf, rel_tol, max_depth)
    if b == np.inf:
        a0 = a

        def g(t):
            if t >= 1.0:
                return 0.0
            return f(a0 + t / (1.0 - t)) / (1.0 - t) ** 2

        return adaptive_quadrature(g, 0.0, 1.0, rel_tol, max_depth)

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, depth):
        mid = 0.5 * (lo + hi)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = simpson(lo, mid, flo, fl, fmid)
        right = simpson(mid, hi, fmid, fr, fhi)
        err = left + right - whole
        if abs(err) <= 15.0 * rel_tol * (abs(left + right) + 1e-300):
            return left + right + err / 15.0
        if depth >= max_depth:
            raise RuntimeError("adaptive quadrature failed to converge")
        return (recurse(lo, mid, flo, fl, fmid, left, depth + 1)
                + recurse(mid, hi, fmid, fr, fhi, right, depth + 1))

    mid = 0.5 * (a + b)
    fa, fm, fb = f(a), f(mid), f(b)
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 0)


def mc_violation_rate(d: ReferenceDensity, n: int, tau: float, reps: int,
                      seed: int) -> float:
    """Fraction of replications in which the empirical mean excess at some
    order statistic deviates from the true one by at least the simultaneous
    threshold.  Replication r uses seed + r, so the result is independent
    of any parallel split.
    """
    if not tau > 1:
        raise ValueError("tau must exceed 1")
    if reps < 100:
        raise ValueError("reps must be at least 100")
    ks = np.arange(1, n)
    thresholds = np.array([prop2_threshold(TailBoundSpec(n, int(k), tau)) for k in ks])
    violations = 0
    for r in range(reps):
        rng = np.random.default_rng(seed + r)
        u = np.clip(rng.random(n), 1e-16, 1.0 - 1e-16)
        x = np.sort(d.quantile(u))
        suff = np.concatenate((np.cumsum(x[::-1])[::-1], [0.0]))
        mu_emp = suff[ks] / (n - ks) - x[ks - 1]
        mu_true = np.asarray(d.mean_excess(x[ks - 1]))
        ratio_dev = np.abs(mu_emp / mu_true - 1.0)
        if np.any(ratio_dev >= thresholds):
            violations += 1
    return violations / reps
