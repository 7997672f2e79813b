"""Log-concave maximum likelihood estimation for univariate samples.

The fitted log-density is concave and piecewise linear on the sample hull,
with slope changes only at observations.  The solver is an active-set
scheme: it maintains a subset of candidate knots, maximizes the penalized
likelihood

    L(psi) = sum_i w_i psi(x_i) - int exp(psi) + 1

over the knot values by damped Newton steps (the Hessian is tridiagonal),
and grows/shrinks the knot set until the characterization inequalities
hold.  The unconstrained maximizer of L is automatically normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

__all__ = [
    "SortedSample",
    "LogConcaveFit",
    "SolverConfig",
    "SolverError",
    "fit_mle",
    "eval_phi",
    "eval_phi_rderiv",
    "kink_set",
    "cdf_hat",
    "excess_integral",
    "mean_excess_hat",
    "mean_excess_emp",
    "exp_linear_integral",
    "save_fit",
    "load_fit",
]


# ---------------------------------------------------------------------------
# Stable integrals of exp(linear) over a segment.
#
# With d = b - a the building blocks are
#   I0(d) = int_0^1 exp(d t) dt,
#   I1(d) = int_0^1 t exp(d t) dt,
#   I2(d) = int_0^1 t^2 exp(d t) dt.
# The closed forms lose precision near d = 0, so a Taylor expansion is used
# for small |d|.

_SERIES_RADIUS = 1e-2

# Taylor coefficients of Ik(d) = sum_j d^j / (j! (j + k + 1)).
_I0_COEF = np.array([1.0, 1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720, 1 / 5040, 1 / 40320])
_I1_COEF = np.array([1 / 2, 1 / 3, 1 / 8, 1 / 30, 1 / 144, 1 / 840, 1 / 5760, 1 / 45360])
_I2_COEF = np.array([1 / 3, 1 / 4, 1 / 10, 1 / 36, 1 / 168, 1 / 960, 1 / 6480, 1 / 50400])


def _poly(coef: np.ndarray, d: np.ndarray) -> np.ndarray:
    out = np.full_like(d, coef[-1])
    for c in coef[-2::-1]:
        out = out * d + c
    return out


def _i0(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    small = np.abs(d) < _SERIES_RADIUS
    ds = np.where(small, 0.0, d)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        closed = np.expm1(ds) / ds
    return np.where(small, _poly(_I0_COEF, d), closed)


def _i1(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    small = np.abs(d) < _SERIES_RADIUS
    ds = np.where(small, 1.0, d)
    with np.errstate(over="ignore", invalid="ignore"):
        closed = (np.exp(ds) * (ds - 1.0) + 1.0) / ds**2
    return np.where(small, _poly(_I1_COEF, d), closed)


def _i2(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    small = np.abs(d) < _SERIES_RADIUS
    ds = np.where(small, 1.0, d)
    with np.errstate(over="ignore", invalid="ignore"):
        closed = (np.exp(ds) * (ds**2 - 2.0 * ds + 2.0) - 2.0) / ds**3
    return np.where(small, _poly(_I2_COEF, d), closed)


def exp_linear_integral(a, b, length):
    """len * int_0^1 exp((1-t) a + t b) dt, stable for a close to b.

    Anchored at max(a, b) so rising segments do not overflow the kernel:
    e^a I0(b-a) = e^b I0(a-b).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    length = np.asarray(length, dtype=float)
    m = np.maximum(a, b)
    with np.errstate(over="ignore"):
        out = length * np.exp(m) * _i0(-np.abs(b - a))
    if out.ndim == 0:
        return float(out)
    return out


def _exp_linear_first_moment(a, b, length):
    """len^2 * int_0^1 t exp((1-t) a + t b) dt (first moment about the left
    end), anchored at max(a, b): e^a I1(d) = e^b (I0 - I1)(-d)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    length = np.asarray(length, dtype=float)
    d = b - a
    swap = d > 0
    m = np.where(swap, b, a)
    i0 = _i0(-np.abs(d))
    i1 = _i1(-np.abs(d))
    with np.errstate(over="ignore"):
        out = length**2 * np.exp(m) * np.where(swap, i0 - i1, i1)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Sample and fit containers.


@dataclass(frozen=True)
class SortedSample:
    """Ordered observations with weights; ties merged by weight accumulation."""

    values: np.ndarray
    weights: np.ndarray
    n_obs: int

    @classmethod
    def from_data(cls, data, weights=None) -> "SortedSample":
        x = np.asarray(data, dtype=float).ravel()
        if x.size < 2:
            raise ValueError("at least 2 observations are required")
        if not np.all(np.isfinite(x)):
            raise ValueError("observations must be finite")
        if weights is None:
            w = np.full(x.size, 1.0 / x.size)
        else:
            w = np.asarray(weights, dtype=float).ravel()
            if w.shape != x.shape:
                raise ValueError("weights must match the data in length")
            if np.any(w <= 0):
                raise ValueError("weights must be positive")
            w = w / w.sum()
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        uniq, inverse = np.unique(x, return_inverse=True)
        wm = np.zeros(uniq.size)
        np.add.at(wm, inverse, w)
        if uniq.size < 2:
            raise ValueError("at least 2 distinct observations are required")
        return cls(values=uniq, weights=wm, n_obs=x.size)

    def __post_init__(self):
        if np.any(np.diff(self.values) <= 0):
            raise ValueError("values must be strictly increasing")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @property
    def m(self) -> int:
        return self.values.size

    def ecdf(self, x) -> np.ndarray:
        """Empirical distribution function (right-continuous)."""
        cw = np.cumsum(self.weights)
        idx = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        out = np.concatenate(([0.0], cw))[idx]
        return out if np.ndim(x) else float(out)


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 500
    newton_tol: float = 1e-12          # Newton decrement target
    add_tol: float = 1e-11             # hat-direction derivative threshold
    kink_tol_scale: float = 1e-8       # kink = slope drop > scale*(max|slope|+1)
    slope_cap_scale: float = 1e6       # |slope| <= scale / range
    obj_tol: float = 1e-6
    cert_ineq_tol: float = 1e-6
    cert_eq_tol: float = 1e-6
    cert_cdf_tol: float = 1e-8


@dataclass(frozen=True)
class LogConcaveFit:
    """Piecewise-linear concave log-density with knots at observations."""

    knots: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    norm_residual: float
    iterations: int
    converged: bool
    n_obs: int
    kink_tol: float = 1e-8
    loglik: float = field(default=float("nan"))


class SolverError(RuntimeError):
    """Raised when fit_mle fails to converge; carries the last iterate."""

    def __init__(self, message: str, fit: LogConcaveFit | None = None):
        super().__init__(message)
        self.fit = fit


# ---------------------------------------------------------------------------
# Evaluation of a fit.


def eval_phi(fit: LogConcaveFit, x):
    """Fitted log-density; -inf outside [X_(1), X_(n)]."""
    xa = np.asarray(x, dtype=float)
    out = np.interp(xa, fit.knots, fit.values)
    out = np.where((xa < fit.knots[0]) | (xa > fit.knots[-1]), -np.inf, out)
    return float(out) if xa.ndim == 0 else out


def _phi_rderiv_raw(fit: LogConcaveFit, xa: np.ndarray) -> np.ndarray:
    """Right derivative with +inf left of the hull (internal convention)."""
    seg = np.clip(np.searchsorted(fit.knots, xa, side="right") - 1, 0, len(fit.slopes) - 1)
    out = fit.slopes[seg] if len(fit.slopes) else np.zeros_like(xa)
    out = np.where(xa >= fit.knots[-1], -np.inf, out)
    out = np.where(xa < fit.knots[0], np.inf, out)
    return out


def eval_phi_rderiv(fit: LogConcaveFit, x):
    """Right derivative of the fitted log-density; -inf for x >= X_(n).

    There is no convention left of the support, so x < X_(1) is rejected.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < fit.knots[0]):
        raise ValueError("right derivative is undefined left of X_(1)")
    out = _phi_rderiv_raw(fit, np.atleast_1d(xa))
    return float(out[0]) if xa.ndim == 0 else out


def kink_set(fit: LogConcaveFit, kink_tol: float | None = None) -> np.ndarray:
    """Both extreme observations plus interior knots with a genuine slope drop."""
    if not fit.converged:
        raise ValueError("kink_set requires a converged fit")
    if kink_tol is None:
        smax = np.max(np.abs(fit.slopes)) if len(fit.slopes) else 0.0
        kink_tol = fit.kink_tol * (smax + 1.0)
    if len(fit.slopes) < 2:
        return fit.knots[[0, -1]].copy()
    drops = fit.slopes[:-1] - fit.slopes[1:]
    interior = fit.knots[1:-1][drops > kink_tol]
    return np.concatenate(([fit.knots[0]], interior, [fit.knots[-1]]))


def _segment_masses(fit: LogConcaveFit) -> np.ndarray:
    lens = np.diff(fit.knots)
    return exp_linear_integral(fit.values[:-1], fit.values[1:], lens)


def cdf_hat(fit: LogConcaveFit, x):
    """Distribution function of the fitted density (exact per segment)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    masses = np.atleast_1d(_segment_masses(fit))
    cum = np.concatenate(([0.0], np.cumsum(masses)))
    seg = np.clip(np.searchsorted(fit.knots, xa, side="right") - 1, 0, len(masses) - 1)
    frac = xa - fit.knots[seg]
    phi_x = fit.values[seg] + fit.slopes[seg] * frac
    partial = np.where(frac > 0, exp_linear_integral(fit.values[seg], phi_x, frac), 0.0)
    out = cum[seg] + partial
    out = np.where(xa <= fit.knots[0], 0.0, out)
    out = np.where(xa >= fit.knots[-1], cum[-1], out)
    return float(out[0]) if np.ndim(x) == 0 else out


def excess_integral(fit: LogConcaveFit, b):
    """int (x - b)^+ dP_hat, exact per segment via the exp-linear kernel."""
    ba = np.atleast_1d(np.asarray(b, dtype=float))
    lens = np.diff(fit.knots)
    masses = np.atleast_1d(exp_linear_integral(fit.values[:-1], fit.values[1:], lens))
    mom = np.atleast_1d(_exp_linear_first_moment(fit.values[:-1], fit.values[1:], lens))
    abs_mom = fit.knots[:-1] * masses + mom  # int_seg x exp(phi)
    suff_mass = np.concatenate((np.cumsum(masses[::-1])[::-1], [0.0]))
    suff_mom = np.concatenate((np.cumsum(abs_mom[::-1])[::-1], [0.0]))
    seg = np.clip(np.searchsorted(fit.knots, ba, side="right") - 1, 0, len(lens) - 1)
    # contribution of the partially covered segment [b, knot_{seg+1}]
    l2 = fit.knots[seg + 1] - ba
    phi_b = fit.values[seg] + fit.slopes[seg] * (ba - fit.knots[seg])
    part = np.where(l2 > 0, _exp_linear_first_moment(phi_b, fit.values[seg + 1], np.maximum(l2, 0.0)), 0.0)
    out = part + suff_mom[seg + 1] - ba * suff_mass[seg + 1]
    total_mass = suff_mass[0]
    total_mom = suff_mom[0]
    out = np.where(ba <= fit.knots[0], total_mom - ba * total_mass, out)
    out = np.where(ba >= fit.knots[-1], 0.0, out)
    return float(out[0]) if np.ndim(b) == 0 else out


def mean_excess_hat(fit: LogConcaveFit, x):
    """Mean excess function of the fitted density; 0 where its cdf is 1."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    tail = 1.0 - np.atleast_1d(cdf_hat(fit, xa))
    num = np.atleast_1d(excess_integral(fit, xa))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(tail > 0, num / tail, 0.0)
    return float(out[0]) if np.ndim(x) == 0 else out


def mean_excess_emp(sample: SortedSample, x):
    """Empirical mean excess: sum w_i (x_i - x)^+ / sum_{x_i > x} w_i."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    v, w = sample.values, sample.weights
    suff_w = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))
    suff_wx = np.concatenate((np.cumsum((w * v)[::-1])[::-1], [0.0]))
    idx = np.searchsorted(v, xa, side="right")
    num = suff_wx[idx] - xa * suff_w[idx]
    den = suff_w[idx]
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return float(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Solver internals.


def _standardize(sample: SortedSample):
    m = float(np.dot(sample.weights, sample.values))
    var = float(np.dot(sample.weights, (sample.values - m) ** 2))
    s = math.sqrt(var) if var > 0 else 1.0
    return (sample.values - m) / s, m, s


class _Inner:
    """Inner problem: maximize L over values at the active knots."""

    def __init__(self, x: np.ndarray, w: np.ndarray, cfg: SolverConfig):
        self.x = x
        self.w = w
        self.cfg = cfg
        self.slope_cap = cfg.slope_cap_scale / (x[-1] - x[0])

    def set_knots(self, kidx: np.ndarray):
        self.kidx = kidx
        self.t = self.x[kidx]
        self.lens = np.diff(self.t)
        p = len(kidx)
        seg = np.clip(np.searchsorted(self.t, self.x, side="right") - 1, 0, p - 2)
        theta = (self.x - self.t[seg]) / self.lens[seg]
        a = np.zeros(p)
        np.add.at(a, seg, self.w * (1.0 - theta))
        np.add.at(a, seg + 1, self.w * theta)
        self.avec = a

    def objective(self, y: np.ndarray) -> float:
        with np.errstate(over="ignore"):
            total = np.sum(exp_linear_integral(y[:-1], y[1:], self.lens))
        return float(self.avec @ y) - float(total) + 1.0

    def grad_hess(self, y: np.ndarray):
        # anchored at the higher segment endpoint so rising segments do not
        # overflow: e^a Ik(d) maps to e^b applied to the mirrored kernel
        d = np.diff(y)
        swap = d > 0
        dd = -np.abs(d)
        with np.errstate(over="ignore"):
            e = np.exp(np.where(swap, y[1:], y[:-1]))
        i0, i1, i2 = _i0(dd), _i1(dd), _i2(dd)
        le = self.lens * e
        t_lo = i0 - i1          # weight of the anchored endpoint's neighbor
        t_hi = i1
        t_lo2 = i0 - 2.0 * i1 + i2
        t_hi2 = i2
        ja = le * np.where(swap, t_hi, t_lo)
        jb = le * np.where(swap, t_lo, t_hi)
        jaa = le * np.where(swap, t_hi2, t_lo2)
        jab = le * (i1 - i2)
        jbb = le * np.where(swap, t_lo2, t_hi2)
        p = len(y)
        grad = self.avec.copy()
        grad[:-1] -= ja
        grad[1:] -= jb
        diag = np.zeros(p)
        diag[:-1] += jaa
        diag[1:] += jbb
        return grad, diag, jab

    def newton_direction(self, grad, diag, off):
        ab = np.zeros((2, len(diag)))
        ab[0, 1:] = off
        ab[1] = diag
        try:
            step = scipy.linalg.solveh_banded(ab, grad, lower=False)
        except scipy.linalg.LinAlgError:
            step = grad / np.maximum(diag, 1e-300)
        return step

    def solve(self, kidx: np.ndarray, y: np.ndarray, budget: int):
        """Damped Newton with concavity-preserving line search.

        Knots whose slope drop vanishes during a boundary step are removed.
        Returns (kidx, y, decrement, clamped, steps_used).
        """
        cfg = self.cfg
        self.set_knots(kidx)
        clamped = False
        steps = 0
        stalls = 0
        dec = np.inf
        while steps < budget:
            steps += 1
            grad, diag, off = self.grad_hess(y)
            step = self.newton_direction(grad, diag, off)
            dec = math.sqrt(max(float(grad @ step), 0.0))
            if dec < cfg.newton_tol:
                break
            slopes = np.diff(y) / self.lens
            dslopes = np.diff(step) / self.lens
            # largest step keeping the slope sequence non-increasing
            alpha_max = 1.0
            if len(slopes) > 1:
                drops = slopes[:-1] - slopes[1:]
                ddrops = dslopes[:-1] - dslopes[1:]
                # a knot sitting exactly on the line whose drop the step
                # wants to turn negative blocks any progress; eject it
                binding = (drops <= 1e-12 * (np.max(np.abs(slopes)) + 1.0)) & (ddrops < 0)
                if np.any(binding):
                    keep = np.ones(len(self.kidx), dtype=bool)
                    keep[1:-1] = ~binding
                    y = y[keep]
                    self.set_knots(self.kidx[keep])
                    continue
                bad = ddrops < 0
                if np.any(bad):
                    with np.errstate(divide="ignore"):
                        limits = np.where(bad, drops / np.maximum(-ddrops, 1e-300), np.inf)
                    alpha_max = min(1.0, float(np.min(limits)))
                    if alpha_max < 1e-6:
                        # the step annihilates this knot's drop almost
                        # immediately; ejecting it unblocks the line search
                        keep = np.ones(len(self.kidx), dtype=bool)
                        keep[1 + int(np.argmin(limits))] = False
                        y = y[keep]
                        self.set_knots(self.kidx[keep])
                        continue
            # slope cap against exp overflow
            alpha_cap = 1.0
            grow = np.abs(slopes + dslopes) > self.slope_cap
            if np.any(grow):
                with np.errstate(divide="ignore"):
                    room = np.where(
                        np.abs(dslopes) > 0,
                        (self.slope_cap * np.sign(dslopes) - slopes) / np.where(dslopes != 0, dslopes, 1.0),
                        np.inf,
                    )
                room = room[room > 0]
                if room.size:
                    alpha_cap = min(1.0, float(np.min(room)))
            alpha = min(1.0, alpha_max, alpha_cap)
            if alpha <= 0:
                break
            # backtracking (Armijo)
            f0 = self.objective(y)
            gd = float(grad @ step)
            hit_boundary = alpha == alpha_max and alpha_max < min(1.0, alpha_cap)
            f_new = f0
            while alpha > 1e-14:
                y_new = y + alpha * step
                f_new = self.objective(y_new)
                if f_new >= f0 + 0.1 * alpha * gd:
                    break
                alpha *= 0.5
                hit_boundary = False
            else:
                # no representable ascent left along the step
                if dec < 1e-5:
                    dec = 0.0
                break
            y = y + alpha * step
            # near the optimum the decrement can sit above newton_tol while
            # the objective is already pinned at its numeric ceiling; treat
            # two consecutive zero-progress steps as converged
            if dec < 1e-5 and f_new - f0 <= 1e-16 * (1.0 + abs(f0)):
                stalls += 1
                if stalls >= 2:
                    dec = 0.0
                    break
            else:
                stalls = 0
            if alpha == alpha_cap and alpha_cap < min(1.0, alpha_max):
                clamped = True
            if hit_boundary and len(self.lens) > 1:
                slopes = np.diff(y) / self.lens
                drops = slopes[:-1] - slopes[1:]
                keep = np.ones(len(self.kidx), dtype=bool)
                keep[1:-1] = drops > 1e-13 * (np.max(np.abs(slopes)) + 1.0)
                if not keep.all():
                    y = y[keep]
                    self.set_knots(self.kidx[keep])
        return self.kidx, y, dec, clamped, steps

    def nudge(self, y: np.ndarray, pos: int, iters: int = 3) -> np.ndarray:
        """1-D ascent in y[pos] (the hat direction of a freshly inserted
        knot), capped so the slope drops at the neighboring knots stay
        non-negative.  Moves the new knot strictly inside the concavity
        cone so the subsequent Newton iteration has room to move.
        """
        p = len(y)
        for _ in range(iters):
            grad, diag, _ = self.grad_hess(y)
            delta = grad[pos] / max(diag[pos], 1e-300)
            if delta <= 0:
                break
            cap = delta
            slopes = np.diff(y) / self.lens
            if pos >= 2:
                drop_left = slopes[pos - 2] - slopes[pos - 1]
                cap = min(cap, 0.999 * drop_left * self.lens[pos - 1])
            if pos <= p - 3:
                drop_right = slopes[pos] - slopes[pos + 1]
                cap = min(cap, 0.999 * drop_right * self.lens[pos])
            if cap <= 0:
                break
            y = y.copy()
            y[pos] += cap
            if cap == delta:
                break
        return y

    def candidates(self, y: np.ndarray):
        """Per-segment best hat-perturbation directional derivatives.

        A hat at a non-knot observation x_j (supported on its bracketing
        knots) is the steepest admissible ascent direction; at the optimum
        all such derivatives are <= 0.  Returns a list of (D_j, j), one per
        segment that contains candidate observations.
        """
        out = []
        p = len(self.kidx)
        for s in range(p - 1):
            lo, hi = self.kidx[s], self.kidx[s + 1]
            if hi - lo < 2:
                continue
            u = self.x[lo + 1:hi]
            wu = self.w[lo + 1:hi]
            kl, kr = self.t[s], self.t[s + 1]
            yl, yr = y[s], y[s + 1]
            sl = (yr - yl) / (kr - kl)
            cw = np.cumsum(wu)
            cwu = np.cumsum(wu * u)
            lsum = cwu - kl * cw
            rsum = kr * (cw[-1] - cw) - (cwu[-1] - cwu)
            l1 = u - kl
            l2 = kr - u
            phi_u = yl + sl * l1
            # mirrored kernels on rising segments to avoid overflow
            if sl > 0:
                int_left = l1 * np.exp(phi_u) * (_i0(-sl * l1) - _i1(-sl * l1))
                int_right = l2 * np.exp(yr) * _i1(-sl * l2)
            else:
                int_left = l1 * np.exp(yl) * _i1(sl * l1)
                int_right = l2 * np.exp(phi_u) * (_i0(sl * l2) - _i1(sl * l2))
            d = lsum / l1 + rsum / l2 - int_left - int_right
            k = int(np.argmax(d))
            out.append((float(d[k]), lo + 1 + k))
        return out


def fit_mle(sample: SortedSample, cfg: SolverConfig | None = None) -> LogConcaveFit:
    """Compute the log-concave NPMLE of a sorted, weighted sample.

    Raises SolverError (carrying the last iterate) on non-convergence.
    """
    if cfg is None:
        cfg = SolverConfig()
    z, center, scale = _standardize(sample)
    w = sample.weights
    inner = _Inner(z, w, cfg)
    kidx = np.array([0, len(z) - 1])
    # moment-matched Gaussian start (z is standardized, so phi0 = -z^2/2 - log sqrt(2 pi))
    y = -0.5 * z[kidx] ** 2 - 0.5 * math.log(2.0 * math.pi)
    iterations = 0
    converged = False
    clamped_final = False
    dec = np.inf
    for outer in range(cfg.max_iter):
        iterations += 1
        kidx, y, dec, clamped, _ = inner.solve(kidx, y, budget=100)
        cands = [(d, j) for d, j in inner.candidates(y) if d > cfg.add_tol]
        if not cands and dec < cfg.newton_tol:
            converged = not clamped
            clamped_final = clamped
            break
        for _, j in sorted(cands, key=lambda c: -c[0]):
            pos = int(np.searchsorted(kidx, j))
            val = float(np.interp(z[j], z[kidx], y))
            kidx = np.insert(kidx, pos, j)
            y = np.insert(y, pos, val)
            inner.set_knots(kidx)
            y = inner.nudge(y, pos)
    inner.set_knots(kidx)
    # exact renormalization: shifting all values by -log(int exp psi) is an
    # ascent step in the constant direction and zeroes the mass residual
    total = float(np.sum(exp_linear_integral(y[:-1], y[1:], inner.lens)))
    if total > 0 and math.isfinite(total):
        y = y - math.log(total)
    grad, _, _ = inner.grad_hess(y)
    fit = _fit_from_state(sample, z, kidx, y, center, scale, iterations, converged, cfg, grad)
    if not converged:
        reason = "slope cap active" if clamped_final else "active-set iteration limit reached"
        raise SolverError(
            f"fit_mle did not converge ({reason}; decrement={dec:.3e}, "
            f"norm_residual={fit.norm_residual:.3e})",
            fit=fit,
        )
    return fit


def _fit_from_state(sample, z, kidx, y, center, scale, iterations, converged, cfg, grad):
    knots = sample.values[kidx]  # exact sample values, not round-tripped
    values = y - math.log(scale)
    slopes = np.diff(values) / np.diff(knots) if len(knots) > 1 else np.zeros(0)
    norm_res = abs(float(np.sum(grad)))  # sum of gradient = 1 - int exp(psi)
    loglik = float(np.dot(sample.weights, np.interp(sample.values, knots, values)))
    return LogConcaveFit(
        knots=knots,
        values=values,
        slopes=slopes,
        norm_residual=norm_res,
        iterations=iterations,
        converged=converged,
        n_obs=sample.n_obs,
        kink_tol=cfg.kink_tol_scale,
        loglik=loglik,
    )


# ---------------------------------------------------------------------------
# Flat text serialization: header line, then one knot per line.


def save_fit(fit: LogConcaveFit, path) -> None:
    with open(path, "w") as fh:
        fh.write(
            f"# n={fit.n_obs}\tnorm_residual={fit.norm_residual!r}"
            f"\tconverged={int(fit.converged)}\titerations={fit.iterations}\n"
        )
        fh.write("x\tphi\tslope_right\n")
        for i, (xk, vk) in enumerate(zip(fit.knots, fit.values)):
            slope = fit.slopes[i] if i < len(fit.slopes) else -np.inf
            fh.write(f"{float(xk)!r}\t{float(vk)!r}\t{float(slope)!r}\n")


def load_fit(path) -> LogConcaveFit:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError("missing fit header")
        meta = dict(tok.split("=", 1) for tok in header[1:].split())
        fh.readline()  # column names
        rows = [line.split("\t") for line in fh if line.strip()]
    knots = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    slopes = np.array([float(r[2]) for r in rows[:-1]])
    return LogConcaveFit(
        knots=knots,
        values=values,
        slopes=slopes,
        norm_residual=float(meta["norm_residual"]),
        iterations=int(meta["iterations"]),
        converged=bool(int(meta["converged"])),
        n_obs=int(meta["n"]),
        loglik=float("nan"),
    )
