"""Analytic log-concave reference families.

Each family provides the log-density phi, its right derivative, the
distribution function and its inverse, the mean excess function, and
seeded sampling by inversion.  These play the role of the true sampling
distribution in the simulation experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .lcmle import SortedSample

__all__ = ["ReferenceDensity", "FAMILIES"]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

FAMILIES = ("uniform", "gaussian", "exponential", "logistic", "gamma")


@dataclass(frozen=True)
class ReferenceDensity:
    """A log-concave density with closed-form tail quantities.

    Immutable; samplers take the seed as an argument, so instances are safe
    to share across threads.
    """

    family: str
    params: tuple
    support: tuple  # (a_o, b_o), possibly infinite

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "ReferenceDensity":
        if not b > a:
            raise ValueError("uniform requires b > a")
        return cls("uniform", (float(a), float(b)), (float(a), float(b)))

    @classmethod
    def gaussian(cls, mean: float = 0.0, sd: float = 1.0) -> "ReferenceDensity":
        if sd <= 0:
            raise ValueError("gaussian requires sd > 0")
        return cls("gaussian", (float(mean), float(sd)), (-np.inf, np.inf))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "ReferenceDensity":
        if rate <= 0:
            raise ValueError("exponential requires rate > 0")
        return cls("exponential", (float(rate),), (0.0, np.inf))

    @classmethod
    def logistic(cls, loc: float = 0.0, scale: float = 1.0) -> "ReferenceDensity":
        if scale <= 0:
            raise ValueError("logistic requires scale > 0")
        return cls("logistic", (float(loc), float(scale)), (-np.inf, np.inf))

    @classmethod
    def gamma(cls, shape: float, rate: float = 1.0) -> "ReferenceDensity":
        # shape < 1 would make the log-density convex near 0
        if shape < 1:
            raise ValueError("gamma requires shape >= 1 for log-concavity")
        if rate <= 0:
            raise ValueError("gamma requires rate > 0")
        return cls("gamma", (float(shape), float(rate)), (0.0, np.inf))

    @classmethod
    def from_name(cls, family: str, **kwargs) -> "ReferenceDensity":
        try:
            return getattr(cls, family)(**kwargs)
        except AttributeError:
            raise ValueError(f"unknown family {family!r}") from None

    # -- log-density --------------------------------------------------------

    def log_density(self, x):
        xa = np.asarray(x, dtype=float)
        a_o, b_o = self.support
        if self.family == "uniform":
            a, b = self.params
            out = np.where((xa >= a) & (xa <= b), -math.log(b - a), -np.inf)
        elif self.family == "gaussian":
            m, s = self.params
            out = -_LOG_SQRT_2PI - math.log(s) - 0.5 * ((xa - m) / s) ** 2
        elif self.family == "exponential":
            (lam,) = self.params
            out = np.where(xa >= 0, math.log(lam) - lam * xa, -np.inf)
        elif self.family == "logistic":
            loc, s = self.params
            z = (xa - loc) / s
            out = np.where(
                z >= 0,
                -z - 2.0 * np.log1p(np.exp(-np.abs(z))),
                z - 2.0 * np.log1p(np.exp(-np.abs(z))),
            ) - math.log(s)
        else:  # gamma
            k, lam = self.params
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(
                    xa > 0,
                    k * math.log(lam) - special.gammaln(k) + (k - 1.0) * np.log(np.where(xa > 0, xa, 1.0)) - lam * xa,
                    math.log(lam) if k == 1.0 else -np.inf,
                )
            out = np.where(xa < 0, -np.inf, out)
        return float(out) if np.ndim(x) == 0 else out

    def log_density_rderiv(self, x):
        """Right derivative of phi; -inf for x >= b_o when b_o is finite,
        +inf left of the support."""
        xa = np.asarray(x, dtype=float)
        a_o, b_o = self.support
        if self.family == "uniform":
            out = np.zeros_like(xa)
        elif self.family == "gaussian":
            m, s = self.params
            out = -(xa - m) / s**2
        elif self.family == "exponential":
            (lam,) = self.params
            out = np.full_like(xa, -lam)
        elif self.family == "logistic":
            loc, s = self.params
            out = -np.tanh((xa - loc) / (2.0 * s)) / s
        else:  # gamma
            k, lam = self.params
            with np.errstate(divide="ignore"):
                out = np.where(xa > 0, (k - 1.0) / np.where(xa > 0, xa, 1.0) - lam, np.inf if k > 1 else -lam)
        if np.isfinite(b_o):
            out = np.where(xa >= b_o, -np.inf, out)
        out = np.where(xa < a_o, np.inf, out)
        return float(out) if np.ndim(x) == 0 else out

    def slope_at_sup(self) -> float:
        """phi'(b_o-) for bounded support, phi'(inf-) otherwise."""
        if self.family == "uniform":
            return 0.0
        if self.family == "gaussian":
            return -np.inf
        if self.family == "exponential":
            return -self.params[0]
        if self.family == "logistic":
            return -1.0 / self.params[1]
        return -self.params[1]  # gamma rate

    # -- distribution function ---------------------------------------------

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        if self.family == "uniform":
            a, b = self.params
            out = np.clip((xa - a) / (b - a), 0.0, 1.0)
        elif self.family == "gaussian":
            m, s = self.params
            out = special.ndtr((xa - m) / s)
        elif self.family == "exponential":
            (lam,) = self.params
            out = np.where(xa > 0, -np.expm1(-lam * np.maximum(xa, 0.0)), 0.0)
        elif self.family == "logistic":
            loc, s = self.params
            out = special.expit((xa - loc) / s)
        else:
            k, lam = self.params
            out = special.gammainc(k, lam * np.maximum(xa, 0.0))
        return float(out) if np.ndim(x) == 0 else out

    def sf(self, x):
        """1 - cdf, accurate in the right tail."""
        xa = np.asarray(x, dtype=float)
        if self.family == "uniform":
            a, b = self.params
            out = np.clip((b - xa) / (b - a), 0.0, 1.0)
        elif self.family == "gaussian":
            m, s = self.params
            out = special.ndtr(-(xa - m) / s)
        elif self.family == "exponential":
            (lam,) = self.params
            out = np.where(xa > 0, np.exp(-lam * np.maximum(xa, 0.0)), 1.0)
        elif self.family == "logistic":
            loc, s = self.params
            out = special.expit(-(xa - loc) / s)
        else:
            k, lam = self.params
            out = special.gammaincc(k, lam * np.maximum(xa, 0.0))
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, u):
        ua = np.asarray(u, dtype=float)
        if np.any(ua <= 0.0) or np.any(ua >= 1.0):
            raise ValueError("quantile requires u in (0, 1)")
        if self.family == "uniform":
            a, b = self.params
            out = a + (b - a) * ua
        elif self.family == "gaussian":
            m, s = self.params
            out = m + s * special.ndtri(ua)
        elif self.family == "exponential":
            (lam,) = self.params
            out = -np.log1p(-ua) / lam
        elif self.family == "logistic":
            loc, s = self.params
            out = loc + s * (np.log(ua) - np.log1p(-ua))
        else:
            k, lam = self.params
            out = special.gammaincinv(k, ua) / lam
        return float(out) if np.ndim(u) == 0 else out

    # -- mean excess --------------------------------------------------------

    def mean_excess(self, x):
        """mu(x) = E[(X - x)^+] / (1 - F(x)); 0 where F(x) = 1."""
        xa = np.asarray(x, dtype=float)
        if self.family == "uniform":
            a, b = self.params
            out = np.where(xa < a, 0.5 * (a + b) - xa, 0.5 * (b - xa))
            out = np.where(xa >= b, 0.0, out)
        elif self.family == "gaussian":
            m, s = self.params
            z = (xa - m) / s
            # phi(z)/Q(z) via the scaled complementary error function
            ratio = math.sqrt(2.0 / math.pi) / special.erfcx(z / math.sqrt(2.0))
            out = s * (ratio - z)
        elif self.family == "exponential":
            (lam,) = self.params
            out = np.where(xa < 0, 1.0 / lam - xa, 1.0 / lam)
        elif self.family == "logistic":
            # mu(x) = s (1 + e^z) log(1 + e^-z) with z = (x - loc)/s
            loc, s = self.params
            z = (xa - loc) / s
            zc = np.clip(z, -30.0, 30.0)
            mid = s * (1.0 + np.exp(zc)) * np.log1p(np.exp(-zc))
            out = np.where(z > 30.0, s * (1.0 + 0.5 * np.exp(-np.abs(z))), mid)
            out = np.where(z < -30.0, loc - xa, out)
        else:
            k, lam = self.params
            xp = np.maximum(xa, 0.0)
            num = (k / lam) * special.gammaincc(k + 1.0, lam * xp) - xp * special.gammaincc(k, lam * xp)
            den = special.gammaincc(k, lam * xp)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
            out = np.where(xa < 0, k / lam - xa, out)
        return float(out) if np.ndim(x) == 0 else out

    # -- sampling -----------------------------------------------------------

    def sample(self, n: int, seed: int) -> SortedSample:
        """n i.i.d. draws via inversion, sorted; deterministic per seed."""
        if n < 2:
            raise ValueError("sample requires n >= 2")
        rng = np.random.default_rng(seed)
        u = rng.random(n)
        u = np.clip(u, 1e-16, 1.0 - 1e-16)
        return SortedSample.from_data(self.quantile(u))
