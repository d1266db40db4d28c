"""Univariate distributions: standard EVD/GPD families, the excess GPD,
lognormal, negative binomial and the lognormal/GPD spliced severity.

All objects are frozen dataclasses validated on construction. Evaluation
methods accept scalars or arrays and return numpy values of the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.special import gammaln, ndtr, ndtri

EVD_KINDS = ("frechet", "weibull", "gumbel")
GPD_STD_KINDS = ("pareto", "beta", "exponential")


def _positive(name: str, value: float) -> float:
    if value is None:
        raise ValueError(f"{name} is required")
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def _check_probability(p, *, closed_low: bool = False, closed_high: bool = False) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    low_ok = p >= 0 if closed_low else p > 0
    high_ok = p <= 1 if closed_high else p < 1
    if not np.all(low_ok & high_ok):
        lo = "[" if closed_low else "("
        hi = "]" if closed_high else ")"
        raise ValueError(f"probability outside {lo}0, 1{hi}: {p[~(low_ok & high_ok)].ravel()[:5]}")
    return p


def _unwrap(x):
    """Return a python float for 0-d results, the array otherwise."""
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


@dataclass(frozen=True)
class EvdFamily:
    """Standardized extreme value distribution: Frechet, reverse Weibull or Gumbel."""

    kind: Literal["frechet", "weibull", "gumbel"]
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in EVD_KINDS:
            raise ValueError(f"unknown EVD kind {self.kind!r}; expected one of {EVD_KINDS}")
        if self.kind == "gumbel":
            if self.alpha is not None:
                raise ValueError("the Gumbel family takes no shape parameter")
        else:
            object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gumbel":
            out = np.exp(-np.exp(-x))
        elif self.kind == "frechet":
            with np.errstate(divide="ignore"):
                out = np.where(x > 0, np.exp(-np.power(np.where(x > 0, x, 1.0), -self.alpha)), 0.0)
        else:
            out = np.where(x <= 0, np.exp(-np.power(np.abs(np.minimum(x, 0.0)), self.alpha)), 1.0)
        return _unwrap(out)


@dataclass(frozen=True)
class GpdStdFamily:
    """Standardized GPD: Pareto, beta or exponential case, W = 1 + log G."""

    kind: Literal["pareto", "beta", "exponential"]
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in GPD_STD_KINDS:
            raise ValueError(f"unknown GPD kind {self.kind!r}; expected one of {GPD_STD_KINDS}")
        if self.kind == "exponential":
            if self.alpha is not None:
                raise ValueError("the exponential family takes no shape parameter")
        else:
            object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "pareto":
            out = np.where(x >= 1, 1.0 - np.power(np.maximum(x, 1.0), -self.alpha), 0.0)
        elif self.kind == "beta":
            inside = 1.0 - np.power(np.abs(np.clip(x, -1.0, 0.0)), self.alpha)
            out = np.where(x < -1, 0.0, np.where(x > 0, 1.0, inside))
        else:
            out = np.where(x >= 0, -np.expm1(-np.maximum(x, 0.0)), 0.0)
        return _unwrap(out)


@dataclass(frozen=True)
class GpdExcess:
    """GPD for excesses over a threshold, ``1 - (1 + xi*z/beta)**(-1/xi)``, xi > 0."""

    beta: float
    xi: float

    def __post_init__(self):
        object.__setattr__(self, "beta", _positive("beta", self.beta))
        object.__setattr__(self, "xi", _positive("xi", self.xi))

    def _check_excess(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if np.any(z < 0) or np.any(np.isnan(z)):
            raise ValueError("GPD excesses must be non-negative")
        return z

    def sf(self, z):
        z = self._check_excess(z)
        return _unwrap(np.exp(-np.log1p(self.xi * z / self.beta) / self.xi))

    def cdf(self, z):
        z = self._check_excess(z)
        return _unwrap(-np.expm1(-np.log1p(self.xi * z / self.beta) / self.xi))

    def quantile(self, p):
        p = _check_probability(p, closed_low=True)
        return _unwrap(self._ppf(p))

    def _ppf(self, p):
        return self.beta / self.xi * np.expm1(-self.xi * np.log1p(-p))

    def logpdf(self, z):
        z = self._check_excess(z)
        return _unwrap(-np.log(self.beta) - (1.0 / self.xi + 1.0) * np.log1p(self.xi * z / self.beta))

    @property
    def mean(self) -> float:
        return self.beta / (1.0 - self.xi) if self.xi < 1 else np.inf


@dataclass(frozen=True)
class Lognormal:
    mu: float
    sigma: float

    def __post_init__(self):
        mu = float(self.mu)
        if not np.isfinite(mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return _unwrap(np.where(x > 0, ndtr(z), 0.0))

    def quantile(self, p):
        p = _check_probability(p)
        return _unwrap(self._ppf(p))

    def _ppf(self, p):
        return np.exp(self.mu + self.sigma * ndtri(p))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size=n)


@dataclass(frozen=True)
class SplicedSeverity:
    """Lognormal body below ``u`` pieced together with a GPD tail above it.

    The tail carries the body's remaining mass ``1 - F(u)``, so the CDF is
    continuous at the splice point.
    """

    body: Lognormal
    u: float
    tail: GpdExcess

    def __post_init__(self):
        object.__setattr__(self, "u", _positive("threshold u", self.u))

    @cached_property
    def body_mass(self) -> float:
        """F(u): probability of not exceeding the splice threshold."""
        return float(self.body.cdf(self.u))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        fu = self.body_mass
        excess = np.maximum(x - self.u, 0.0)
        upper = fu + (1.0 - fu) * self.tail.cdf(excess)
        return _unwrap(np.where(x <= self.u, self.body.cdf(x), upper))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        fu = self.body_mass
        excess = np.maximum(x - self.u, 0.0)
        upper = (1.0 - fu) * self.tail.sf(excess)
        return _unwrap(np.where(x <= self.u, 1.0 - self.body.cdf(x), upper))

    def quantile(self, p):
        """Generalized inverse ``inf{t: F(t) >= p}``; ties at F(u) resolve to u."""
        p = _check_probability(p)
        return _unwrap(self._ppf(p))

    def _ppf(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        fu = self.body_mass
        out = np.empty(p.shape)
        low = p <= fu
        out[low] = np.minimum(self.body._ppf(p[low]), self.u)
        out[p == fu] = self.u
        high = ~low
        out[high] = self.u + self.tail._ppf((p[high] - fu) / (1.0 - fu))
        return out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 0:
            raise ValueError("sample size must be non-negative")
        p = rng.random(n)
        p[p == 0.0] = np.nextafter(0.0, 1.0)
        return self._ppf(p)


@dataclass(frozen=True)
class NegBin:
    """Negative binomial with size ``alpha`` and odds ``r``: mean alpha*r,
    variance alpha*r*(1+r)."""

    alpha: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "r", _positive("r", self.r))

    @property
    def mean(self) -> float:
        return self.alpha * self.r

    @property
    def variance(self) -> float:
        return self.alpha * self.r * (1.0 + self.r)

    def logpmf(self, n):
        n = np.asarray(n)
        if np.any(n < 0) or np.any(n != np.floor(n)):
            raise ValueError("negative binomial support is the non-negative integers")
        n = n.astype(float)
        a, r = self.alpha, self.r
        out = gammaln(a + n) - gammaln(n + 1.0) - gammaln(a) - a * np.log1p(r) + n * (np.log(r) - np.log1p(r))
        return _unwrap(out)

    def pmf(self, n):
        return _unwrap(np.exp(self.logpmf(n)))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Gamma-Poisson mixture: N | lam ~ Poisson(lam), lam ~ Gamma(alpha, scale=r)."""
        lam = rng.gamma(self.alpha, self.r, size=n)
        return rng.poisson(lam)
