"""Severity and frequency fitting plus the mean-excess threshold diagnostic."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .distributions import GpdExcess, Lognormal, NegBin
from .errors import DegenerateSampleError, FitInfeasibleError, InsufficientDataError

GPD_MIN_EXCESSES = 30
XI_GRID = np.geomspace(0.01, 5.0, 60)


def _positive_sample(data, what: str) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError(f"{what} must be positive and finite")
    return x


def gpd_loglik(excesses, beta: float, xi: float) -> float:
    x = np.asarray(excesses, dtype=float)
    if beta <= 0 or xi <= 0:
        return -np.inf
    return float(-x.size * np.log(beta) - (1.0 / xi + 1.0) * np.log1p(xi * x / beta).sum())


def _profile_beta(x: np.ndarray, xi: float) -> float:
    """Solve the score equation in beta for fixed xi.

    ``(1 + xi)/xi * mean(w / (1 + w)) = 1`` with ``w = xi*x/beta``; the left
    side falls monotonically from ``(1 + xi)/xi`` to 0 as beta grows, so the
    root is unique.
    """

    def score(log_beta):
        w = xi * x / np.exp(log_beta)
        return (1.0 + xi) / xi * np.mean(w / (1.0 + w)) - 1.0

    scale = np.log(np.mean(x))
    lo, hi = scale - 5.0, scale + 5.0
    while score(lo) < 0:
        lo -= 10.0
    while score(hi) > 0:
        hi += 10.0
    return float(np.exp(brentq(score, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)))


def fit_gpd_mle(excesses) -> GpdExcess:
    """Maximum-likelihood GPD fit with shape restricted to xi > 0.

    The likelihood is profiled over xi on a log grid in [0.01, 5] and the
    cells around the best grid point refined by bounded Brent search.
    """
    x = np.asarray(excesses, dtype=float).ravel()
    if x.size < GPD_MIN_EXCESSES:
        raise InsufficientDataError(f"GPD fit needs at least {GPD_MIN_EXCESSES} excesses, got {x.size}")
    x = _positive_sample(x, "GPD excesses")
    if np.all(x == x[0]):
        raise DegenerateSampleError("all excesses are equal; the GPD likelihood has no interior maximum")

    def neg_profile(xi):
        return -gpd_loglik(x, _profile_beta(x, xi), xi)

    values = np.array([neg_profile(xi) for xi in XI_GRID])
    k = int(np.argmin(values))
    lo = XI_GRID[max(k - 1, 0)]
    hi = XI_GRID[min(k + 1, XI_GRID.size - 1)]
    res = minimize_scalar(neg_profile, bounds=(lo, hi), method="bounded", options={"xatol": 1e-11})
    xi = float(res.x) if res.fun <= values[k] else float(XI_GRID[k])
    return GpdExcess(beta=_profile_beta(x, xi), xi=xi)


def fit_lognormal_mle(data) -> Lognormal:
    """Lognormal MLE: mean and population (divisor n) standard deviation of logs."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise InsufficientDataError("lognormal fit needs at least 2 observations")
    logs = np.log(_positive_sample(x, "lognormal data"))
    mu = float(logs.mean())
    sigma = float(logs.std(ddof=0))
    if sigma == 0.0:
        raise DegenerateSampleError("all observations are equal; sigma estimate is 0", {"mu": mu, "sigma": 0.0})
    return Lognormal(mu=mu, sigma=sigma)


def fit_negbin_from_moments(mean: float, variance: float) -> NegBin:
    if not mean > 0:
        raise FitInfeasibleError(f"sample mean must be positive, got {mean}")
    if not variance > mean:
        raise FitInfeasibleError(
            f"sample is not overdispersed (variance {variance:g} <= mean {mean:g}); "
            "the negative binomial degenerates to the Poisson boundary"
        )
    r = variance / mean - 1.0
    return NegBin(alpha=mean / r, r=r)


def fit_negbin_moments(counts) -> NegBin:
    """Method of moments using the sample mean and population variance."""
    c = np.asarray(counts, dtype=float).ravel()
    if c.size < 2:
        raise InsufficientDataError("negative binomial fit needs at least 2 counts")
    if np.any(c < 0) or np.any(c != np.floor(c)):
        raise ValueError("counts must be non-negative integers")
    return fit_negbin_from_moments(float(c.mean()), float(c.var(ddof=0)))


@dataclass
class MeanExcessCurve:
    thresholds: np.ndarray
    mean_excess: np.ndarray
    counts: np.ndarray
    omitted: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.thresholds) == len(self.mean_excess) == len(self.counts)):
            raise ValueError("mean-excess curve columns must have equal length")

    def slope(self) -> float:
        """Least-squares slope of mean excess against threshold."""
        return float(np.polyfit(self.thresholds, self.mean_excess, 1)[0])


def mean_excess(data, thresholds, min_exceedances: int = 5) -> MeanExcessCurve:
    """Empirical mean excess ``mean(x - t | x > t)`` at each threshold.

    Thresholds exceeded by fewer than ``min_exceedances`` points are dropped
    and listed in ``omitted``.
    """
    x = np.sort(np.asarray(data, dtype=float).ravel())
    ts = np.sort(np.asarray(thresholds, dtype=float).ravel())
    kept_t, kept_e, kept_n, omitted = [], [], [], []
    for t in ts:
        first = np.searchsorted(x, t, side="right")
        count = x.size - first
        if count < max(min_exceedances, 1):
            omitted.append(float(t))
            continue
        kept_t.append(t)
        kept_e.append(float(np.mean(x[first:] - t)))
        kept_n.append(count)
    if omitted:
        warnings.warn(
            f"{len(omitted)} threshold(s) with fewer than {min_exceedances} exceedances omitted",
            stacklevel=2,
        )
    return MeanExcessCurve(np.array(kept_t), np.array(kept_e), np.array(kept_n, dtype=int), omitted)
