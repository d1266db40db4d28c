"""Base copula families with samplers, closed-form CDFs where they exist, and
empirical tail diagnostics (tail dependence parameter, stable tail
dependence function).

Archimedean families use the frailty (Marshall-Olkin) construction:
``U_i = psi(E_i / M)`` with ``psi`` the inverse generator, ``E_i`` standard
exponentials and ``M`` a mixing variable whose Laplace transform is ``psi``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr, stdtr

from .errors import InsufficientDataError, UnsupportedOperationError

FAMILIES = ("independence", "gaussian", "t", "clayton", "frank", "gumbel")
ELLIPTICAL = ("gaussian", "t")
CLOSED_FORM = ("independence", "clayton", "frank", "gumbel")


def equicorrelation(rho: float, dim: int = 2) -> np.ndarray:
    corr = np.full((dim, dim), float(rho))
    np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True, eq=False)
class CopulaModel:
    """A copula family with its parameters.

    ``corr`` applies to the gaussian and t families, ``nu`` to t only and
    ``theta`` to clayton/frank (theta > 0) and gumbel (theta >= 1, where 1 is
    independence). Prefer the constructors below to positional use.
    """

    family: str
    dim: int = 2
    corr: np.ndarray | None = None
    nu: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown copula family {self.family!r}; expected one of {FAMILIES}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"copula dimension must be an integer >= 2, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.family in ELLIPTICAL:
            if self.corr is None:
                raise ValueError(f"{self.family} copula needs a correlation matrix")
            corr = np.array(self.corr, dtype=float)
            if corr.shape != (self.dim, self.dim):
                raise ValueError(f"correlation matrix must be {self.dim}x{self.dim}, got {corr.shape}")
            if not np.allclose(corr, corr.T, atol=1e-12) or not np.allclose(np.diag(corr), 1.0, atol=1e-12):
                raise ValueError("correlation matrix must be symmetric with unit diagonal")
            try:
                chol = np.linalg.cholesky(corr)
            except np.linalg.LinAlgError:
                raise ValueError("correlation matrix is not positive definite") from None
            corr.flags.writeable = False
            object.__setattr__(self, "corr", corr)
            object.__setattr__(self, "_chol", chol)
        elif self.corr is not None:
            raise ValueError(f"{self.family} copula takes no correlation matrix")
        if self.family == "t":
            if self.nu is None or not self.nu > 0:
                raise ValueError("t copula needs positive degrees of freedom nu")
            object.__setattr__(self, "nu", float(self.nu))
        if self.family in ("clayton", "frank"):
            if self.theta is None or not self.theta > 0:
                raise ValueError(f"{self.family} copula needs theta > 0")
        if self.family == "gumbel":
            if self.theta is None or not self.theta >= 1:
                raise ValueError("gumbel copula needs theta >= 1")
        if self.theta is not None:
            object.__setattr__(self, "theta", float(self.theta))

    # constructors

    @classmethod
    def independence(cls, dim: int = 2) -> CopulaModel:
        return cls("independence", dim)

    @classmethod
    def gaussian(cls, rho: float | None = None, *, corr=None, dim: int = 2) -> CopulaModel:
        corr = equicorrelation(rho, dim) if corr is None else np.asarray(corr, dtype=float)
        return cls("gaussian", corr.shape[0], corr=corr)

    @classmethod
    def student_t(cls, rho: float | None = None, nu: float = 4.0, *, corr=None, dim: int = 2) -> CopulaModel:
        corr = equicorrelation(rho, dim) if corr is None else np.asarray(corr, dtype=float)
        return cls("t", corr.shape[0], corr=corr, nu=nu)

    @classmethod
    def clayton(cls, theta: float, dim: int = 2) -> CopulaModel:
        return cls("clayton", dim, theta=theta)

    @classmethod
    def frank(cls, theta: float, dim: int = 2) -> CopulaModel:
        return cls("frank", dim, theta=theta)

    @classmethod
    def gumbel(cls, theta: float, dim: int = 2) -> CopulaModel:
        return cls("gumbel", dim, theta=theta)

    def __repr__(self):
        parts = [f"{self.family!r}", f"dim={self.dim}"]
        if self.corr is not None:
            parts.append(f"corr={self.corr.tolist()}")
        if self.nu is not None:
            parts.append(f"nu={self.nu}")
        if self.theta is not None:
            parts.append(f"theta={self.theta}")
        return f"CopulaModel({', '.join(parts)})"

    # sampling

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 0:
            raise ValueError("sample size must be non-negative")
        m = self.dim
        if self.family == "independence":
            return rng.random((n, m))
        if self.family in ELLIPTICAL:
            z = rng.standard_normal((n, m)) @ self._chol.T
            if self.family == "gaussian":
                return ndtr(z)
            w = rng.chisquare(self.nu, size=n) / self.nu
            return stdtr(self.nu, z / np.sqrt(w)[:, None])
        e = rng.standard_exponential((n, m))
        th = self.theta
        if self.family == "clayton":
            mix = rng.gamma(1.0 / th, 1.0, size=n)
            return np.power(1.0 + e / mix[:, None], -1.0 / th)
        if self.family == "frank":
            mix = rng.logseries(-np.expm1(-th), size=n)
            return -np.log1p(np.expm1(-th) * np.exp(-e / mix[:, None])) / th
        if th == 1.0:
            return np.exp(-e)
        return np.exp(-np.power(e / _positive_stable(1.0 / th, n, rng)[:, None], 1.0 / th))

    # closed-form CDF

    @property
    def has_closed_form_cdf(self) -> bool:
        return self.family in CLOSED_FORM

    def cdf(self, u) -> np.ndarray | float:
        """Copula CDF at points ``u`` (last axis of length ``dim``)."""
        if not self.has_closed_form_cdf:
            raise UnsupportedOperationError(
                f"{self.family} copula CDF has no closed form; estimate it from a sample "
                "with empirical_cdf instead"
            )
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got shape {u.shape}")
        u = np.clip(u, 0.0, 1.0)
        zero = np.any(u == 0.0, axis=-1)
        safe = np.where(u == 0.0, 0.5, u)
        th = self.theta
        with np.errstate(divide="ignore", over="ignore"):
            if self.family == "independence":
                out = np.prod(safe, axis=-1)
            elif self.family == "clayton":
                s = np.sum(np.power(safe, -th), axis=-1) - self.dim + 1.0
                out = np.power(s, -1.0 / th)
            elif self.family == "frank":
                num = np.prod(np.expm1(-th * safe), axis=-1)
                out = -np.log1p(num / np.expm1(-th) ** (self.dim - 1)) / th
            else:
                s = np.sum(np.power(-np.log(safe), th), axis=-1)
                out = np.exp(-np.power(s, 1.0 / th))
        out = np.where(zero, 0.0, out)
        return out.item() if out.ndim == 0 else out


def _positive_stable(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Positive stable variables with Laplace transform ``exp(-s**alpha)``, 0 < alpha < 1
    (Kanter's representation)."""
    angle = rng.uniform(0.0, np.pi, size=n)
    w = rng.standard_exponential(n)
    a = np.sin(alpha * angle) / np.power(np.sin(angle), 1.0 / alpha)
    b = np.power(np.sin((1.0 - alpha) * angle) / w, (1.0 - alpha) / alpha)
    return a * b


def empirical_cdf(samples: np.ndarray, u) -> np.ndarray | float:
    """Fraction of sample rows componentwise <= each point of ``u``."""
    samples = np.asarray(samples, dtype=float)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    out = np.array([np.mean(np.all(samples <= point, axis=1)) for point in u])
    return out.item() if out.size == 1 else out


def empirical_chi(samples: np.ndarray, i: int, j: int, u: float, min_exceedances: int = 50) -> float:
    """Finite-level tail dependence ``P(U_i > u | U_j > u)`` from a sample."""
    if not 0 < u < 1:
        raise ValueError("level u must lie in (0, 1)")
    samples = np.asarray(samples)
    cond = samples[:, j] > u
    k = int(cond.sum())
    if k < min_exceedances:
        raise InsufficientDataError(f"only {k} rows exceed {u} in column {j}; need {min_exceedances}")
    return float(np.count_nonzero(samples[cond, i] > u) / k)


def stdf_estimate(cdf: Callable | CopulaModel, x, t: float) -> float:
    """Finite-t approximation ``(1 - C(1 + t*x)) / t`` of the stable tail
    dependence function at ``x <= 0``."""
    if isinstance(cdf, CopulaModel):
        cdf = cdf.cdf
    x = np.asarray(x, dtype=float)
    if not 0 < t <= 0.1:
        raise ValueError(f"t must lie in (0, 0.1], got {t}")
    point = 1.0 + t * x
    if np.any(x > 0) or np.any(point < 0) or np.any(point > 1):
        raise ValueError("need x <= 0 with 1 + t*x inside [0, 1]^m")
    return float((1.0 - cdf(point)) / t)
