"""GPD copulas generated from a bounded random vector with unit means.

If ``U`` is uniform on (0, 1) and independent of ``Z`` with ``0 <= Z_i <= c_i``
and ``E Z_i = 1``, then ``-U / Z`` follows a multivariate GPD with uniform
margins close to zero:

    P(-U/Z <= x) = 1 - E[max_i(-x_i Z_i)]    when max_i c_i |x_i| <= 1.

``E[max_i |x_i| Z_i]`` is the D-norm of ``x``. Taking ``Z = 2S`` with ``S``
drawn from any copula and mapping each coordinate through its marginal law
gives a GPD copula on [-1, 0]^m.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .copulas import CopulaModel

ZSampler = Callable[[int, np.random.Generator], np.ndarray]

DEFAULT_N_MC = 10**6


class MCEstimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True, eq=False)
class DiscreteZ:
    """A finitely supported generator vector ``Z``; expectations are exact."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape[0] != w.size:
            raise ValueError("need one weight per support point")
        if np.any(w < 0) or not np.isclose(w.sum(), 1.0, atol=1e-12):
            raise ValueError("weights must be a probability vector")
        if np.any(pts < 0):
            raise ValueError("Z must be non-negative")
        means = w @ pts
        if not np.allclose(means, 1.0, atol=1e-12):
            raise ValueError(f"every coordinate of Z needs mean one, got {means}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def bound(self) -> np.ndarray:
        return self.points.max(axis=0)

    def sample_z(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.points[rng.choice(self.weights.size, size=n, p=self.weights)]


@dataclass(frozen=True, eq=False)
class GpdCopulaSpec:
    """GPD copula driven by ``Z = 2S`` where ``S`` follows ``base``."""

    base: CopulaModel

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def bound(self) -> np.ndarray:
        return np.full(self.dim, 2.0)

    def sample_z(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return 2.0 * self.base.sample(n, rng)


ZSource = Union[DiscreteZ, GpdCopulaSpec, ZSampler]


def marginal_h_cdf(x):
    """CDF of ``-U/(2 S_i)``: ``1 + x`` on [-1/2, 0] and ``1/(4|x|)`` below."""
    x = np.asarray(x, dtype=float)
    if np.any(x > 0):
        raise ValueError("H is defined for x <= 0 only")
    with np.errstate(divide="ignore"):
        out = np.where(x >= -0.5, 1.0 + x, 0.25 / np.abs(np.minimum(x, -0.5)))
    return out.item() if out.ndim == 0 else out


def gpd_copula_transform(u, s) -> np.ndarray:
    """Map a uniform ``u`` (one per row) and copula rows ``s`` to the GPD copula.

    ``V_i = -u/(2 s_i)`` if ``u <= s_i`` else ``s_i/(2u) - 1``; the first
    branch takes the tie.
    """
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    uu = u[..., None] if s.ndim > u.ndim else u
    first = (uu <= s) & (s > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(first, -uu / (2.0 * s), s / (2.0 * uu) - 1.0)
    return out


def sample_gpd_copula(spec: GpdCopulaSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows of the GPD copula on [-1, 0]^m (S first, then U)."""
    if n < 0:
        raise ValueError("sample size must be non-negative")
    s = spec.base.sample(n, rng)
    u = rng.random(n)
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return gpd_copula_transform(u, s)


def _draw_z(z: ZSource, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(z, (DiscreteZ, GpdCopulaSpec)):
        return z.sample_z(n, rng)
    return np.asarray(z(n, rng), dtype=float)


def sample_w_neighborhood(z: ZSource, n: int, rng: np.random.Generator) -> np.ndarray:
    """Rows of ``-U (1/Z_1, ..., 1/Z_m)``; coordinates with ``Z_i = 0`` are ``-inf``."""
    zs = _draw_z(z, n, rng)
    u = rng.random(n)[:, None]
    with np.errstate(divide="ignore"):
        return np.where(zs > 0, -u / np.where(zs > 0, zs, 1.0), -np.inf)


def _expect_max(z: ZSource, weights: np.ndarray, n_mc: int, rng) -> MCEstimate:
    if isinstance(z, DiscreteZ):
        return MCEstimate(float(z.weights @ np.max(z.points * weights, axis=1)), 0.0)
    if rng is None:
        raise ValueError("a random generator is needed for Monte Carlo expectations")
    vals = np.max(_draw_z(z, n_mc, rng) * weights, axis=1)
    return MCEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_mc)))


def gpd_cdf_near_zero(z: ZSource, x, *, bound=None, n_mc: int = DEFAULT_N_MC, rng=None) -> MCEstimate:
    """``W(x) = 1 - E[max_i(-x_i Z_i)]`` inside the neighbourhood ``max_i c_i|x_i| <= 1``.

    ``bound`` is the vector ``c`` bounding ``Z``; it defaults to the support
    maximum for discrete ``Z`` and to 2 otherwise.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x > 0):
        raise ValueError("x must be <= 0")
    if bound is None:
        bound = z.bound if isinstance(z, (DiscreteZ, GpdCopulaSpec)) else 2.0
    reach = float(np.max(np.asarray(bound) * np.abs(x)))
    if reach > 1.0:
        raise ValueError(f"x lies outside the GPD neighbourhood: max_i c_i|x_i| = {reach:.6g} > 1")
    e = _expect_max(z, -x, n_mc, rng)
    return MCEstimate(1.0 - e.value, e.stderr)


def dnorm_estimate(z: ZSource, x, n_mc: int = DEFAULT_N_MC, rng=None) -> MCEstimate:
    """D-norm ``E[max_i |x_i| Z_i]``; exact when ``z`` is discrete."""
    return _expect_max(z, np.abs(np.asarray(x, dtype=float)), n_mc, rng)
