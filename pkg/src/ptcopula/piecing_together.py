"""Multivariate piecing-together.

A base copula ``C`` (shifted to [-1, 0]^m, drawn as ``Y``) keeps its mass on
``Y_i <= y_i``; above the threshold the coordinate is replaced by the scaled
GPD-copula coordinate ``-y_i V_i``. The result is again a copula, equal to
``C`` on the lower block and to a GPD copula near zero. Margins are then
transformed by arbitrary quantile functions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .copulas import CopulaModel
from .errors import UnsupportedOperationError
from .gpd_copula import GpdCopulaSpec, sample_gpd_copula


@dataclass(frozen=True, eq=False)
class PtCopulaSpec:
    base: CopulaModel
    gpd: GpdCopulaSpec
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size != self.base.dim or self.gpd.dim != self.base.dim:
            raise ValueError("base copula, GPD copula and threshold must share one dimension")
        if np.any(y <= -1) or np.any(y >= 0):
            raise ValueError(f"threshold components must lie in (-1, 0), got {y}")
        y.flags.writeable = False
        object.__setattr__(self, "y", y)
        if self.base.has_closed_form_cdf:
            p = joint_survival_base(self.base, y, range(self.base.dim))
            if not p > 0:
                raise ValueError("base copula puts no mass above the threshold")

    @property
    def dim(self) -> int:
        return self.base.dim


@dataclass
class PtSample:
    """Rows ``q`` on [-1, 0]^m; ``shifted`` is the same sample on [0, 1]^m."""

    q: np.ndarray

    @property
    def shifted(self) -> np.ndarray:
        return self.q + 1.0

    def __len__(self):
        return self.q.shape[0]


def pt_combine(y_rows, v_rows, y) -> PtSample:
    """``Q_i = Y_i`` where ``Y_i <= y_i``, else ``-y_i V_i``, rows paired by index."""
    y_rows = np.asarray(y_rows, dtype=float)
    v_rows = np.asarray(v_rows, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_rows.shape != v_rows.shape or y_rows.ndim != 2 or y_rows.shape[1] != y.size:
        raise ValueError(f"shape mismatch: Y {y_rows.shape}, V {v_rows.shape}, y {y.shape}")
    return PtSample(np.where(y_rows <= y, y_rows, -y * v_rows))


def sample_pt_copula(spec: PtCopulaSpec, n: int, rng: np.random.Generator) -> PtSample:
    """Draw ``Y`` and ``V`` from two independent child streams, then combine."""
    y_rng, v_rng = rng.spawn(2)
    y_rows = spec.base.sample(n, y_rng) - 1.0
    v_rows = sample_gpd_copula(spec.gpd, n, v_rng)
    return pt_combine(y_rows, v_rows, spec.y)


def transform_margins(q_tilde, quantiles: Sequence[Callable]) -> np.ndarray:
    """Apply one quantile function per column of a sample on [0, 1]^m.

    Exact 0 or 1 entries are moved one ulp inward first.
    """
    q = np.array(q_tilde, dtype=float)
    if q.ndim != 2 or q.shape[1] != len(quantiles):
        raise ValueError(f"need one quantile function per column; got {len(quantiles)} for shape {q.shape}")
    q[q <= 0.0] = np.nextafter(0.0, 1.0)
    q[q >= 1.0] = np.nextafter(1.0, 0.0)
    out = np.empty_like(q)
    for i, quantile in enumerate(quantiles):
        out[:, i] = quantile(q[:, i])
    return out


def joint_survival_base(c: CopulaModel, y, K, sample=None) -> float:
    """``P(Y_j > y_j, j in K)`` for ``Y`` following ``c`` on [-1, 0]^m.

    Closed-form families use inclusion-exclusion over the CDF; other
    families need a sample (already shifted to [-1, 0]^m).
    """
    y = np.asarray(y, dtype=float)
    K = sorted(set(int(k) for k in K))
    if not K:
        raise ValueError("K must be non-empty")
    if sample is not None:
        sample = np.asarray(sample, dtype=float)
        return float(np.mean(np.all(sample[:, K] > y[K], axis=1)))
    if not c.has_closed_form_cdf:
        raise UnsupportedOperationError(f"{c.family} copula needs a sample for joint survival probabilities")
    total = 0.0
    for size in range(len(K) + 1):
        for J in itertools.combinations(K, size):
            point = np.ones(c.dim)
            point[list(J)] = 1.0 + y[list(J)]
            total += (-1) ** size * c.cdf(point)
    return float(total)


def b_coefficients(c: CopulaModel, y, K, sample=None) -> dict[int, float]:
    """``b_{i,K} = P(Y_j > y_j, j in K) / (-y_i)`` for each ``i`` in ``K``."""
    y = np.asarray(y, dtype=float)
    joint = joint_survival_base(c, y, K, sample)
    return {int(i): joint / -y[int(i)] for i in sorted(set(K))}
