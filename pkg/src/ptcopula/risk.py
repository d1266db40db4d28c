"""Empirical value at risk, expected shortfall and median shortfall, and the
replication harness that averages them over independent joint simulations."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .loss_model import Scenario, build_margins, order_statistic_index, simulate_joint_losses
from .streams import GENERATOR_NAME, JOINT, substream

TOTAL = "total"
MEASURES = ("var", "es", "ms")


def _prepare(sample, alpha: float) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("risk measures need a non-empty sample")
    if not 0 < alpha < 1:
        raise ValueError(f"level must lie in (0, 1), got {alpha}")
    return x


def _var_sorted(xs: np.ndarray, alpha: float) -> float:
    return float(xs[order_statistic_index(xs.size, alpha)])


def _es_sorted(xs: np.ndarray, alpha: float) -> float:
    v = _var_sorted(xs, alpha)
    first = np.searchsorted(xs, v, side="left")
    # n - n*alpha is exact whenever n*alpha is an integer; n*(1 - alpha) is not
    return float(xs[first:].sum() / (xs.size - xs.size * alpha))


def var_hat(sample, alpha: float) -> float:
    """The ceil(n*alpha)-th order statistic."""
    return _var_sorted(np.sort(_prepare(sample, alpha)), alpha)


def es_hat(sample, alpha: float) -> float:
    """``sum(l_i for l_i >= VaR) / (n (1 - alpha))``.

    The divisor is n(1 - alpha), not the number of exceedances, so for
    {1, ..., 100} at 0.95 six terms are divided by 5.
    """
    return _es_sorted(np.sort(_prepare(sample, alpha)), alpha)


def ms_hat(sample, alpha: float) -> float:
    """Median shortfall, ``var_hat`` at level (1 + alpha)/2."""
    half = (1.0 + alpha) / 2.0
    if not half < 1:
        raise ValueError("(1 + alpha)/2 must be below 1")
    return var_hat(sample, half)


def estimates(sample, levels) -> np.ndarray:
    """Array of shape (len(levels), 3) holding VaR, ES and MS per level."""
    xs = np.sort(_prepare(sample, levels[0]))
    out = np.empty((len(levels), 3))
    for k, alpha in enumerate(levels):
        _prepare(xs[:1], alpha)
        out[k] = (_var_sorted(xs, alpha), _es_sorted(xs, alpha), _var_sorted(xs, (1.0 + alpha) / 2.0))
    return out


@dataclass
class RiskRow:
    identifier: str
    level: float
    var: float
    es: float
    ms: float
    var_median: float
    es_median: float
    ms_median: float


@dataclass
class RiskReport:
    """Replication means (headline) and medians of each estimate.

    ``per_replication`` has shape (R, identifiers, levels, 3) with the last
    axis ordered VaR, ES, MS.
    """

    identifiers: list[str]
    levels: tuple[float, ...]
    per_replication: np.ndarray
    n_sim: int
    seed: int
    joint: str
    generator: str = GENERATOR_NAME
    infinite_mean_lines: list[str] = field(default_factory=list)

    @property
    def replications(self) -> int:
        return self.per_replication.shape[0]

    @property
    def mean(self) -> np.ndarray:
        return self.per_replication.mean(axis=0)

    @property
    def median(self) -> np.ndarray:
        return np.median(self.per_replication, axis=0)

    @property
    def rows(self) -> list[RiskRow]:
        mean, med = self.mean, self.median
        return [
            RiskRow(ident, alpha, *mean[i, k], *med[i, k])
            for i, ident in enumerate(self.identifiers)
            for k, alpha in enumerate(self.levels)
        ]

    def get(self, identifier: str, level: float, measure: str = "var", stat: str = "mean") -> float:
        i = self.identifiers.index(identifier)
        k = int(np.argmin(np.abs(np.array(self.levels) - level)))
        if not np.isclose(self.levels[k], level):
            raise KeyError(f"level {level} not in report")
        table = self.mean if stat == "mean" else self.median
        return float(table[i, k, MEASURES.index(measure)])

    def metadata(self) -> dict:
        return {
            "joint": self.joint,
            "replications": self.replications,
            "n_sim": self.n_sim,
            "seed": self.seed,
            "generator": self.generator,
            "infinite_mean_lines": self.infinite_mean_lines,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["identifier", "level", "var", "es", "ms", "var_median", "es_median", "ms_median"])
        for row in self.rows:
            writer.writerow([row.identifier, repr(row.level)] + [repr(float(v)) for v in (
                row.var, row.es, row.ms, row.var_median, row.es_median, row.ms_median)])
        return buf.getvalue()


def replicate_report(scenario: Scenario, R: int, *, threads: int = 1, margins=None) -> RiskReport:
    """Run ``R`` joint simulations and collect every estimate.

    Margins are built once from the scenario seed and shared by all
    replications; replication ``r`` draws its copula sample from the
    substream keyed by ``(seed, r)``. Two scenarios differing only in their
    joint model therefore produce paired runs.
    """
    if R < 1:
        raise ValueError("need at least one replication")
    if margins is None:
        margins = build_margins(scenario, threads=threads)
    levels = scenario.levels

    def one(r):
        losses = simulate_joint_losses(scenario, substream(scenario.seed, JOINT, r), margins)
        return np.stack([estimates(losses[:, j], levels) for j in range(losses.shape[1])])

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_rep = list(pool.map(one, range(R)))
    else:
        per_rep = [one(r) for r in range(R)]
    return RiskReport(
        identifiers=[line.name for line in scenario.lines] + [TOTAL],
        levels=levels,
        per_replication=np.stack(per_rep),
        n_sim=scenario.n_sim,
        seed=scenario.seed,
        joint=scenario.joint.label,
        infinite_mean_lines=[line.name for line in scenario.lines if line.severity.tail.xi >= 1],
    )
