"""Compound annual losses per business line and their joint simulation.

The annual loss of a line is ``L = sum_{k <= N} zeta_k`` with negative
binomial ``N`` and i.i.d. spliced severities. Each line's distribution of
``L`` is represented empirically from ``n_margin`` simulated years. Joint
rows are then obtained by feeding a copula sample (plain, or with its upper
tail pieced together with a GPD copula) through those empirical quantiles.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .copulas import CopulaModel
from .distributions import GpdExcess, Lognormal, NegBin, SplicedSeverity
from .gpd_copula import GpdCopulaSpec, sample_gpd_copula
from .piecing_together import PtCopulaSpec, pt_combine, transform_margins
from .streams import MARGIN, substream

DEFAULT_LEVELS = (0.95, 0.99, 0.995, 0.999)
_CHUNK_YEARS = 1 << 16


def order_statistic_index(n: int, p) -> np.ndarray:
    """0-based index of the ``ceil(n p)``-th order statistic, clamped to [0, n-1].

    A 1e-9 slack absorbs rounding in ``n * p`` so that ``p = k/n`` maps to
    the k-th order statistic.
    """
    k = np.ceil(np.asarray(p, dtype=float) * n - 1e-9).astype(np.int64)
    return np.clip(k, 1, n) - 1


@dataclass(frozen=True)
class BusinessLine:
    name: str
    severity: SplicedSeverity
    frequency: NegBin

    @classmethod
    def from_parameters(cls, name, *, mu, sigma, u, beta, xi, alpha, r) -> BusinessLine:
        severity = SplicedSeverity(Lognormal(mu, sigma), u, GpdExcess(beta, xi))
        return cls(name, severity, NegBin(alpha, r))


def simulate_annual_totals(line: BusinessLine, n_years: int, rng: np.random.Generator) -> np.ndarray:
    """``n_years`` independent compound totals; years without events total 0."""
    if n_years < 1:
        raise ValueError("n_years must be at least 1")
    out = np.empty(n_years)
    for start in range(0, n_years, _CHUNK_YEARS):
        k = min(_CHUNK_YEARS, n_years - start)
        counts = line.frequency.sample(k, rng)
        severities = line.severity.sample(int(counts.sum()), rng)
        owner = np.repeat(np.arange(k), counts)
        out[start:start + k] = np.bincount(owner, weights=severities, minlength=k)
    return out


@dataclass(frozen=True, eq=False)
class EmpiricalMargin:
    """Empirical distribution of simulated annual totals."""

    sorted_totals: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.sorted_totals, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("an empirical margin needs a non-empty 1-d sample")
        if np.any(np.diff(x) < 0):
            raise ValueError("sorted_totals must be ascending")
        x.flags.writeable = False
        object.__setattr__(self, "sorted_totals", x)

    @property
    def n(self) -> int:
        return self.sorted_totals.size

    def quantile(self, p):
        """Generalized inverse of the empirical CDF: the ceil(n p)-th order statistic."""
        out = self.sorted_totals[order_statistic_index(self.n, p)]
        return out.item() if np.ndim(out) == 0 else out

    def cdf(self, x):
        out = np.searchsorted(self.sorted_totals, np.asarray(x, dtype=float), side="right") / self.n
        return out.item() if np.ndim(out) == 0 else out


def build_empirical_margin(totals) -> EmpiricalMargin:
    totals = np.asarray(totals, dtype=float).ravel()
    if totals.size == 0:
        raise ValueError("cannot build a margin from an empty sample")
    return EmpiricalMargin(np.sort(totals))


@dataclass(frozen=True)
class PlainJoint:
    copula: CopulaModel

    @property
    def label(self) -> str:
        return f"plain-{self.copula.family}"


@dataclass(frozen=True)
class PtJoint:
    """Base copula with its upper tail replaced by the GPD copula of ``Z = 2S``,
    ``S`` Gaussian with correlation ``gpd_rho``.

    Threshold mode ``marginal`` uses ``y_i = F_i(u_i) - 1`` from each line's
    lognormal body at its splice point; ``explicit`` takes ``y`` as given.
    """

    base: CopulaModel
    gpd_rho: float = 0.7
    threshold_mode: Literal["marginal", "explicit"] = "marginal"
    y: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0 <= self.gpd_rho < 1:
            raise ValueError(f"gpd_rho must lie in [0, 1), got {self.gpd_rho}")
        if self.threshold_mode not in ("marginal", "explicit"):
            raise ValueError(f"unknown threshold mode {self.threshold_mode!r}")
        if (self.threshold_mode == "explicit") != (self.y is not None):
            raise ValueError("y is required for explicit thresholds and only then")
        if self.y is not None:
            object.__setattr__(self, "y", tuple(float(v) for v in self.y))

    @property
    def label(self) -> str:
        return f"pt-{self.base.family}"

    def gpd_spec(self) -> GpdCopulaSpec:
        if self.gpd_rho == 0:
            return GpdCopulaSpec(CopulaModel.independence(self.base.dim))
        return GpdCopulaSpec(CopulaModel.gaussian(self.gpd_rho, dim=self.base.dim))

    def thresholds(self, lines: Sequence[BusinessLine]) -> np.ndarray:
        if self.threshold_mode == "explicit":
            return np.array(self.y)
        return np.array([line.severity.body_mass - 1.0 for line in lines])

    def spec(self, lines: Sequence[BusinessLine]) -> PtCopulaSpec:
        return PtCopulaSpec(self.base, self.gpd_spec(), self.thresholds(lines))


Joint = Union[PlainJoint, PtJoint]


@dataclass(frozen=True)
class Scenario:
    lines: tuple[BusinessLine, ...]
    joint: Joint
    n_sim: int = 10_000
    n_margin: int = 10**6
    seed: int = 0
    levels: tuple[float, ...] = field(default=DEFAULT_LEVELS)

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "levels", tuple(float(a) for a in self.levels))
        if len(self.lines) < 2:
            raise ValueError("a joint scenario needs at least two business lines")
        dim = self.joint.copula.dim if isinstance(self.joint, PlainJoint) else self.joint.base.dim
        if dim != len(self.lines):
            raise ValueError(f"copula dimension {dim} does not match {len(self.lines)} lines")
        if self.n_sim < 1 or self.n_margin < 1:
            raise ValueError("n_sim and n_margin must be positive")
        lv = np.array(self.levels)
        if lv.size == 0 or np.any(lv <= 0) or np.any(lv >= 1) or np.any(np.diff(lv) <= 0):
            raise ValueError("levels must be strictly increasing inside (0, 1)")
        if isinstance(self.joint, PtJoint):
            self.joint.spec(self.lines)  # validates the threshold

    @property
    def dim(self) -> int:
        return len(self.lines)

    def with_joint(self, joint: Joint) -> Scenario:
        return Scenario(self.lines, joint, self.n_sim, self.n_margin, self.seed, self.levels)


def build_margins(scenario: Scenario, threads: int = 1) -> list[EmpiricalMargin]:
    """One empirical margin per line, each from its own keyed substream."""

    def one(i):
        rng = substream(scenario.seed, MARGIN, i)
        return build_empirical_margin(simulate_annual_totals(scenario.lines[i], scenario.n_margin, rng))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, range(scenario.dim)))
    return [one(i) for i in range(scenario.dim)]


def sample_joint_uniforms(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    """Copula sample on [0, 1]^m for the scenario's joint model.

    The base copula is always drawn from the first child stream of ``rng``
    and the GPD copula from the second, so a plain and a pieced-together run
    on the same ``rng`` share their base-copula draws.
    """
    y_rng, v_rng = rng.spawn(2)
    n = scenario.n_sim
    joint = scenario.joint
    if isinstance(joint, PlainJoint):
        return joint.copula.sample(n, y_rng)
    spec = joint.spec(scenario.lines)
    y_rows = spec.base.sample(n, y_rng) - 1.0
    v_rows = sample_gpd_copula(spec.gpd, n, v_rng)
    return pt_combine(y_rows, v_rows, spec.y).shifted


def simulate_joint_losses(scenario: Scenario, rng: np.random.Generator, margins=None) -> np.ndarray:
    """``n_sim`` rows of per-line annual losses plus their sum in the last column.

    Margins are built from the scenario seed when not supplied.
    """
    if margins is None:
        margins = build_margins(scenario)
    u = sample_joint_uniforms(scenario, rng)
    losses = transform_margins(u, [m.quantile for m in margins])
    return np.column_stack([losses, losses.sum(axis=1)])
