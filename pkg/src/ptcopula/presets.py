"""Two-line operational-loss scenario (commercial and retail banking) with
reference severity, frequency and t-copula estimates."""
from __future__ import annotations

from .copulas import CopulaModel
from .loss_model import DEFAULT_LEVELS, BusinessLine, PlainJoint, PtJoint, Scenario

COMMERCIAL = BusinessLine.from_parameters(
    "commercial", mu=2.19, sigma=2.23, u=918.02, beta=609.84, xi=0.82, alpha=0.74, r=46.10
)
RETAIL = BusinessLine.from_parameters(
    "retail", mu=0.88, sigma=2.06, u=69.18, beta=99.75, xi=1.02, alpha=0.39, r=162.04
)
T_RHO = 0.76
T_NU = 8.64
GPD_RHO = 0.7


def t_copula() -> CopulaModel:
    return CopulaModel.student_t(T_RHO, T_NU)


def banking_scenario(*, pt: bool = False, n_sim: int = 10_000, n_margin: int = 10**6,
                     seed: int = 0, gpd_rho: float = GPD_RHO, levels=DEFAULT_LEVELS) -> Scenario:
    joint = PtJoint(t_copula(), gpd_rho=gpd_rho) if pt else PlainJoint(t_copula())
    return Scenario((COMMERCIAL, RETAIL), joint, n_sim=n_sim, n_margin=n_margin, seed=seed, levels=levels)
