"""Multivariate piecing-together: GPD tails for severities, GPD copulas for
the upper tail of a dependence model, and compound-loss risk estimates."""
from .copulas import CopulaModel
from .distributions import EvdFamily, GpdExcess, GpdStdFamily, Lognormal, NegBin, SplicedSeverity
from .gpd_copula import DiscreteZ, GpdCopulaSpec, sample_gpd_copula
from .loss_model import BusinessLine, EmpiricalMargin, PlainJoint, PtJoint, Scenario, simulate_joint_losses
from .piecing_together import PtCopulaSpec, PtSample, pt_combine, sample_pt_copula, transform_margins
from .risk import RiskReport, es_hat, ms_hat, replicate_report, var_hat

__all__ = [
    "BusinessLine", "CopulaModel", "DiscreteZ", "EmpiricalMargin", "EvdFamily", "GpdCopulaSpec",
    "GpdExcess", "GpdStdFamily", "Lognormal", "NegBin", "PlainJoint", "PtCopulaSpec", "PtJoint",
    "PtSample", "RiskReport", "Scenario", "SplicedSeverity", "es_hat", "ms_hat", "pt_combine",
    "replicate_report", "sample_gpd_copula", "sample_pt_copula", "simulate_joint_losses",
    "transform_margins", "var_hat",
]
