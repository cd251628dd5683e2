"""Posterior belief in a rare-event claim backed by one testimony,
against n uniform testimonies for the common outcome and optionally l
known-false rare-event testimonies."""

from .model import (
    Evidence,
    LogIntegrandPoint,
    PriorSpec,
    log_integrand_b,
    log_integrand_w,
    log_s_n,
    log_weight_marginal,
    s_n,
    weight_point,
)
from .oracle import (
    BudgetExceeded,
    InsufficientAcceptance,
    McConfig,
    McEstimate,
    OracleError,
    Unsupported,
    closed_form_small,
    enumerate_s_n,
    mc_posterior,
    simple_induction,
)
from .quadrature import (
    IndeterminateRatio,
    InvalidBox,
    LogIntegral,
    NonConvergence,
    QuadratureError,
    QuadratureSpec,
    Ratio,
    log_integrate_2d,
    log_ratio,
)
from .stats import MeansResult, PosteriorResult, asymptote, posterior, posterior_means

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PriorSpec",
    "Evidence",
    "LogIntegrandPoint",
    "s_n",
    "log_s_n",
    "log_integrand_w",
    "log_integrand_b",
    "log_weight_marginal",
    "weight_point",
    "QuadratureSpec",
    "LogIntegral",
    "Ratio",
    "QuadratureError",
    "InvalidBox",
    "NonConvergence",
    "IndeterminateRatio",
    "log_integrate_2d",
    "log_ratio",
    "McConfig",
    "McEstimate",
    "OracleError",
    "BudgetExceeded",
    "Unsupported",
    "InsufficientAcceptance",
    "enumerate_s_n",
    "mc_posterior",
    "closed_form_small",
    "simple_induction",
    "PosteriorResult",
    "MeansResult",
    "posterior",
    "posterior_means",
    "asymptote",
]
