"""Secrecy outage probabilities over fluctuating two-ray fading channels."""

__version__ = "0.1.0"

from .ftr_model import (
    DEFAULT_TRUNCATION,
    FtrParams,
    LinkBudget,
    Truncation,
    TruncationError,
    d0,
    d_coeff,
    ftr_ccdf,
    ftr_cdf,
    ftr_cdf_asymptotic,
    ftr_ln_ccdf,
    ftr_pdf,
    sigma2_from_avg_snr,
)
from .monte_carlo import (
    InsufficientConditioningSamples,
    McConfig,
    McEstimate,
    batch_generator,
    mc_conventional_sop,
    mc_modified_counts,
    mc_modified_sop,
    sample_ftr_snr,
)
from .secrecy import (
    QuadratureError,
    SecrecyConfig,
    SecrecyScenario,
    asop,
    conventional_sop,
    diversity_order,
    modified_sop,
    modified_sop_quadrature,
    scenario_from_avg_snr,
)
from .special_functions import (
    ConvergenceError,
    binomial,
    gamma_upper_int,
    legendre_p,
    ln_gamma,
    ln_gamma_upper_int,
)

__all__ = [
    "__version__",
    "FtrParams",
    "Truncation",
    "DEFAULT_TRUNCATION",
    "LinkBudget",
    "TruncationError",
    "ConvergenceError",
    "QuadratureError",
    "InsufficientConditioningSamples",
    "SecrecyConfig",
    "SecrecyScenario",
    "McConfig",
    "McEstimate",
    "ln_gamma",
    "gamma_upper_int",
    "ln_gamma_upper_int",
    "binomial",
    "legendre_p",
    "d_coeff",
    "d0",
    "ftr_pdf",
    "ftr_cdf",
    "ftr_ccdf",
    "ftr_ln_ccdf",
    "ftr_cdf_asymptotic",
    "sigma2_from_avg_snr",
    "modified_sop",
    "modified_sop_quadrature",
    "conventional_sop",
    "asop",
    "diversity_order",
    "scenario_from_avg_snr",
    "sample_ftr_snr",
    "batch_generator",
    "mc_modified_sop",
    "mc_modified_counts",
    "mc_conventional_sop",
]
