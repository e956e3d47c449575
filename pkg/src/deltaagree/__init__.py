"""Delta-model agreement between two raters on a nominal scale."""

from .core import (
    BoundaryError,
    ContingencyTable,
    DeltaModelError,
    InvalidParamsError,
    InvalidTableError,
    PopulationParams,
    PopulationTruths,
    SingularError,
    SolverError,
    build_joint_probabilities,
    consistency,
    observed_agreement_index,
    population_truths,
)
from .estimators import (
    EstimateFamily,
    Variances,
    ac_estimates,
    asymptotic_variances,
    bias_terms,
    chance_quantities,
    classic_estimates,
    estimate,
    estimated_variances,
    expected_bias,
    pi_variance,
    unbiased_estimates,
)
from .kappa import KappaResult, cohen_kappa
from .mle import MleFit, fit_delta_mle, lambda_for_B, log_likelihood
from .settings import SimulationSetting, builtin_settings, get_setting
from .simulation import SimulationSummary, run_setting, sample_table
from .special import GoldStandardStats, TwoByTwoReport, augment_2x2, fit_2x2, gold_standard_stats

__version__ = "0.1.0"

__all__ = [
    "BoundaryError", "ContingencyTable", "DeltaModelError", "InvalidParamsError", "InvalidTableError",
    "PopulationParams", "PopulationTruths", "SingularError", "SolverError", "build_joint_probabilities",
    "consistency", "observed_agreement_index", "population_truths",
    "EstimateFamily", "Variances", "ac_estimates", "asymptotic_variances", "bias_terms", "chance_quantities",
    "classic_estimates", "estimate", "estimated_variances", "expected_bias", "pi_variance", "unbiased_estimates",
    "KappaResult", "cohen_kappa",
    "MleFit", "fit_delta_mle", "lambda_for_B", "log_likelihood",
    "SimulationSetting", "builtin_settings", "get_setting",
    "SimulationSummary", "run_setting", "sample_table",
    "GoldStandardStats", "TwoByTwoReport", "augment_2x2", "fit_2x2", "gold_standard_stats",
]
