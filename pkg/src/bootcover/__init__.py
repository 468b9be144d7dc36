"""Bootstrap and Bayesian-bootstrap uncertainty for small, high log-variance samples."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .distributions import (
    DistributionSpec,
    Family,
    MomentSummary,
    Sample,
    moment_summary,
    sample,
    true_mean,
)
from .evaluation import (
    CoverageReport,
    LimitCdf,
    TrialRecord,
    coverage_report,
    half_max_cdf_ratio,
    limit_cdf,
    run_experiment,
    sweep_sizes,
)
from .resampling import (
    IntervalEstimate,
    Method,
    ReplicateSet,
    bayesian_bootstrap,
    dirichlet_weights_gaps,
    dirichlet_weights_naive,
    percentile_interval,
    pseudovalue_augment,
    standard_bootstrap,
    weighted_percentile_interval,
)

__all__ = [
    "BACKEND",
    "CoverageReport",
    "DistributionSpec",
    "Family",
    "IntervalEstimate",
    "LimitCdf",
    "Method",
    "MomentSummary",
    "ReplicateSet",
    "Sample",
    "TrialRecord",
    "bayesian_bootstrap",
    "coverage_report",
    "dirichlet_weights_gaps",
    "dirichlet_weights_naive",
    "half_max_cdf_ratio",
    "limit_cdf",
    "moment_summary",
    "percentile_interval",
    "pseudovalue_augment",
    "run_experiment",
    "sample",
    "standard_bootstrap",
    "sweep_sizes",
    "true_mean",
    "weighted_percentile_interval",
]
