"""Two-step dynamic network inference for short multivariate time series.

The package covers the full loop: simulate sparse AR(1) models and panels,
score candidate edges with a low-order conditional screening step followed
by a full-regression refinement step, select edges by threshold or false
discovery rate, compare against exact population edge sets, and evaluate
precision-recall performance.
"""

from ._engine import available_engines, default_engine
from .errors import (
    BudgetExceeded,
    EmptyGrid,
    EmptyTruth,
    G1dbnError,
    InvalidDof,
    NonFinite,
    RankDeficiencyWarning,
    RankDeficient,
    SingularConditioning,
    StabilityNotReached,
    TooFewRows,
    TooFewTimePoints,
    TooFewVariables,
    TooManyParents,
    Unstable,
)
from .evaluate import (
    ConfusionCounts,
    PRCurve,
    auc_pr,
    confusion,
    pr_curve,
    precision_at_recall,
)
from .inference import (
    Alpha1GridPoint,
    Alpha1Selection,
    InferenceResult,
    bh_select,
    feasible_alpha1,
    infer,
    select_alpha1,
    step1_score_rows,
    step1_scores,
    step2_scores,
    threshold_edges,
)
from .model import (
    AR1Model,
    EdgeSet,
    InferenceConfig,
    ScoreMatrix,
    TimeSeries,
    lagged_pairs,
    validate_timeseries,
)
from .oracle import (
    joint_lag_covariance,
    partial_covariance,
    population_gmin,
    population_gq,
    property_report,
    stationary_covariance,
)
from .regress import (
    RegressionFit,
    fit_ls,
    fit_m_estimator,
    irls_weights,
    mad_scale,
    student_t_two_sided,
)
from .simulate import random_ar1_model, simulate_series
from .study import ReplicateResult, StudyConfig, StudyResult, run_study

__version__ = "0.1.0"

__all__ = [
    "AR1Model",
    "Alpha1GridPoint",
    "Alpha1Selection",
    "BudgetExceeded",
    "ConfusionCounts",
    "EdgeSet",
    "EmptyGrid",
    "EmptyTruth",
    "G1dbnError",
    "InferenceConfig",
    "InferenceResult",
    "InvalidDof",
    "NonFinite",
    "PRCurve",
    "RankDeficiencyWarning",
    "RankDeficient",
    "RegressionFit",
    "ReplicateResult",
    "ScoreMatrix",
    "SingularConditioning",
    "StabilityNotReached",
    "StudyConfig",
    "StudyResult",
    "TimeSeries",
    "TooFewRows",
    "TooFewTimePoints",
    "TooFewVariables",
    "TooManyParents",
    "Unstable",
    "auc_pr",
    "available_engines",
    "bh_select",
    "confusion",
    "default_engine",
    "feasible_alpha1",
    "fit_ls",
    "fit_m_estimator",
    "infer",
    "irls_weights",
    "joint_lag_covariance",
    "lagged_pairs",
    "mad_scale",
    "partial_covariance",
    "population_gmin",
    "population_gq",
    "pr_curve",
    "precision_at_recall",
    "property_report",
    "random_ar1_model",
    "run_study",
    "select_alpha1",
    "simulate_series",
    "stationary_covariance",
    "step1_score_rows",
    "step1_scores",
    "step2_scores",
    "student_t_two_sided",
    "threshold_edges",
    "validate_timeseries",
    "__version__",
]
