"""cholreg - covariance estimation in the singular case by regularized Cholesky factors."""
from .core.estimators import (
    CovEstimate,
    EstimatorKind,
    estimate_fsopt,
    estimate_lwls,
    estimate_oracle,
    estimate_rcf,
    factor_sample,
)
from .core.evaluation import oracle_risk_closed_form, run_risk, stein_loss
from .ui.cli import CLI

__version__ = "0.1.0"
__author__ = "cholreg Contributors"
__license__ = "MIT"

__all__ = [
    "CLI",
    "CovEstimate",
    "EstimatorKind",
    "estimate_fsopt",
    "estimate_lwls",
    "estimate_oracle",
    "estimate_rcf",
    "factor_sample",
    "oracle_risk_closed_form",
    "run_risk",
    "stein_loss",
]
