"""Numerical core: linear algebra, population models, estimators and risk."""
from .dense_linalg import (
    PivotedQr,
    cholesky,
    digamma,
    pivoted_qr_of_transpose,
    sym_eigen,
    tri_solve_lower,
)
from .estimators import (
    CovEstimate,
    EstimatorKind,
    SampleFactorization,
    estimate,
    estimate_fsopt,
    estimate_lwls,
    estimate_oracle,
    estimate_rcf,
    factor_sample,
    fsopt_weights,
    oracle_weights,
)
from .evaluation import (
    RiskRecord,
    Scenario,
    oracle_risk_closed_form,
    run_risk,
    stein_loss,
)
from .synthetic_models import (
    PopulationModel,
    RngStream,
    SpectrumSpec,
    build_population,
    lambda_max_for_cond,
    sample_bartlett_factor,
    sample_data,
)

__all__ = [
    "CovEstimate",
    "EstimatorKind",
    "PivotedQr",
    "PopulationModel",
    "RiskRecord",
    "RngStream",
    "SampleFactorization",
    "Scenario",
    "SpectrumSpec",
    "build_population",
    "cholesky",
    "digamma",
    "estimate",
    "estimate_fsopt",
    "estimate_lwls",
    "estimate_oracle",
    "estimate_rcf",
    "factor_sample",
    "fsopt_weights",
    "lambda_max_for_cond",
    "oracle_risk_closed_form",
    "oracle_weights",
    "pivoted_qr_of_transpose",
    "run_risk",
    "sample_bartlett_factor",
    "sample_data",
    "stein_loss",
    "sym_eigen",
    "tri_solve_lower",
]
