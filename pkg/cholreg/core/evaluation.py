"""Stein's loss, the closed-form Oracle risk and the Monte-Carlo risk engine."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from ..utils.logger import (
    DimensionError,
    NumericalError,
    ValidationError,
    get_logger,
)
from .dense_linalg import (
    DigammaFn,
    as_matrix,
    check_symmetric,
    cholesky,
    expected_log_chisquare,
    symmetrize,
    tri_solve_lower,
)
from .estimators import EstimatorKind, estimate
from .synthetic_models import (
    PopulationModel,
    RngStream,
    SpectrumSpec,
    build_population,
    lambda_max_for_cond,
    sample_data,
)

logger = get_logger(__name__)

# Child stream indices under a scenario seed
POPULATION_STREAM = 0
TRIAL_STREAM = 1

CSV_HEADER = (
    "scenario", "p", "n", "target_cond", "realized_cond", "eta",
    "estimator", "trials", "mean_loss", "stderr_loss", "seed",
)


def format_real(value: float) -> str:
    """12 significant digits, '.' decimal point, no grouping."""
    return f"{value:.12g}"


@dataclass(frozen=True)
class Scenario:
    """One point of an experiment grid."""

    p: int
    n: int
    target_cond: float
    eta: float

    def __post_init__(self):
        if not 1 <= self.n < self.p:
            raise DimensionError(f"need 1 <= n < p, got p={self.p}, n={self.n}")
        # Validates cond and eta
        self.spectrum()

    @property
    def scenario_id(self) -> str:
        return (f"p{self.p}-n{self.n}-cond{format_real(self.target_cond)}"
                f"-eta{format_real(self.eta)}")

    def spectrum(self) -> SpectrumSpec:
        return SpectrumSpec(p=self.p, eta=self.eta,
                            lambda_max=lambda_max_for_cond(self.target_cond))


@dataclass(frozen=True)
class RiskRecord:
    """Monte-Carlo estimate of the risk of one estimator at one scenario."""

    scenario: str
    p: int
    n: int
    target_cond: float
    realized_cond: float
    eta: float
    estimator: EstimatorKind
    trials: int
    mean_loss: float
    stderr_loss: float
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.stderr_loss):
            raise NumericalError(f"non-finite standard error for {self.scenario}")
        # tr(A) - log det(A) >= p for SPD A
        if self.mean_loss < self.p * (1.0 - 1e-9):
            raise NumericalError(
                f"mean loss {self.mean_loss} is below its floor p={self.p}"
            )

    def to_row(self) -> List[str]:
        return [
            self.scenario,
            str(self.p),
            str(self.n),
            format_real(self.target_cond),
            format_real(self.realized_cond),
            format_real(self.eta),
            self.estimator.value,
            str(self.trials),
            format_real(self.mean_loss),
            format_real(self.stderr_loss),
            str(self.seed),
        ]


def _population_factor(target: Union[PopulationModel, np.ndarray]) -> np.ndarray:
    if isinstance(target, PopulationModel):
        return target.chol_l
    return cholesky(target)


def stein_loss(sigma_hat: np.ndarray,
               target: Union[PopulationModel, np.ndarray]) -> float:
    """tr(Sigma_hat Sigma^-1) - log det(Sigma_hat Sigma^-1).

    No -p offset is subtracted, so the minimum value is p, attained at
    Sigma_hat = Sigma. Evaluated as A = L^-1 Sigma_hat L^-T with L the
    Cholesky factor of Sigma and log det(A) from the Cholesky factor of A.

    Raises:
        NotPositiveDefinite: either matrix is not positive definite.
    """
    sigma_hat = as_matrix(sigma_hat, "sigma_hat")
    check_symmetric(sigma_hat, "sigma_hat")
    l = _population_factor(target)
    if sigma_hat.shape != l.shape:
        raise DimensionError(
            f"sigma_hat has shape {sigma_hat.shape}, Sigma has {l.shape}"
        )
    w = tri_solve_lower(l, sigma_hat)
    a = symmetrize(tri_solve_lower(l, w.T))
    c = cholesky(a)
    return float(np.trace(a) - 2.0 * np.sum(np.log(np.diag(c))))


def oracle_risk_closed_form(p: int, n: int, psi: Optional[DigammaFn] = None) -> float:
    """Expected Stein's loss of the Oracle estimator.

    sum_j [1 + log(p + n - 2j + 1) - E log chi2_{n-j+1}] + (p - n), with
    E log chi2_k = log 2 + psi(k / 2). ``psi`` replaces the digamma
    function (the self-test injects a faulty one).
    """
    if not 1 <= n < p:
        raise DimensionError(f"need 1 <= n < p, got p={p}, n={n}")
    total = float(p - n)
    for j in range(1, n + 1):
        total += (1.0 + math.log(p + n - 2 * j + 1)
                  - expected_log_chisquare(n - j + 1, psi))
    return total


def scenario_population(scenario: Scenario, rng: RngStream) -> PopulationModel:
    """The fixed population of a scenario, shared by all its trials."""
    return build_population(scenario.spectrum(), rng.child(POPULATION_STREAM))


def trial_losses(
    scenario: Scenario,
    kind: EstimatorKind,
    trials: int,
    rng: RngStream,
    workers: int = 1,
    model: Optional[PopulationModel] = None,
) -> np.ndarray:
    """Stein's loss of ``kind`` for each trial, in trial-index order.

    Trial ``t`` draws its data from ``rng.child(TRIAL_STREAM).child(t)``, so
    losses of different estimators under the same seed share their data.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    if model is None:
        model = scenario_population(scenario, rng)
    elif model.p != scenario.p:
        raise DimensionError(f"model has p={model.p}, scenario has p={scenario.p}")
    trial_root = rng.child(TRIAL_STREAM)

    def run_trial(t: int) -> float:
        x = sample_data(model, scenario.n, trial_root.child(t))
        return stein_loss(estimate(kind, x, model).sigma_hat, model)

    if workers == 1:
        losses = [run_trial(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = list(pool.map(run_trial, range(trials)))
    return np.asarray(losses)


def run_risk(
    scenario: Scenario,
    kind: EstimatorKind,
    trials: int,
    rng: RngStream,
    workers: int = 1,
    model: Optional[PopulationModel] = None,
) -> RiskRecord:
    """Monte-Carlo mean and standard error of Stein's loss.

    The result depends only on the scenario, the estimator, the trial count
    and the seed; ``workers`` changes nothing but wall time.
    """
    if trials < 2:
        raise ValidationError(f"trials must be >= 2, got {trials}")
    if model is None:
        model = scenario_population(scenario, rng)
    losses = trial_losses(scenario, kind, trials, rng, workers=workers, model=model)
    mean = float(np.mean(losses))
    stderr = float(np.std(losses, ddof=1) / math.sqrt(trials))
    logger.debug(
        f"{scenario.scenario_id} {kind.value}: mean={mean:.6g} stderr={stderr:.3g}"
    )
    return RiskRecord(
        scenario=scenario.scenario_id,
        p=scenario.p,
        n=scenario.n,
        target_cond=float(scenario.target_cond),
        realized_cond=model.cond,
        eta=float(scenario.eta),
        estimator=kind,
        trials=trials,
        mean_loss=mean,
        stderr_loss=stderr,
        seed=rng.seed,
    )


def pooled_stderr(a: RiskRecord, b: RiskRecord) -> float:
    return math.hypot(a.stderr_loss, b.stderr_loss)
