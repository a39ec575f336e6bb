"""Input validation utilities for cholreg."""
import math
from typing import TYPE_CHECKING, Sequence

from .logger import ValidationError

if TYPE_CHECKING:
    from .config import SweepConfig

MAX_ETA = 0.95


def validate_sample_counts(p: int, n_values: Sequence[int]) -> bool:
    """Every n must satisfy 1 <= n < p."""
    if not isinstance(p, int) or p < 2:
        raise ValidationError(f"p must be an integer >= 2, got {p!r}")
    if not n_values:
        raise ValidationError("at least one n value is required")
    for n in n_values:
        if not 1 <= n < p:
            raise ValidationError(f"n={n} must satisfy 1 <= n < p={p}")
    return True


def validate_condition_numbers(cond_values: Sequence[float]) -> bool:
    """Target condition numbers must be finite and >= 2."""
    if not cond_values:
        raise ValidationError("at least one cond value is required")
    for cond in cond_values:
        if not math.isfinite(cond) or cond < 2.0:
            raise ValidationError(f"cond={cond} must be finite and >= 2")
    return True


def validate_eta_values(eta_values: Sequence[float], p: int) -> bool:
    """Spectrum shapes must lie in [0, 0.95] and leave a small eigenvalue."""
    if not eta_values:
        raise ValidationError("at least one eta value is required")
    for eta in eta_values:
        if not 0.0 <= eta <= MAX_ETA:
            raise ValidationError(f"eta={eta} must lie in [0, {MAX_ETA}]")
        if math.floor(eta * p + 0.5) >= p:
            raise ValidationError(f"eta={eta} leaves no small eigenvalue at p={p}")
    return True


def validate_trials(trials: int) -> bool:
    if not isinstance(trials, int) or trials < 2:
        raise ValidationError(f"trials must be an integer >= 2, got {trials!r}")
    return True


def validate_seed(seed: int) -> bool:
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ValidationError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return True


def validate_sweep_config(config: "SweepConfig") -> bool:
    """Validate every field of a sweep configuration."""
    validate_sample_counts(config.p, config.n_values)
    validate_condition_numbers(config.cond_values)
    validate_eta_values(config.eta_values, config.p)
    if not config.estimators:
        raise ValidationError("at least one estimator is required")
    if any(kind.value == "LWLS" for kind in config.estimators) and min(config.n_values) < 2:
        raise ValidationError("LWLS needs n >= 2")
    validate_trials(config.trials)
    validate_seed(config.seed)
    if not isinstance(config.workers, int) or config.workers < 1:
        raise ValidationError(f"workers must be an integer >= 1, got {config.workers!r}")
    return True
