"""Fast invariant checks run by ``cholreg selftest``."""
import math
from typing import Callable, Iterable, List, Tuple

import numpy as np

from ..utils.logger import CholRegError, ValidationError, get_logger
from .dense_linalg import (
    EULER_GAMMA,
    DigammaFn,
    cholesky,
    digamma,
    pivoted_qr_of_transpose,
)
from .estimators import EstimatorKind
from .evaluation import Scenario, oracle_risk_closed_form, run_risk, stein_loss
from .synthetic_models import RngStream

logger = get_logger(__name__)

DEFAULT_SEED = 20240101
KNOWN_FAULTS = ("digamma",)

CheckResult = Tuple[bool, str]


def _corrupted_digamma(x: float) -> float:
    return digamma(x) + 0.25


def _random_spd(rng: np.random.Generator, dim: int) -> np.ndarray:
    b = rng.standard_normal((dim, dim))
    return b @ b.T + dim * np.eye(dim)


def _check_cholesky(rng: np.random.Generator, psi: DigammaFn) -> CheckResult:
    worst = 0.0
    for dim in range(1, 21):
        a = _random_spd(rng, dim)
        l = cholesky(a)
        worst = max(worst, np.linalg.norm(l @ l.T - a) / np.linalg.norm(a))
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def _check_pivoted_qr(rng: np.random.Generator, psi: DigammaFn) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        p = int(rng.integers(2, 31))
        n = int(rng.integers(1, p))
        x = rng.standard_normal((p, n))
        qr = pivoted_qr_of_transpose(x)
        y = x[qr.perm]
        gram = y @ y.T
        worst = max(worst, np.linalg.norm(gram - qr.h @ qr.h.T) / np.linalg.norm(gram))
        diag = qr.diagonal
        if np.any(diag <= 0) or np.any(np.diff(diag) > 1e-12 * diag[0]):
            return False, f"diagonal not positive and decreasing at p={p}, n={n}"
        if sorted(qr.perm.tolist()) != list(range(p)):
            return False, f"permutation is not a bijection at p={p}"
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def _check_digamma(rng: np.random.Generator, psi: DigammaFn) -> CheckResult:
    err = max(abs(psi(1.0) + EULER_GAMMA),
              abs(psi(0.5) + EULER_GAMMA + 2.0 * math.log(2.0)))
    for x in np.linspace(0.1, 100.0, 50):
        err = max(err, abs(psi(x + 1.0) - psi(x) - 1.0 / x))
    return err <= 1e-10, f"max error {err:.2e}"


def _check_loss_floor(rng: np.random.Generator, psi: DigammaFn) -> CheckResult:
    worst = 0.0
    for dim in range(2, 12):
        sigma = _random_spd(rng, dim)
        worst = max(worst, abs(stein_loss(sigma, sigma) - dim))
    return worst <= 1e-10, f"max |loss(S, S) - p| {worst:.2e}"


def _check_oracle_risk(rng: np.random.Generator, psi: DigammaFn) -> CheckResult:
    scenario = Scenario(p=10, n=6, target_cond=16.0, eta=0.25)
    record = run_risk(scenario, EstimatorKind.ORACLE, 500,
                      RngStream(int(rng.integers(0, 2 ** 63))))
    expected = oracle_risk_closed_form(10, 6, psi=psi)
    z = (record.mean_loss - expected) / record.stderr_loss
    return abs(z) <= 4.0, (
        f"Monte-Carlo {record.mean_loss:.4f} +/- {record.stderr_loss:.4f} "
        f"vs closed form {expected:.4f} (z={z:+.2f})"
    )


CHECKS: List[Tuple[str, Callable[[np.random.Generator, DigammaFn], CheckResult]]] = [
    ("cholesky round-trip", _check_cholesky),
    ("pivoted QR reconstruction", _check_pivoted_qr),
    ("digamma values and recurrence", _check_digamma),
    ("Stein loss floor", _check_loss_floor),
    ("Oracle risk closed form", _check_oracle_risk),
]


def run_selftest(seed: int = DEFAULT_SEED,
                 faults: Iterable[str] = ()) -> Tuple[bool, List[str]]:
    """Run every check; returns overall success and one report line per check."""
    faults = set(faults)
    unknown = faults.difference(KNOWN_FAULTS)
    if unknown:
        raise ValidationError(f"Unknown fault(s): {', '.join(sorted(unknown))}")
    psi = _corrupted_digamma if "digamma" in faults else digamma

    report = []
    passed = True
    for name, check in CHECKS:
        rng = np.random.default_rng([seed, len(report)])
        try:
            ok, detail = check(rng, psi)
        except CholRegError as e:
            ok, detail = False, f"raised {type(e).__name__}: {e}"
        logger.debug(f"selftest {name}: {'ok' if ok else 'failed'}")
        passed = passed and ok
        report.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return passed, report
