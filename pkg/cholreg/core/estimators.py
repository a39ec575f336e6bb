"""Cholesky-factor covariance estimators for the singular case n < p.

All Cholesky-form estimators share the shape

    Sigma_hat = G~ D G~^T,   G~ = [[G11, 0], [G21, G~22]],   D = diag(D1, D2)

where G11, G21 come from the data and only the fill-in G~22 D2 G~22^T and
the weights differ:

* FSOPT: D1 minimizes the loss for the realization, tail = Sigma_{2.1}.
* Oracle: D1 minimizes the risk, d_j = 1 / (p + n - 2j + 1), tail = Sigma_{2.1}.
* RCF: Oracle D1 on the pivoted factor, tail = alpha^2 beta I.

LWLS is the linear-shrinkage baseline and does not use the factor.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..utils.logger import (
    DegenerateInput,
    DimensionError,
    ValidationError,
    get_logger,
)
from .dense_linalg import (
    as_matrix,
    cholesky,
    pivoted_qr_of_transpose,
    qr_of_transpose,
    symmetrize,
    tri_solve_lower,
)
from .synthetic_models import PopulationModel

logger = get_logger(__name__)


class EstimatorKind(str, Enum):
    FSOPT = "FSOPT"
    ORACLE = "Oracle"
    RCF = "RCF"
    LWLS = "LWLS"

    @classmethod
    def parse(cls, name: str) -> "EstimatorKind":
        """Look up a kind by name, ignoring case and dashes."""
        key = name.strip().replace("-", "").upper()
        for kind in cls:
            if kind.value.upper() == key:
                return kind
        choices = ", ".join(kind.value for kind in cls)
        raise ValidationError(f"Unknown estimator '{name}' (choose from {choices})")

    @property
    def needs_population(self) -> bool:
        """FSOPT and Oracle fill the unidentifiable block from the true Sigma."""
        return self in (EstimatorKind.FSOPT, EstimatorKind.ORACLE)


@dataclass(frozen=True, eq=False)
class SampleFactorization:
    """Partitioned lower-trapezoidal factor H = [H11; H21] of the data.

    ``x[perm] @ x[perm].T == h @ h.T`` where ``h = [h11; h21]``.
    """

    h11: np.ndarray
    h21: np.ndarray
    perm: np.ndarray
    q: np.ndarray

    @property
    def n(self) -> int:
        return self.h11.shape[0]

    @property
    def p(self) -> int:
        return self.h11.shape[0] + self.h21.shape[0]

    @property
    def h(self) -> np.ndarray:
        return np.vstack([self.h11, self.h21])

    @property
    def pivoted(self) -> bool:
        return not np.array_equal(self.perm, np.arange(self.p))


@dataclass(frozen=True, eq=False)
class CovEstimate:
    """A positive definite covariance estimate and how it was built."""

    sigma_hat: np.ndarray
    kind: EstimatorKind
    d: Optional[np.ndarray] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    shrinkage: Optional[float] = None


def _check_singular_regime(x: np.ndarray) -> None:
    p, n = x.shape
    if not 1 <= n < p:
        raise DimensionError(f"need 1 <= n < p, got p={p}, n={n}")


def factor_sample(x: np.ndarray, pivot: bool = True) -> SampleFactorization:
    """Factor the Gram matrix x x^T of a p x n data matrix.

    With ``pivot`` the rows are reordered so the diagonal of H decreases;
    without it ``perm`` is the identity and H is the plain Cholesky factor
    [G11; G21] of the sample covariance.
    """
    x = as_matrix(x, "x")
    _check_singular_regime(x)
    n = x.shape[1]
    qr = pivoted_qr_of_transpose(x) if pivot else qr_of_transpose(x)
    return SampleFactorization(
        h11=np.asfortranarray(qr.h[:n]),
        h21=np.asfortranarray(qr.h[n:]),
        perm=qr.perm,
        q=qr.q,
    )


def _require_unpivoted(fact: SampleFactorization) -> None:
    if fact.pivoted:
        raise ValidationError("FSOPT and Oracle weights need an unpivoted factorization")


def _weights_against(h: np.ndarray, chol_l: np.ndarray) -> np.ndarray:
    z = tri_solve_lower(chol_l, h)
    return 1.0 / np.einsum("ij,ij->j", z, z)


def fsopt_weights(fact: SampleFactorization, sigma: np.ndarray) -> np.ndarray:
    """Per-realization optimal weights d_j = 1 / (g_j^T Sigma^-1 g_j).

    Raises:
        NotPositiveDefinite: ``sigma`` has no Cholesky factor.
    """
    _require_unpivoted(fact)
    return _weights_against(fact.h, cholesky(sigma))


def oracle_weights(p: int, n: int) -> np.ndarray:
    """Risk-minimizing weights d_j = 1 / (p + n - 2j + 1), j = 1..n."""
    if not 1 <= n < p:
        raise DimensionError(f"need 1 <= n < p, got p={p}, n={n}")
    j = np.arange(1, n + 1)
    return 1.0 / (p + n - 2 * j + 1)


def _assemble(h11: np.ndarray, h21: np.ndarray, tail: np.ndarray,
              d: np.ndarray) -> np.ndarray:
    """G~ diag(d) G~^T for G~ = [[h11, 0], [h21, tail]]."""
    n = h11.shape[0]
    m = tail.shape[0]
    g = np.zeros((n + m, n + m))
    g[:n, :n] = h11
    g[n:, :n] = h21
    g[n:, n:] = tail
    return symmetrize((g * d) @ g.T)


def _with_population_tail(fact: SampleFactorization, model: PopulationModel,
                          d1: np.ndarray, kind: EstimatorKind) -> CovEstimate:
    # Only G~22 D2 G~22^T = Sigma_{2.1} matters; take D2 = I, G~22 = L22.
    if model.p != fact.p:
        raise DimensionError(f"model has p={model.p}, data has p={fact.p}")
    l22 = model.schur_factor(fact.n)
    d = np.concatenate([d1, np.ones(fact.p - fact.n)])
    sigma_hat = _assemble(fact.h11, fact.h21, l22, d)
    return CovEstimate(sigma_hat=sigma_hat, kind=kind, d=d)


def estimate_fsopt(fact: SampleFactorization, model: PopulationModel) -> CovEstimate:
    """Finite-sample optimum: minimizes Stein's loss for this realization."""
    _require_unpivoted(fact)
    if model.p != fact.p:
        raise DimensionError(f"model has p={model.p}, data has p={fact.p}")
    d1 = _weights_against(fact.h, model.chol_l)
    return _with_population_tail(fact, model, d1, EstimatorKind.FSOPT)


def estimate_oracle(fact: SampleFactorization, model: PopulationModel) -> CovEstimate:
    """Oracle: minimizes the risk; D1 depends only on (p, n)."""
    _require_unpivoted(fact)
    d1 = oracle_weights(fact.p, fact.n)
    return _with_population_tail(fact, model, d1, EstimatorKind.ORACLE)


def estimate_rcf(x: np.ndarray) -> CovEstimate:
    """Regularized Cholesky factor estimate from the data alone.

    The pivoted factor H is augmented with alpha * I, alpha = H11(n, n), and
    weighted by D = diag(oracle weights, beta * I), beta = 1 / (p - n + 1);
    the result is mapped back through the pivot permutation.
    """
    x = as_matrix(x, "x")
    _check_singular_regime(x)
    p, n = x.shape
    fact = factor_sample(x, pivot=True)

    alpha = float(fact.h11[n - 1, n - 1])
    beta = 1.0 / (p - n + 1)
    d = np.concatenate([oracle_weights(p, n), np.full(p - n, beta)])
    sigma_y = _assemble(fact.h11, fact.h21, alpha * np.eye(p - n), d)

    sigma_hat = np.empty_like(sigma_y)
    sigma_hat[np.ix_(fact.perm, fact.perm)] = sigma_y
    logger.debug(f"RCF p={p} n={n} alpha={alpha:.6g} beta={beta:.6g}")
    return CovEstimate(sigma_hat=sigma_hat, kind=EstimatorKind.RCF, d=d,
                       alpha=alpha, beta=beta)


def estimate_lwls(x: np.ndarray) -> CovEstimate:
    """Linear shrinkage of S/n towards m * I with the plug-in intensity.

    If S/n is already a multiple of the identity it is returned as m * I.

    Raises:
        DimensionError: fewer than two samples.
        DegenerateInput: all samples are zero.
    """
    x = as_matrix(x, "x")
    p, n = x.shape
    if n < 2:
        raise DimensionError(f"linear shrinkage needs n >= 2, got n={n}")

    s = symmetrize(x @ x.T / n)
    m = float(np.trace(s)) / p
    if m <= 0.0:
        raise DegenerateInput("all samples are zero")
    identity = np.eye(p)
    d2 = float(np.sum((s - m * identity) ** 2)) / p
    if d2 == 0.0:
        logger.debug("Sample covariance is already scaled identity")
        return CovEstimate(sigma_hat=m * identity, kind=EstimatorKind.LWLS,
                           shrinkage=1.0)

    col_sq = np.einsum("ij,ij->j", x, x)
    spread = float(np.sum(col_sq ** 2)) - n * float(np.sum(s * s))
    b_bar2 = max(spread, 0.0) / (n * n) / p
    b2 = min(b_bar2, d2)
    rho1 = b2 / d2
    sigma_hat = rho1 * m * identity + (1.0 - rho1) * s
    logger.debug(f"LWLS p={p} n={n} shrinkage={rho1:.6g}")
    return CovEstimate(sigma_hat=sigma_hat, kind=EstimatorKind.LWLS,
                       shrinkage=rho1)


def estimate(kind: EstimatorKind, x: np.ndarray,
             model: Optional[PopulationModel] = None) -> CovEstimate:
    """Build the estimate of ``kind`` from data ``x``.

    FSOPT and Oracle also need the population ``model``.
    """
    if kind.needs_population:
        if model is None:
            raise ValidationError(f"{kind.value} needs the population model")
        fact = factor_sample(x, pivot=False)
        if kind is EstimatorKind.FSOPT:
            return estimate_fsopt(fact, model)
        return estimate_oracle(fact, model)
    if kind is EstimatorKind.RCF:
        return estimate_rcf(x)
    return estimate_lwls(x)
