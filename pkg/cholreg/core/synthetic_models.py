"""Population covariance models and Gaussian data generation."""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import DimensionError, DomainError, get_logger
from .dense_linalg import (
    as_matrix,
    check_symmetric,
    cholesky,
    orthonormal_factor,
    sym_eigen,
    symmetrize,
)

logger = get_logger(__name__)

SMALL_BAND = (0.5, 1.0)
# chi-square draws up to this many degrees of freedom are sums of squared normals
CHISQUARE_EXACT_DOF = 30


class RngStream:
    """Reproducible random stream identified by a seed and a spawn path.

    Two streams with the same seed and path produce identical draws. Child
    streams for independent Monte-Carlo trials are derived with ``child``.
    """

    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        if seed < 0 or seed >= 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"

    def child(self, index: int) -> "RngStream":
        """Independent stream for (seed, path, index); does not consume draws."""
        if index < 0:
            raise DomainError(f"child index must be non-negative, got {index}")
        return RngStream(self.seed, self.path + (index,))

    def derive_seed(self) -> int:
        """A 64-bit seed determined by this stream's identity."""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    def normal(self, shape) -> np.ndarray:
        return self._generator.standard_normal(shape)

    def uniform(self, low: float, high: float, size: int) -> np.ndarray:
        return self._generator.uniform(low, high, size)

    def chisquare(self, dof: int) -> float:
        if dof < 1:
            raise DomainError(f"chi-square degrees of freedom must be >= 1, got {dof}")
        if dof <= CHISQUARE_EXACT_DOF:
            z = self._generator.standard_normal(dof)
            return float(z @ z)
        return float(self._generator.chisquare(dof))


@dataclass(frozen=True)
class SpectrumSpec:
    """Two-band spectrum: round(eta * p) eigenvalues uniform on
    [lambda_max / 2, lambda_max], the rest uniform on [0.5, 1]."""

    p: int
    eta: float
    lambda_max: float

    def __post_init__(self):
        if self.p < 1:
            raise DimensionError(f"p must be >= 1, got {self.p}")
        if not 0.0 <= self.eta < 1.0:
            raise DomainError(f"eta must lie in [0, 1), got {self.eta}")
        if not self.lambda_max >= 2.0:
            raise DomainError(f"lambda_max must be >= 2, got {self.lambda_max}")
        if self.large_count >= self.p:
            raise DomainError(
                f"eta={self.eta} leaves no small eigenvalue at p={self.p}"
            )

    @property
    def large_count(self) -> int:
        return int(math.floor(self.eta * self.p + 0.5))


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """True covariance with its Cholesky factor and spectrum metadata."""

    sigma: np.ndarray
    chol_l: np.ndarray
    eigenvalues: np.ndarray
    spectrum: Optional[SpectrumSpec] = None
    cond: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "cond", float(self.eigenvalues[0] / self.eigenvalues[-1])
        )

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_sigma(cls, sigma: np.ndarray,
                   spectrum: Optional[SpectrumSpec] = None) -> "PopulationModel":
        """Wrap an arbitrary symmetric positive definite matrix."""
        sigma = as_matrix(sigma, "sigma")
        check_symmetric(sigma, "sigma")
        sigma = symmetrize(sigma)
        chol_l = cholesky(sigma)
        eigenvalues, _ = sym_eigen(sigma)
        return cls(sigma=sigma, chol_l=chol_l, eigenvalues=eigenvalues,
                   spectrum=spectrum)

    def schur_complement(self, n: int,
                         perm: Optional[Sequence[int]] = None) -> np.ndarray:
        """Sigma_{2.1} at split ``n`` in the variable order ``perm``.

        Equals L22 @ L22.T where L is the Cholesky factor of the reordered
        covariance.
        """
        l22 = self.schur_factor(n, perm)
        return l22 @ l22.T

    def schur_factor(self, n: int,
                     perm: Optional[Sequence[int]] = None) -> np.ndarray:
        """Lower-right block L22 of the Cholesky factor in order ``perm``."""
        if not 1 <= n < self.p:
            raise DimensionError(f"split must satisfy 1 <= n < p, got n={n}")
        if perm is None:
            return self.chol_l[n:, n:]
        perm = np.asarray(perm)
        return cholesky(self.sigma[np.ix_(perm, perm)])[n:, n:]


def lambda_max_for_cond(target_cond: float) -> float:
    """Upper band edge giving the nominal condition number ``target_cond``.

    The support ratio lambda_max / 0.5 equals the target.
    """
    if not target_cond >= 2.0:
        raise DomainError(f"target condition number must be >= 2, got {target_cond}")
    return 0.5 * float(target_cond)


def haar_orthogonal(p: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed p x p orthogonal matrix (QR of a Gaussian matrix)."""
    return orthonormal_factor(rng.normal((p, p)))


def build_population(spec: SpectrumSpec, rng: RngStream) -> PopulationModel:
    """Draw Sigma = V diag(lambda) V^T with the two-band spectrum of ``spec``."""
    k = spec.large_count
    large = rng.uniform(spec.lambda_max / 2.0, spec.lambda_max, k)
    small = rng.uniform(SMALL_BAND[0], SMALL_BAND[1], spec.p - k)
    eigenvalues = np.sort(np.concatenate([large, small]))[::-1]

    v = haar_orthogonal(spec.p, rng)
    sigma = symmetrize((v * eigenvalues) @ v.T)
    chol_l = cholesky(sigma)
    model = PopulationModel(sigma=np.asfortranarray(sigma), chol_l=chol_l,
                            eigenvalues=eigenvalues, spectrum=spec)
    logger.debug(
        f"Built population p={spec.p} eta={spec.eta} "
        f"lambda_max={spec.lambda_max} cond={model.cond:.4g}"
    )
    return model


def sample_data(model: PopulationModel, n: int, rng: RngStream) -> np.ndarray:
    """p x n zero-mean Gaussian samples with covariance ``model.sigma``."""
    if not 1 <= n < model.p:
        raise DimensionError(f"need 1 <= n < p, got p={model.p}, n={n}")
    z = rng.normal((model.p, n))
    return np.asfortranarray(model.chol_l @ z)


def sample_bartlett_factor(p: int, n: int, rng: RngStream) -> np.ndarray:
    """Lower-trapezoidal p x n factor of a standard singular Wishart matrix.

    Diagonal entry j (1-based) is the root of a chi-square draw with
    n - j + 1 degrees of freedom, entries below the diagonal are standard
    normal, entries above are zero.
    """
    if not 1 <= n < p:
        raise DimensionError(f"need 1 <= n < p, got p={p}, n={n}")
    g = np.tril(rng.normal((p, n)), k=-1)
    for j in range(n):
        g[j, j] = math.sqrt(rng.chisquare(n - j))
    return np.asfortranarray(g)
