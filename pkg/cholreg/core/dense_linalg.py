"""Dense real linear algebra used by the estimators.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Lower
triangular factors are stored as full square arrays whose strictly upper
part is zero.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..utils.logger import (
    DimensionError,
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    RankDeficient,
    ValidationError,
    get_logger,
)

logger = get_logger(__name__)

EPS = float(np.finfo(np.float64).eps)
SYMMETRY_RTOL = 1e-12
EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class PivotedQr:
    """QR factorization of a transposed data matrix.

    ``x.T[:, perm] == q @ h.T`` up to rounding, with ``h`` lower trapezoidal
    and its diagonal positive (and non-increasing when pivoting is used).
    """

    q: np.ndarray
    h: np.ndarray
    perm: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.h).copy()


def as_matrix(a: Union[np.ndarray, list], name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite, non-empty 2-D float matrix.

    The returned array is a column-major (Fortran-ordered) copy.
    """
    arr = np.array(a, dtype=np.float64, order="F", copy=True)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got {arr.ndim} dimension(s)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return arr


def check_symmetric(a: np.ndarray, name: str = "matrix",
                    rtol: float = SYMMETRY_RTOL) -> None:
    """Raise ValidationError unless ``a`` is square and symmetric within rtol."""
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > rtol * max(scale, np.finfo(float).tiny):
        raise ValidationError(f"{name} is not symmetric")


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def cholesky(a: Union[np.ndarray, list]) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises:
        NotPositiveDefinite: a pivot is at or below
            ``dim * eps * max(diag(a))``.
    """
    a = as_matrix(a, "a")
    check_symmetric(a, "a")
    dim = a.shape[0]
    max_diag = float(np.max(np.diag(a)))
    if max_diag <= 0.0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    threshold = dim * EPS * max_diag

    l = np.zeros_like(a)
    for j in range(dim):
        row = l[j, :j]
        pivot = a[j, j] - row @ row
        if pivot <= threshold:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at index {j} is below threshold {threshold:.3e}"
            )
        l[j, j] = math.sqrt(pivot)
        l[j + 1:, j] = (a[j + 1:, j] - l[j + 1:, :j] @ row) / l[j, j]
    return l


def _householder_qr(
    a: np.ndarray,
    pivot: bool,
    rank_check: bool,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Householder QR ``a[:, perm] = q @ r`` with positive diagonal ``r``.

    With ``pivot`` the column of largest remaining norm is brought forward at
    each step; ``np.argmax`` keeps the lowest index on ties.
    """
    m, k = a.shape
    steps = min(m, k)
    r = np.array(a, dtype=np.float64, copy=True)
    q = np.eye(m)
    perm = np.arange(k)
    tol = None

    for j in range(steps):
        if pivot:
            block = r[j:, j:]
            norms = np.einsum("ij,ij->j", block, block)
            c = j + int(np.argmax(norms))
            if c != j:
                r[:, [j, c]] = r[:, [c, j]]
                perm[[j, c]] = perm[[c, j]]

        x = r[j:, j]
        norm_x = float(np.linalg.norm(x))
        if rank_check:
            if tol is None:
                tol = steps * EPS * norm_x
            if norm_x == 0.0 or norm_x < tol:
                raise RankDeficient(
                    f"diagonal {norm_x:.3e} at step {j} is below {tol:.3e}; "
                    "samples are linearly dependent"
                )
        if norm_x == 0.0:
            continue

        alpha = -math.copysign(norm_x, x[0])
        v = x.copy()
        v[0] -= alpha
        beta = float(v @ v)
        if beta > 0.0:
            r[j:, j:] -= np.outer(v, (2.0 / beta) * (v @ r[j:, j:]))
            q[:, j:] -= np.outer(q[:, j:] @ v, (2.0 / beta) * v)
        r[j, j] = alpha
        r[j + 1:, j] = 0.0
        if alpha < 0.0:
            r[j, j:] *= -1.0
            q[:, j] *= -1.0

    return q, r, perm


def pivoted_qr_of_transpose(x: Union[np.ndarray, list]) -> PivotedQr:
    """Column-pivoted QR of ``x.T`` for a p x n data matrix with n <= p.

    Returns ``PivotedQr`` with ``q`` n x n, ``h`` p x n lower trapezoidal with
    positive non-increasing diagonal, and ``perm`` such that ``x[perm]`` is
    the reordered data whose Gram matrix is ``h @ h.T``.

    Raises:
        DimensionError: n > p.
        RankDeficient: the samples (columns of ``x``) are dependent.
    """
    return _qr_of_transpose(x, pivot=True)


def qr_of_transpose(x: Union[np.ndarray, list]) -> PivotedQr:
    """Unpivoted QR of ``x.T``; ``perm`` is the identity."""
    return _qr_of_transpose(x, pivot=False)


def _qr_of_transpose(x, pivot: bool) -> PivotedQr:
    x = as_matrix(x, "x")
    p, n = x.shape
    if n > p:
        raise DimensionError(f"need n <= p, got p={p}, n={n}")
    q, r, perm = _householder_qr(x.T, pivot=pivot, rank_check=True)
    h = np.asfortranarray(np.tril(r.T[:, :n]))
    logger.debug(f"QR of transpose p={p} n={n} pivot={pivot}")
    return PivotedQr(q=q, h=h, perm=perm)


def orthonormal_factor(z: np.ndarray) -> np.ndarray:
    """Q factor of a square matrix with the R diagonal made positive."""
    z = as_matrix(z, "z")
    q, _, _ = _householder_qr(z, pivot=False, rank_check=False)
    return q


def tri_solve_lower(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``l @ z = b`` by forward substitution.

    ``b`` may be a vector or a matrix with ``l.shape[0]`` rows.
    """
    l = as_matrix(l, "l")
    dim = l.shape[0]
    if l.shape[1] != dim:
        raise ValidationError(f"l must be square, got shape {l.shape}")
    diag = np.diag(l)
    if np.any(diag <= 0.0):
        raise ValidationError("l must have a positive diagonal")
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != dim:
        raise ValidationError(f"b has {b.shape[0]} rows, expected {dim}")
    if not np.all(np.isfinite(b)):
        raise ValidationError("b contains NaN or Inf entries")

    vector = b.ndim == 1
    rhs = b.reshape(dim, -1)
    z = np.empty_like(rhs)
    for i in range(dim):
        z[i] = (rhs[i] - l[i, :i] @ z[:i]) / diag[i]
    if not np.all(np.isfinite(z)):
        raise ValidationError("solution overflowed")
    return z[:, 0] if vector else z


def sym_eigen(a: Union[np.ndarray, list],
              max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in descending order and the matching orthogonal
    eigenvector matrix (eigenvectors in columns).

    Raises:
        NoConvergence: off-diagonal mass not annihilated within max_sweeps.
    """
    a = as_matrix(a, "a")
    check_symmetric(a, "a")
    a = symmetrize(a)
    dim = a.shape[0]
    v = np.eye(dim)
    tol = 10.0 * dim * EPS * np.linalg.norm(a)

    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0) * float(np.linalg.norm(np.triu(a, 1)))
        if off <= tol:
            break
        if sweep == max_sweeps:
            raise NoConvergence(
                f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})"
            )
        for i in range(dim - 1):
            for k in range(i + 1, dim):
                aik = float(a[i, k])
                g = 100.0 * abs(aik)
                aii, akk = float(a[i, i]), float(a[k, k])
                # negligible against both diagonal entries
                if abs(aii) + g == abs(aii) and abs(akk) + g == abs(akk):
                    a[i, k] = a[k, i] = 0.0
                    continue
                h = akk - aii
                if abs(h) + g == abs(h):
                    t = aik / h
                else:
                    theta = h / (2.0 * aik)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c

                ai, ak = a[:, i].copy(), a[:, k].copy()
                a[:, i] = c * ai - s * ak
                a[:, k] = s * ai + c * ak
                ai, ak = a[i, :].copy(), a[k, :].copy()
                a[i, :] = c * ai - s * ak
                a[k, :] = s * ai + c * ak
                a[i, k] = a[k, i] = 0.0

                vi, vk = v[:, i].copy(), v[:, k].copy()
                v[:, i] = c * vi - s * vk
                v[:, k] = s * vi + c * vk

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


# Bernoulli-number coefficients B_2k / (2k) of the digamma asymptotic series
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0.

    Shifts the argument above 10 with psi(x) = psi(x + 1) - 1/x, then sums
    the asymptotic expansion.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"digamma requires x > 0, got {x}")

    value = 0.0
    while x < 10.0:
        value -= 1.0 / x
        x += 1.0

    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for coeff in _DIGAMMA_SERIES:
        series += coeff * power
        power *= inv2
    return value + math.log(x) - 0.5 / x - series


DigammaFn = Callable[[float], float]


def expected_log_chisquare(dof: int, psi: Optional[DigammaFn] = None) -> float:
    """E[log chi2_dof] = log 2 + psi(dof / 2)."""
    if dof < 1:
        raise DomainError(f"chi-square degrees of freedom must be >= 1, got {dof}")
    psi = psi or digamma
    return math.log(2.0) + psi(dof / 2.0)
