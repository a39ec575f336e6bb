import math

import numpy as np
import pytest  # type: ignore
from hypothesis import given, settings, strategies as st  # type: ignore
from scipy import special  # type: ignore

from cholreg.core.dense_linalg import (
    EULER_GAMMA,
    as_matrix,
    cholesky,
    digamma,
    expected_log_chisquare,
    orthonormal_factor,
    pivoted_qr_of_transpose,
    qr_of_transpose,
    sym_eigen,
    tri_solve_lower,
)
from cholreg.utils.logger import (
    DimensionError,
    DomainError,
    NotPositiveDefinite,
    RankDeficient,
    ValidationError,
)


# Test fixtures
@pytest.fixture
def rng():
    """Seeded generator for random test matrices."""
    return np.random.default_rng(1234)


def random_spd(rng, dim):
    b = rng.standard_normal((dim, dim))
    return b @ b.T + dim * np.eye(dim)


def rel_error(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


# Test input validation
def test_as_matrix_rejects_bad_input():
    """Test that non-finite, empty and 1-D input is rejected."""
    with pytest.raises(ValidationError):
        as_matrix([1.0, 2.0])
    with pytest.raises(ValidationError):
        as_matrix(np.zeros((0, 3)))
    with pytest.raises(ValidationError, match="NaN or Inf"):
        as_matrix([[1.0, np.nan]])

    arr = as_matrix([[1, 2], [3, 4]])
    assert arr.dtype == np.float64
    assert arr.flags.f_contiguous


# Test Cholesky factorization
def test_cholesky_examples():
    """Test the hand-checked Cholesky factors."""
    assert np.array_equal(cholesky(np.eye(3)), np.eye(3))

    l = cholesky([[4.0, 2.0], [2.0, 5.0]])
    assert np.allclose(l, [[2.0, 0.0], [1.0, 2.0]], rtol=0, atol=1e-14)
    assert np.allclose(l @ l.T, [[4.0, 2.0], [2.0, 5.0]])


def test_cholesky_rejects_indefinite_and_asymmetric():
    """Test error reporting for matrices without a Cholesky factor."""
    with pytest.raises(NotPositiveDefinite):
        cholesky([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.zeros((2, 2)))
    with pytest.raises(ValidationError, match="not symmetric"):
        cholesky([[2.0, 1.0], [0.0, 2.0]])


@settings(max_examples=50, deadline=None)
@given(dim=st.integers(min_value=1, max_value=50), seed=st.integers(0, 2 ** 32 - 1))
def test_cholesky_round_trip(dim, seed):
    """Test LL^T reproduces random positive definite matrices."""
    a = random_spd(np.random.default_rng(seed), dim)
    l = cholesky(a)
    assert np.all(np.diag(l) > 0)
    assert np.array_equal(l, np.tril(l))
    assert rel_error(l @ l.T, a) <= 1e-9


# Test QR of the transposed data matrix
def test_qr_of_orthonormal_columns():
    """Test the factor of identity columns is trivial."""
    x = np.eye(3)[:, :2]
    qr = pivoted_qr_of_transpose(x)
    assert np.allclose(qr.diagonal, [1.0, 1.0])
    assert qr.perm.tolist() == [0, 1, 2]


def check_pivoted_qr_reconstruction(rng, trials):
    for _ in range(trials):
        p = int(rng.integers(2, 51))
        n = int(rng.integers(1, p))
        x = rng.standard_normal((p, n))
        qr = pivoted_qr_of_transpose(x)

        y = x[qr.perm]
        assert rel_error(qr.h @ qr.h.T, y @ y.T) <= 1e-9
        assert np.linalg.norm(qr.q.T @ qr.q - np.eye(n)) <= 1e-10 * n
        assert np.allclose(x.T[:, qr.perm], qr.q @ qr.h.T, rtol=0,
                           atol=1e-10 * np.linalg.norm(x))
        assert sorted(qr.perm.tolist()) == list(range(p))

        diag = qr.diagonal
        assert np.all(diag > 0)
        assert np.all(np.diff(diag) <= 1e-12 * diag[0])
        assert np.array_equal(qr.h, np.tril(qr.h))


def test_pivoted_qr_reconstruction(rng):
    """Test the reordered Gram matrix equals h h^T."""
    check_pivoted_qr_reconstruction(rng, 200)


@pytest.mark.slow
def test_pivoted_qr_reconstruction_full_count(rng):
    """Test 1000 random Gaussian inputs."""
    check_pivoted_qr_reconstruction(rng, 1000)


def test_pivoted_qr_moves_largest_row_first():
    """Test pivoting brings the variable of largest norm forward."""
    x = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 0.0]])
    qr = pivoted_qr_of_transpose(x)
    assert qr.perm[0] == 1
    y = x[qr.perm]
    assert np.allclose(qr.h @ qr.h.T, y @ y.T)


def test_unpivoted_qr_keeps_order():
    """Test the unpivoted factor is the plain Cholesky factor of x x^T."""
    x = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 0.0]])
    qr = qr_of_transpose(x)
    assert qr.perm.tolist() == [0, 1, 2]
    assert np.allclose(qr.h, [[1.0, 0.0], [1.0, 1.0], [0.0, 0.0]], atol=1e-15)


def test_qr_proportional_rows_succeed(rng):
    """Test dependent variables are fine; only dependent samples fail."""
    x = rng.standard_normal((5, 3))
    x[1] = 2.0 * x[0]
    qr = pivoted_qr_of_transpose(x)
    y = x[qr.perm]
    assert rel_error(qr.h @ qr.h.T, y @ y.T) <= 1e-10


def test_qr_errors():
    """Test rank and shape errors."""
    with pytest.raises(RankDeficient):
        pivoted_qr_of_transpose([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(RankDeficient):
        qr_of_transpose([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(DimensionError):
        pivoted_qr_of_transpose(np.ones((2, 3)))


def test_orthonormal_factor(rng):
    """Test the Q factor of a square Gaussian matrix is orthogonal."""
    q = orthonormal_factor(rng.standard_normal((6, 6)))
    assert np.allclose(q.T @ q, np.eye(6), atol=1e-12)


# Test triangular solves
def test_tri_solve_examples():
    """Test forward substitution on small systems."""
    b = np.array([3.0, -1.0, 2.5])
    assert np.allclose(tri_solve_lower(np.eye(3), b), b)

    z = tri_solve_lower(np.array([[2.0, 0.0], [1.0, 2.0]]), np.array([4.0, 5.0]))
    assert np.allclose(z, [2.0, 1.5])

    d = np.diag([2.0, 4.0])
    assert np.allclose(tri_solve_lower(d, d), np.eye(2))


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(min_value=1, max_value=30), seed=st.integers(0, 2 ** 32 - 1))
def test_tri_solve_residual(dim, seed):
    """Test l z = b for random well-conditioned factors."""
    rng = np.random.default_rng(seed)
    l = cholesky(random_spd(rng, dim))
    b = rng.standard_normal((dim, 3))
    z = tri_solve_lower(l, b)
    assert rel_error(l @ z, b) <= 1e-10


def test_tri_solve_errors():
    """Test invalid factors and shapes are rejected."""
    with pytest.raises(ValidationError, match="positive diagonal"):
        tri_solve_lower(np.diag([1.0, 0.0]), np.ones(2))
    with pytest.raises(ValidationError):
        tri_solve_lower(np.eye(2), np.ones(3))


# Test the symmetric eigensolver
def test_sym_eigen_examples():
    """Test eigenvalues of hand-checked matrices."""
    w, v = sym_eigen(np.diag([3.0, 1.0]))
    assert np.allclose(w, [3.0, 1.0])
    assert np.allclose(np.abs(v), np.eye(2))

    w, _ = sym_eigen([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(w, [3.0, 1.0])

    w, _ = sym_eigen(np.eye(4))
    assert np.allclose(w, np.ones(4))


def test_sym_eigen_random(rng):
    """Test residual, ordering and agreement with LAPACK."""
    for dim in (3, 8, 25):
        a = random_spd(rng, dim) - dim * np.eye(dim)
        w, v = sym_eigen(a)
        assert np.linalg.norm(a @ v - v * w) <= 1e-8 * np.linalg.norm(a)
        assert np.all(np.diff(w) <= 0)
        assert np.allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-9 * np.abs(w).max())
        assert np.allclose(v.T @ v, np.eye(dim), atol=1e-10)


def test_sym_eigen_converges_on_random_spd(rng):
    """Test Jacobi settles on ordinary positive definite matrices."""
    for dim in (4, 8, 25):
        for _ in range(20):
            b = rng.standard_normal((dim, dim))
            a = b @ b.T + 0.5 * np.eye(dim)
            w, v = sym_eigen(a)
            assert np.linalg.norm(a @ v - v * w) <= 1e-9 * np.linalg.norm(a)
            assert np.allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-9 * w[0])


def test_sym_eigen_tiny_off_diagonal_entries():
    """Test negligible entries are dropped without overflow."""
    a = np.array([[2.0, 1.0, 1e-300], [1.0, 3.0, 0.0], [1e-300, 0.0, 1.0]])
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        w, v = sym_eigen(a)
    assert np.allclose(w, np.linalg.eigvalsh(a)[::-1])
    assert np.allclose(v.T @ v, np.eye(3), atol=1e-12)


# Test digamma
def test_digamma_special_values():
    """Test psi(1) and psi(1/2)."""
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-12)
    assert digamma(0.5) == pytest.approx(-1.9635100260214235, abs=1e-12)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-12)


def test_digamma_matches_scipy():
    """Test agreement with scipy over a wide range."""
    for x in np.concatenate([np.linspace(0.01, 20.0, 400), [55.5, 1e3, 1e6]]):
        assert digamma(x) == pytest.approx(special.digamma(x), abs=1e-10)


def test_digamma_recurrence():
    """Test psi(x + 1) - psi(x) = 1/x."""
    assert digamma(10.0) == pytest.approx(digamma(9.0) + 1.0 / 9.0, abs=1e-12)
    for x in np.linspace(0.1, 100.0, 500):
        assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, abs=1e-11)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(min_value=0.1, max_value=100.0))
def test_digamma_recurrence_property(x):
    """Test the recurrence at arbitrary points."""
    assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, abs=1e-11)


def test_digamma_domain():
    """Test non-positive and non-finite arguments are rejected."""
    for x in (0.0, -1.5, float("nan"), float("inf")):
        with pytest.raises(DomainError):
            digamma(x)


def test_expected_log_chisquare():
    """Test E log chi2_k against scipy and a custom digamma."""
    for k in (1, 2, 7, 40):
        expected = math.log(2.0) + special.digamma(k / 2.0)
        assert expected_log_chisquare(k) == pytest.approx(expected, abs=1e-10)
    assert expected_log_chisquare(4, psi=lambda x: 0.0) == pytest.approx(math.log(2.0))
    with pytest.raises(DomainError):
        expected_log_chisquare(0)
