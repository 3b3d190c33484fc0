import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremal_ellipsoids.errors import ConvergenceError
from extremal_ellipsoids.linalg import (
    as_sym,
    e_vec,
    haar_orthogonal,
    inv_spd,
    inv_sqrtm_pinv,
    polar_psd,
    sqrtm_psd,
    sym_eigen,
)

from conftest import random_spd, random_sym


def charpoly_roots(S):
    """Eigenvalue oracle: roots of the characteristic polynomial."""
    return np.sort(np.roots(np.poly(S)).real)


def test_diagonal_sorted():
    values, V = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(values, [1, 2, 3])
    assert np.allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])


def test_classic_two_by_two():
    values, V = sym_eigen([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(values, [1, 3], atol=1e-14)
    assert np.isclose(abs(V[:, 0] @ np.array([1, -1]) / np.sqrt(2)), 1.0)


@pytest.mark.parametrize("S, expected", [
    (np.eye(3), [1, 1, 1]),
    (np.diag([4.0, 9.0]), [4, 9]),
    ([[5.0, 4.0], [4.0, 5.0]], [1, 9]),
])
def test_e_vec_examples(S, expected):
    assert np.allclose(e_vec(S), expected, atol=1e-13)


def test_random_5x5_against_characteristic_polynomial(rng):
    for _ in range(20):
        S = random_sym(rng, 5)
        assert np.allclose(e_vec(S), charpoly_roots(S), atol=1e-9)


@pytest.mark.parametrize("d", [1, 2, 3, 6, 10, 16])
def test_reconstruction_and_orthogonality(rng, d):
    S = random_sym(rng, d, scale=3.0)
    values, V = sym_eigen(S)
    assert np.all(np.diff(values) >= 0)
    assert np.max(np.abs(V.T @ V - np.eye(d))) <= 1e-10
    assert np.max(np.abs((V * values) @ V.T - S)) <= 1e-9 * (1 + np.max(np.abs(S)))


def test_matches_numpy_eigvalsh(rng):
    for d in (3, 7, 12):
        S = random_sym(rng, d)
        assert np.allclose(e_vec(S), np.linalg.eigvalsh(S), atol=1e-11)


def test_repeated_eigenvalues(rng):
    R = haar_orthogonal(rng, 4)
    S = (R * np.array([2.0, 2.0, 2.0, 5.0])) @ R.T
    values, V = sym_eigen(S)
    assert np.allclose(values, [2, 2, 2, 5], atol=1e-12)
    assert np.allclose((V * values) @ V.T, S, atol=1e-12)


def test_iteration_cap_reports_residual(rng):
    with pytest.raises(ConvergenceError) as info:
        sym_eigen(random_sym(rng, 6), max_sweeps=1)
    assert info.value.residual > 0


def test_as_sym_rejects_non_square():
    with pytest.raises(ValueError):
        as_sym(np.zeros((2, 3)))


def test_storage_is_exactly_symmetric(rng):
    S = as_sym(rng.standard_normal((4, 4)))
    assert np.array_equal(S, S.T)


def test_spectral_functions(rng):
    A = random_spd(rng, 4)
    R = sqrtm_psd(A)
    assert np.allclose(R @ R, A, atol=1e-12)
    assert np.allclose(inv_spd(A) @ A, np.eye(4), atol=1e-11)
    W = inv_sqrtm_pinv(A)
    assert np.allclose(W @ A @ W, np.eye(4), atol=1e-10)


def test_pinv_sqrt_on_singular():
    A = np.diag([4.0, 0.0])
    assert np.allclose(inv_sqrtm_pinv(A), np.diag([0.5, 0.0]))


def test_polar_factor_same_image(rng):
    Q = rng.standard_normal((3, 3))
    S = polar_psd(Q)
    assert np.allclose(S, S.T)
    assert np.all(e_vec(S) >= -1e-12)
    assert np.allclose(S @ S, Q @ Q.T, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eigen_invariant_under_conjugation(d, seed):
    r = np.random.default_rng(seed)
    S = random_sym(r, d)
    R = haar_orthogonal(r, d)
    assert np.allclose(e_vec(R @ S @ R.T), e_vec(S), atol=1e-10)
