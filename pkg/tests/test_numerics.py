"""Unit tests for the dense linear-algebra wrappers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sisobs.numerics import (as_matrix, default_rank_tol,
                             pencil_generalized_eigs, pinv, spectral_norm,
                             svd_full, sym_eig_extremes)


def test_as_matrix_promotes_scalars_and_vectors():
    assert as_matrix(3.0).shape == (1, 1)
    assert as_matrix([1.0, 2.0]).shape == (2, 1)
    assert as_matrix([[1.0, 2.0]]).shape == (1, 2)


def test_as_matrix_shape_checks():
    with pytest.raises(ValueError):
        as_matrix(np.eye(2), rows=3)
    with pytest.raises(ValueError):
        as_matrix(np.eye(2), cols=3)
    with pytest.raises(ValueError):
        as_matrix(np.array([[1.0, np.nan]]))


def test_svd_full_reconstructs():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((5, 3))
    res = svd_full(M)
    S = np.zeros((5, 3))
    S[:3, :3] = np.diag(res.S)
    assert np.allclose(res.U @ S @ res.V.T, M, atol=1e-12)
    assert res.numerical_rank == 3
    assert np.allclose(res.U.T @ res.U, np.eye(5), atol=1e-12)
    assert np.allclose(res.V.T @ res.V, np.eye(3), atol=1e-12)


def test_svd_rank_detects_deficiency():
    u = np.array([[1.0], [2.0], [3.0]])
    v = np.array([[1.0, -1.0]])
    assert svd_full(u @ v).numerical_rank == 1
    assert svd_full(np.zeros((3, 2))).numerical_rank == 0


def test_svd_empty_matrix():
    res = svd_full(np.zeros((0, 3)))
    assert res.numerical_rank == 0
    assert res.U.shape == (0, 0) and res.V.shape == (3, 3)


def test_pinv_penrose_conditions():
    rng = np.random.default_rng(1)
    for shape in [(4, 2), (2, 4), (3, 3)]:
        M = rng.standard_normal(shape)
        Mp = pinv(M)
        assert np.allclose(M @ Mp @ M, M, atol=1e-10)
        assert np.allclose(Mp @ M @ Mp, Mp, atol=1e-10)
        assert np.allclose((M @ Mp).T, M @ Mp, atol=1e-10)
        assert np.allclose((Mp @ M).T, Mp @ M, atol=1e-10)


def test_pinv_empty():
    assert pinv(np.zeros((3, 0))).shape == (0, 3)
    assert pinv(np.zeros((0, 2))).shape == (2, 0)


def test_spectral_norm_matches_numpy():
    rng = np.random.default_rng(2)
    M = rng.standard_normal((4, 6))
    assert np.isclose(spectral_norm(M), np.linalg.norm(M, 2))
    assert spectral_norm(np.zeros((3, 0))) == 0.0


def test_sym_eig_extremes():
    D = np.diag([3.0, -1.0, 0.5])
    lo, hi = sym_eig_extremes(D)
    assert lo == -1.0 and hi == 3.0
    with pytest.raises(ValueError):
        sym_eig_extremes(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        sym_eig_extremes(np.zeros((2, 3)))


def test_pencil_eigs_standard_problem():
    # M1 = I reduces the pencil to an ordinary eigenproblem
    A = np.diag([0.5, -2.0])
    eigs = sorted(pencil_generalized_eigs(A, np.eye(2)), key=lambda z: z.real)
    assert np.allclose([z.real for z in eigs], [-2.0, 0.5], atol=1e-10)


def test_pencil_eigs_drops_infinite():
    # det([a, b; c, d] - lam * diag(1, 0)) = 0 has exactly one finite root
    M0 = np.array([[1.0, 2.0], [3.0, 4.0]])
    M1 = np.diag([1.0, 0.0])
    eigs = pencil_generalized_eigs(M0, M1)
    assert len(eigs) == 1
    # finite root of (1 - lam) * 4 - 2 * 3 = 0  ->  lam = -1/2
    assert np.isclose(eigs[0].real, -0.5, atol=1e-10)
    assert np.isclose(eigs[0].imag, 0.0, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_rank_tol_scales_with_matrix(rows, cols, seed):
    M = np.random.default_rng(seed).standard_normal((rows, cols))
    tol = default_rank_tol(M)
    assert tol > 0
    # tolerance is tiny relative to the largest singular value
    assert tol <= max(rows, cols) * 1e-12 * max(np.linalg.norm(M, 2), 1.0)
