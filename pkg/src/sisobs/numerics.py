"""Dense linear-algebra contract used by every other module.

Thin, opinionated wrappers around numpy/scipy routines:

* full SVD with an explicit numerical-rank rule,
* Moore-Penrose pseudoinverse with the same rank rule,
* spectral (induced 2-) norm,
* eigenvalue extremes of symmetric matrices,
* finite generalized eigenvalues of a matrix pencil (QZ).

Zero-dimension ("empty") matrices are first-class values throughout the
package: the feedthrough decomposition produces empty blocks in the
degenerate rank cases, and all downstream formulas are written so that
products with empty operands collapse to correctly shaped zero matrices.
numpy already implements that algebra ((n,0) @ (0,m) -> zeros((n,m))), so
the wrappers only need to avoid calling LAPACK on empty inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericFailureError

__all__ = [
    "SvdResult",
    "default_rank_tol",
    "svd_full",
    "pinv",
    "spectral_norm",
    "sym_eig_extremes",
    "pencil_generalized_eigs",
    "as_matrix",
]

_EPS = np.finfo(float).eps


def as_matrix(M, rows=None, cols=None) -> np.ndarray:
    """Coerce input to a float64 2-D array, optionally checking its shape."""
    A = np.asarray(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={A.ndim}")
    if rows is not None and A.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {A.shape[0]}")
    if cols is not None and A.shape[1] != cols:
        raise ValueError(f"expected {cols} cols, got {A.shape[1]}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def default_rank_tol(M: np.ndarray) -> float:
    """Standard numerical-rank tolerance: max(rows, cols) * eps * sigma_max."""
    M = as_matrix(M)
    if M.size == 0:
        return _EPS
    smax = np.linalg.norm(M, 2)
    return max(M.shape) * _EPS * max(smax, 1.0) if smax == 0 else max(M.shape) * _EPS * smax


@dataclass(frozen=True)
class SvdResult:
    """Full SVD M = U @ diag(S) @ V.T with a numerical rank attached.

    U is rows x rows, V is cols x cols, S has min(rows, cols) entries in
    descending order.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    numerical_rank: int


def svd_full(M, rank_tol: float | None = None) -> SvdResult:
    """Full singular value decomposition with numerical rank.

    rank_tol defaults to max(rows, cols) * eps * sigma_max.
    """
    M = as_matrix(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return SvdResult(np.eye(rows), np.zeros(0), np.eye(cols), 0)
    try:
        U, S, Vh = np.linalg.svd(M, full_matrices=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericFailureError(f"SVD did not converge: {exc}") from exc
    tol = default_rank_tol(M) if rank_tol is None else rank_tol
    rank = int(np.count_nonzero(S > tol))
    return SvdResult(U, S, Vh.T, rank)


def pinv(M, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD with small singular values zeroed."""
    M = as_matrix(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return np.zeros((cols, rows))
    res = svd_full(M, rank_tol)
    r = res.numerical_rank
    if r == 0:
        return np.zeros((cols, rows))
    inv = np.zeros((cols, rows))
    inv += res.V[:, :r] @ np.diag(1.0 / res.S[:r]) @ res.U[:, :r].T
    return inv


def spectral_norm(M) -> float:
    """Largest singular value; 0.0 for empty matrices."""
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def sym_eig_extremes(S, sym_tol: float = 1e-9) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric matrix.

    The input must be square and symmetric to sym_tol (absolute, relative to
    its norm); it is explicitly symmetrized before the eigensolve.
    """
    S = as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got {S.shape}")
    if S.size == 0:
        raise ValueError("eigenvalues of an empty matrix are undefined")
    scale = max(np.abs(S).max(), 1.0)
    if np.abs(S - S.T).max() > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w = np.linalg.eigvalsh(0.5 * (S + S.T))
    return float(w[0]), float(w[-1])


def pencil_generalized_eigs(M0, M1) -> list[complex]:
    """Finite generalized eigenvalues lam with det(M0 - lam * M1) = 0.

    Uses the QZ-based generalized eigensolver; infinite eigenvalues (zero
    beta) are dropped.  A pencil that is singular for every lam yields
    alpha = beta = 0 pairs, which are also dropped; callers that care about
    identical singularity must test rank separately.
    """
    M0 = as_matrix(M0)
    M1 = as_matrix(M1, rows=M0.shape[0], cols=M0.shape[1])
    if M0.shape[0] != M0.shape[1]:
        raise ValueError("pencil matrices must be square")
    if M0.size == 0:
        return []
    try:
        _, _, alpha, beta, _, _ = scipy.linalg.ordqz(M0, M1, output="complex")
    except Exception as exc:
        raise NumericFailureError(f"QZ iteration failed: {exc}") from exc
    out = []
    scale = max(spectral_norm(M0), spectral_norm(M1), 1.0)
    for a, b in zip(alpha, beta):
        if abs(b) > 100 * _EPS * scale * max(abs(a), 1.0):
            out.append(complex(a / b))
    return out
