"""Similarity transformation and structural tests.

The SVD of the feedthrough H = [U1 U2] [Sigma 0; 0 0] [V1'; V2'] splits the
unknown input into an instantly estimable channel d1 = V1' d (rank p_H of H)
and a one-step-delayed channel d2 = V2' d, and splits the output into
z1 = U1' y and z2 = U2' y.  All downstream gain formulas are written in
these transformed blocks.

Structural tests:
* rank_condition  -- rk(C2 G2) = p - p_H, the hypothesis of the fixed-gain
  construction;
* invariant_zeros / strong_detectability -- rank drops of the Rosenbrock
  pencil [zI - A, -G; C, H]; strong detectability (all zeros strictly inside
  the unit circle, full normal rank) is equivalent to the existence of a
  stable unknown-input observer in the LTI case;
* lpv_strong_detectability_necessary -- every LPV constituent must be
  strongly detectable (necessary condition only).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ModelInvalidError
from .numerics import as_matrix, pencil_generalized_eigs, svd_full

__all__ = [
    "TransformedSystem",
    "decompose_feedthrough",
    "transform_system",
    "rank_condition",
    "invariant_zeros",
    "strong_detectability",
    "lpv_strong_detectability_necessary",
]

ZERO_TOL = 1e-8  # a zero is "stable" iff |z| < 1 - ZERO_TOL


@dataclass(frozen=True)
class TransformedSystem:
    p_H: int
    Sigma: np.ndarray      # p_H x p_H, positive diagonal
    U1: np.ndarray         # l x p_H
    U2: np.ndarray         # l x (l - p_H)
    V1: np.ndarray         # p x p_H
    V2: np.ndarray         # p x (p - p_H)
    T1: np.ndarray         # = U1'
    T2: np.ndarray         # = U2'
    G1: np.ndarray         # n x p_H
    G2: np.ndarray         # n x (p - p_H)
    C1: np.ndarray         # p_H x n
    C2: np.ndarray         # (l - p_H) x n
    D1: Callable[[int], np.ndarray]
    D2: Callable[[int], np.ndarray]
    n: int
    l: int
    p: int
    rank_condition_ok: bool


def decompose_feedthrough(H, rank_tol: float | None = None):
    """SVD-split of the feedthrough matrix.

    Returns (p_H, Sigma, U1, U2, V1, V2).  When p_H = 0 the orthogonal
    completions are arbitrary; identity is chosen for determinism.  When
    p_H = p = l, U2 and V2 are empty (l x 0 / p x 0).
    """
    H = as_matrix(H)
    l, p = H.shape
    res = svd_full(H, rank_tol)
    p_H = res.numerical_rank
    if p_H == 0:
        return 0, np.zeros((0, 0)), np.zeros((l, 0)), np.eye(l), np.zeros((p, 0)), np.eye(p)
    Sigma = np.diag(res.S[:p_H])
    U1, U2 = res.U[:, :p_H], res.U[:, p_H:]
    V1, V2 = res.V[:, :p_H], res.V[:, p_H:]
    return p_H, Sigma, U1, U2, V1, V2


def rank_condition(C2, G2, p: int, p_H: int, rank_tol: float | None = None) -> bool:
    """True iff rk(C2 G2) = p - p_H (vacuously true when p = p_H)."""
    C2 = as_matrix(C2)
    G2 = as_matrix(G2)
    if p == p_H:
        return True
    return svd_full(C2 @ G2, rank_tol).numerical_rank == p - p_H


def transform_system(sys, rank_tol: float | None = None) -> TransformedSystem:
    """Assemble every transformed block of a NonlinearSystem."""
    p_H, Sigma, U1, U2, V1, V2 = decompose_feedthrough(sys.H, rank_tol)
    T1, T2 = U1.T, U2.T
    G1, G2 = sys.G @ V1, sys.G @ V2
    C1, C2 = T1 @ sys.C, T2 @ sys.C
    D = sys.D
    D1 = lambda k, _T1=T1, _D=D: _T1 @ _D(k)
    D2 = lambda k, _T2=T2, _D=D: _T2 @ _D(k)
    ok = rank_condition(C2, G2, sys.p, p_H, rank_tol)
    return TransformedSystem(
        p_H=p_H, Sigma=Sigma, U1=U1, U2=U2, V1=V1, V2=V2,
        T1=T1, T2=T2, G1=G1, G2=G2, C1=C1, C2=C2, D1=D1, D2=D2,
        n=sys.n, l=sys.l, p=sys.p, rank_condition_ok=ok,
    )


def _rosenbrock(A, G, C, H, z: complex) -> np.ndarray:
    n = A.shape[0]
    top = np.hstack([z * np.eye(n) - A, -G])
    bot = np.hstack([C, H])
    return np.vstack([top, bot]).astype(complex)


def _numrank(M: np.ndarray, tol_scale: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    tol = max(M.shape) * np.finfo(float).eps * max(s[0], tol_scale)
    return int(np.count_nonzero(s > tol))


def invariant_zeros(A, G, C, H):
    """Finite z where the Rosenbrock pencil [zI - A, -G; C, H] loses rank.

    For l = p the pencil is square and the zeros are the finite generalized
    eigenvalues of ([A, G; C, H], diag(I, 0)).  For l > p the pencil is
    tall; every rank-drop point must be a generalized eigenvalue of every
    square row selection, so candidates are collected from the square
    sub-pencils and confirmed by a numerical rank test on the full pencil.
    """
    A = as_matrix(A)
    G = as_matrix(G, rows=A.shape[0])
    C = as_matrix(C, cols=A.shape[1])
    H = as_matrix(H, rows=C.shape[0], cols=G.shape[1])
    n, p = G.shape
    l = C.shape[0]
    scale = max(np.abs(A).max(initial=0), np.abs(G).max(initial=0),
                np.abs(C).max(initial=0), np.abs(H).max(initial=0), 1.0)

    # detect an identically rank-deficient pencil at random probe points
    rng = np.random.default_rng(0)
    full = n + p
    probes = [complex(c[0], c[1]) for c in rng.standard_normal((4, 2)) * 2.0]
    if all(_numrank(_rosenbrock(A, G, C, H, z), scale) < full for z in probes):
        raise ModelInvalidError("Rosenbrock pencil is identically rank-deficient")

    def square_pencil_eigs(rows):
        M0 = np.vstack([np.hstack([A, G]), np.hstack([C[rows], H[rows]])])
        M1 = np.zeros_like(M0)
        M1[:n, :n] = np.eye(n)
        return pencil_generalized_eigs(M0, M1)

    if l == p:
        return square_pencil_eigs(list(range(l)))

    candidates = []
    for rows in itertools.combinations(range(l), p):
        try:
            candidates.extend(square_pencil_eigs(list(rows)))
        except Exception:
            continue
    zeros = []
    for z in candidates:
        if any(abs(z - z0) <= 1e-7 * max(1.0, abs(z)) for z0 in zeros):
            continue
        if _numrank(_rosenbrock(A, G, C, H, z), scale) < full:
            zeros.append(z)
    return zeros


def strong_detectability(A, G, C, H) -> bool:
    """True iff the pencil has full normal rank and only stable zeros.

    A numerical test: confirmed invariant zeros must satisfy
    |z| < 1 - ZERO_TOL, and the rank is additionally sampled at 720 points
    of the unit circle to catch drops missed by the candidate search.
    """
    A = as_matrix(A)
    G = as_matrix(G, rows=A.shape[0])
    C = as_matrix(C, cols=A.shape[1])
    H = as_matrix(H, rows=C.shape[0], cols=G.shape[1])
    n, p = G.shape
    scale = max(np.abs(A).max(initial=0), np.abs(G).max(initial=0),
                np.abs(C).max(initial=0), np.abs(H).max(initial=0), 1.0)
    try:
        zeros = invariant_zeros(A, G, C, H)
    except ModelInvalidError:
        return False
    if any(abs(z) >= 1 - ZERO_TOL for z in zeros):
        return False
    for theta in np.linspace(0.0, 2 * np.pi, 720, endpoint=False):
        z = np.exp(1j * theta)
        if _numrank(_rosenbrock(A, G, C, H, z), scale) < n + p:
            return False
    return True


def lpv_strong_detectability_necessary(A_list, G, C, H) -> bool:
    """Necessary condition for LPV designs: every constituent tuple
    (A^i, G, C, H) must itself be strongly detectable."""
    mats = list(A_list)
    if not mats:
        raise ModelInvalidError("LPV constituent list must be nonempty")
    return all(strong_detectability(Ai, G, C, H) for Ai in mats)
