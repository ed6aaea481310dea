"""System descriptions and nonlinearity-class algebra.

A plant is described in the standard form

    x_{k+1} = f_k(x_k) + B_k u_k + G d_k + W w_k
    y_k     = C x_k + D_k u_k + H d_k + v_k

with 2-norm-bounded noises (||w_k|| <= eta_w, ||v_k|| <= eta_v), a
completely unknown input d_k, and a ball of initial state estimates.

The dynamics map f is characterized by one of four certificate kinds:

* QC0       -- general quadratic constraint: [df; dx]' M [df; dx] >= gamma
               for all pairs, with a symmetric 2n x 2n multiplier M;
* Lipschitz -- ||df|| <= L_f ||dx||;
* QCStar    -- structured multiplier M = [-I, A; A', -A'A], i.e.
               ||df - A dx||^2 <= -gamma;
* LPV       -- f_k(x) = sum_i lam_{i,k} A^i x with known per-step convex
               coefficients.

The conversion helpers below move between these certificate kinds.  All of
them are falsifiable (not provable) by `qc_holds_on_samples`; the library
trusts caller-supplied certificates once they survive the falsifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ModelInvalidError
from .numerics import as_matrix, spectral_norm, svd_full, sym_eig_extremes

__all__ = [
    "FunctionClassSpec",
    "NonlinearSystem",
    "qc_from_lipschitz",
    "qcstar_from_bounded_decomposition",
    "qcstar_from_qc",
    "lipschitz_from_qcstar",
    "lipschitz_from_lpv",
    "qc_rescale",
    "qc_holds_on_samples",
    "lump_unknown_inputs",
]


@dataclass(frozen=True)
class FunctionClassSpec:
    """Tagged certificate for the dynamics map.

    tag is one of "QC0", "Lipschitz", "QCStar", "LPV".  Only the payload
    fields relevant to the tag are populated.
    """

    tag: str
    M: Optional[np.ndarray] = None          # QC0: symmetric 2n x 2n
    gamma: Optional[float] = None           # QC0 / QCStar
    L_f: Optional[float] = None             # Lipschitz
    A: Optional[np.ndarray] = None          # QCStar
    A_list: Optional[tuple] = None          # LPV constituents
    coeffs: Optional[Callable[[int], Sequence[float]]] = None  # LPV lam_{.,k}

    @staticmethod
    def qc0(M, gamma: float) -> "FunctionClassSpec":
        M = as_matrix(M)
        if M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ModelInvalidError("QC0 multiplier must be square of even size")
        if np.abs(M - M.T).max() > 1e-9 * max(np.abs(M).max(), 1.0):
            raise ModelInvalidError("QC0 multiplier must be symmetric")
        if not np.isfinite(gamma):
            raise ModelInvalidError("gamma must be finite")
        return FunctionClassSpec(tag="QC0", M=0.5 * (M + M.T), gamma=float(gamma))

    @staticmethod
    def lipschitz(L_f: float) -> "FunctionClassSpec":
        if not (L_f > 0):
            raise ModelInvalidError("Lipschitz constant must be positive")
        return FunctionClassSpec(tag="Lipschitz", L_f=float(L_f))

    @staticmethod
    def qcstar(A, gamma: float) -> "FunctionClassSpec":
        A = as_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise ModelInvalidError("QCStar matrix must be square (n x n)")
        return FunctionClassSpec(tag="QCStar", A=A, gamma=float(gamma))

    @staticmethod
    def lpv(A_list, coeffs: Callable[[int], Sequence[float]]) -> "FunctionClassSpec":
        mats = tuple(as_matrix(A) for A in A_list)
        if not mats:
            raise ModelInvalidError("LPV constituent list must be nonempty")
        n = mats[0].shape[0]
        for A in mats:
            if A.shape != (n, n):
                raise ModelInvalidError("LPV constituents must share a square shape")
        return FunctionClassSpec(tag="LPV", A_list=mats, coeffs=coeffs)

    def blocks(self):
        """QC0 multiplier blocks (M11, M12, M22) if tag == 'QC0'."""
        n = self.M.shape[0] // 2
        return self.M[:n, :n], self.M[:n, n:], self.M[n:, n:]


def _to_time_indexed(Mat, rows, cols, name):
    """Accept a constant matrix or a k -> matrix callable; return a callable."""
    if callable(Mat):
        probe = as_matrix(Mat(0), rows=rows, cols=cols)
        del probe
        return lambda k: as_matrix(Mat(k), rows=rows, cols=cols)
    const = as_matrix(Mat, rows=rows, cols=cols)
    return lambda k: const


@dataclass
class NonlinearSystem:
    """Plant in standard form; see module docstring for the equations."""

    f: Callable[[int, np.ndarray], np.ndarray]
    B: object                   # n x m, constant or k-indexed
    G: np.ndarray               # n x p
    C: np.ndarray               # l x n
    D: object                   # l x m, constant or k-indexed
    H: np.ndarray               # l x p
    W: np.ndarray               # n x n
    eta_w: float
    eta_v: float
    x0_hat: np.ndarray
    delta0_x: float
    class_spec: FunctionClassSpec
    n: int = field(init=False)
    m: int = field(init=False)
    l: int = field(init=False)
    p: int = field(init=False)

    def __post_init__(self):
        self.C = as_matrix(self.C)
        self.l, self.n = self.C.shape
        self.G = as_matrix(self.G, rows=self.n)
        self.p = self.G.shape[1]
        self.H = as_matrix(self.H, rows=self.l, cols=self.p)
        self.W = as_matrix(self.W, rows=self.n, cols=self.n)
        B0 = self.B(0) if callable(self.B) else self.B
        self.m = as_matrix(B0, rows=self.n).shape[1]
        self.B = _to_time_indexed(self.B, self.n, self.m, "B")
        self.D = _to_time_indexed(self.D, self.l, self.m, "D")
        self.x0_hat = np.asarray(self.x0_hat, dtype=float).reshape(self.n)
        self.delta0_x = float(self.delta0_x)
        self.eta_w = float(self.eta_w)
        self.eta_v = float(self.eta_v)
        if not (self.n >= self.l >= 1):
            raise ModelInvalidError(f"need n >= l >= 1, got n={self.n}, l={self.l}")
        if not (self.l >= self.p >= 0):
            raise ModelInvalidError(f"need l >= p >= 0, got l={self.l}, p={self.p}")
        if min(self.eta_w, self.eta_v, self.delta0_x) < 0:
            raise ModelInvalidError("noise bounds and initial radius must be >= 0")
        if self.p:
            stacked = np.vstack([self.G, self.H])
            if svd_full(stacked).numerical_rank != self.p:
                raise ModelInvalidError("stacked [G; H] must have full column rank p")


# ---------------------------------------------------------------------------
# class-algebra conversions
# ---------------------------------------------------------------------------

def qc_from_lipschitz(L_f: float, n: int = 1):
    """Multiplier for an L_f-Lipschitz map: M = [-I, 0; 0, L_f^2 I], gamma = 0.

    gamma = 0 is the largest admissible value; the stability synthesis
    rejects negative gamma, so the maximal choice is always returned.
    """
    if not (L_f > 0):
        raise ModelInvalidError("Lipschitz constant must be positive")
    I = np.eye(n)
    Z = np.zeros((n, n))
    M = np.block([[-I, Z], [Z, (L_f ** 2) * I]])
    return M, 0.0


def qcstar_from_bounded_decomposition(A, r: float):
    """Structured certificate for f = affine(A) + bounded residual.

    If f(x) = A x + h + g(x) with ||g|| <= r, then ||df - A dx|| <= 2r and
    the structured multiplier holds with gamma = -(2r)^2.
    """
    A = as_matrix(A)
    if r < 0:
        raise ModelInvalidError("residual bound must be >= 0")
    return A, -float((2.0 * r) ** 2)


def qcstar_from_qc(M, tol: float = 1e-9):
    """Extract a structured certificate from a general multiplier, if sound.

    Returns A = M12 when M11 + I <= 0 and M22 + M12' M12 <= 0 (both in the
    semidefinite order, checked to eigenvalue tolerance); None otherwise.
    """
    M = as_matrix(M)
    n = M.shape[0] // 2
    M11, M12, M22 = M[:n, :n], M[:n, n:], M[n:, n:]
    _, top = sym_eig_extremes(M11 + np.eye(n))
    if top > tol:
        return None
    _, top = sym_eig_extremes(0.5 * ((M22 + M12.T @ M12) + (M22 + M12.T @ M12).T))
    if top > tol:
        return None
    return M12


def lipschitz_from_qcstar(A, gamma: float):
    """Lipschitz constant sqrt(lambda_max(A'A)) implied by a structured
    certificate with gamma >= 0; None when gamma < 0 or A = 0."""
    A = as_matrix(A)
    if gamma < 0 or not A.size or spectral_norm(A) == 0.0:
        return None
    return spectral_norm(A)


def lipschitz_from_lpv(A_list) -> float:
    """Global Lipschitz constant of a convex-combination map: max_i ||A^i||."""
    mats = [as_matrix(A) for A in A_list]
    if not mats:
        raise ModelInvalidError("LPV constituent list must be nonempty")
    return max(spectral_norm(A) for A in mats)


def qc_rescale(M, gamma: float, kappa: float, nu: float):
    """Valid rescaling (M, gamma) -> (kappa * nu * M, kappa * gamma)."""
    if kappa < 0:
        raise ModelInvalidError("kappa must be >= 0")
    if nu < 1:
        raise ModelInvalidError("nu must be >= 1")
    return kappa * nu * as_matrix(M), kappa * gamma


def qc_holds_on_samples(f, M, gamma: float, pairs):
    """Falsification probe for a quadratic-constraint certificate.

    Evaluates the quadratic form on every supplied pair (x1, x2) and
    returns (ok, worst_margin) where margin = form - gamma and ok means
    margin >= -1e-9 everywhere.  Sampling can only refute, never prove.
    """
    M = as_matrix(M)
    worst = np.inf
    for x1, x2 in pairs:
        x1 = np.asarray(x1, dtype=float).ravel()
        x2 = np.asarray(x2, dtype=float).ravel()
        df = np.asarray(f(x1), dtype=float).ravel() - np.asarray(f(x2), dtype=float).ravel()
        z = np.concatenate([df, x1 - x2])
        margin = float(z @ M @ z) - gamma
        if margin < worst:
            worst = margin
    return worst >= -1e-9, worst


def lump_unknown_inputs(G_hat, H_hat, n: int | None = None, l: int | None = None):
    """Combine a process channel and a measurement channel into one input.

    G_hat (n x n_G) drives the dynamics, H_hat (l x n_H) the output; the
    lumped input d = [d_process; d_output] has p = n_G + n_H with

        G = [G_hat, 0],   H = [0, H_hat].

    Raises ModelInvalidError when the stacked [G; H] loses column rank.
    """
    G_hat = as_matrix(G_hat) if np.size(G_hat) or n is None else np.zeros((n, 0))
    H_hat = as_matrix(H_hat) if np.size(H_hat) or l is None else np.zeros((l, 0))
    n = G_hat.shape[0] if n is None else n
    l = H_hat.shape[0] if l is None else l
    if G_hat.size == 0:
        G_hat = G_hat.reshape(n, -1)
    if H_hat.size == 0:
        H_hat = H_hat.reshape(l, -1)
    nG, nH = G_hat.shape[1], H_hat.shape[1]
    G = np.hstack([G_hat, np.zeros((n, nH))])
    H = np.hstack([np.zeros((l, nG)), H_hat])
    p = nG + nH
    if p and svd_full(np.vstack([G, H])).numerical_rank != p:
        raise ModelInvalidError("lumped [G; H] is column-rank deficient")
    return G, H
