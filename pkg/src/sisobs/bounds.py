"""Closed-form radii machinery for the hyperball estimates.

Two independent upper-bound branches exist for the state-estimate radius:

    branch 1:  delta_{k,1}^2 = delta0^2 * theta1^k + c * sum_{i<k} theta1^i
               with c = rho^2 / lambda_min(P) * (eta_w^2 + eta_v^2) and
               theta1 = |lambda_max(P) - 1| / lambda_min(P)  (certificate
               based);
    branch 2:  delta_{k,2}   = delta0 * theta2^k + eta_bar * sum theta2^i
               (norm based, class dependent theta2);

the reported radius is their minimum, and the input-estimate radius is the
affine image delta^d_{k-1} = beta * delta^x_{k-1} + alpha_bar.

Divergent sequences (theta >= 1) are legal outputs and are never clamped;
the observer's true errors stay bounded regardless, the closed-form bounds
are simply conservative.  Geometric sums use the closed form with the
theta = 1 limit handled exactly as k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputRadiusUnavailableError, ModelInvalidError
from .numerics import as_matrix, spectral_norm, sym_eig_extremes

__all__ = [
    "RadiiParams",
    "theta1_of",
    "class_radii_params",
    "radii_sequences",
    "steady_state",
    "lpv_convergence_check",
    "geometric_sum",
]


@dataclass(frozen=True)
class RadiiParams:
    theta1: float
    theta2: float
    beta: float
    alpha_bar: float
    eta_bar: float
    rho: float
    lambda_min_P: float
    eta_w: float
    eta_v: float

    def __post_init__(self):
        vals = [self.theta1, self.beta, self.alpha_bar, self.eta_bar,
                self.rho, self.eta_w, self.eta_v]
        if any(v < 0 or not np.isfinite(v) for v in vals):
            raise ModelInvalidError("radii parameters must be finite and >= 0")
        if self.theta2 < 0:
            raise ModelInvalidError("theta2 must be >= 0")
        if not (self.lambda_min_P > 0):
            raise ModelInvalidError("lambda_min(P) must be positive")

    @property
    def noise_drive(self) -> float:
        """c = rho^2 / lambda_min(P) * (eta_w^2 + eta_v^2) of branch 1."""
        return self.rho ** 2 / self.lambda_min_P * (self.eta_w ** 2 + self.eta_v ** 2)


def theta1_of(P) -> float:
    """Certificate contraction factor |lambda_max(P) - 1| / lambda_min(P)."""
    P = as_matrix(P)
    lo, hi = sym_eig_extremes(P)
    if lo <= 0:
        raise ModelInvalidError("P must be positive definite")
    return abs(hi - 1.0) / lo


def class_radii_params(spec, gains, L_tilde, T, W, *, theta1: float,
                       rho: float, lambda_min_P: float,
                       eta_w: float, eta_v: float,
                       sqrt_variant: bool = False,
                       lipschitz_surrogate: float | None = None) -> RadiiParams:
    """Assemble (theta2, beta, alpha_bar, eta_bar) for a synthesized design.

    Class-dependent factor: the Lipschitz constant for class I, the largest
    eigenvalue of A'A for class II (paper-literal; sqrt_variant uses its
    square root, the implied Lipschitz constant, which is tighter), and a
    per-constituent norm maximum for LPV.  A general-QC spec has no norm
    branch; theta2 = +inf so only the certificate branch applies, and the
    input radius needs a Lipschitz surrogate (or embedded structured data)
    to be well defined.
    """
    L_tilde = as_matrix(L_tilde, rows=T.n)
    W = as_matrix(W, rows=T.n, cols=T.n)
    IL = np.eye(T.n) - (L_tilde @ T.C2 if L_tilde.shape[1] else np.zeros((T.n, T.n)))
    ILPhi = IL @ gains.Phi
    V1M1C1 = T.V1 @ gains.M1 @ T.C1
    V2M2C2 = T.V2 @ gains.M2 @ T.C2
    Psi = gains.Psi

    alpha_bar = spectral_norm(V2M2C2) * eta_w + (
        spectral_norm((T.V2 @ gains.M2 @ T.C2 @ T.G1 - T.V1) @ gains.M1 @ T.T1)
        + spectral_norm(T.V2 @ gains.M2 @ T.T2)) * eta_v
    Re = -(Psi @ gains.Phi @ T.G1 @ gains.M1 @ T.T1
           + Psi @ T.G2 @ gains.M2 @ T.T2
           + (L_tilde @ T.T2 if L_tilde.shape[1] else np.zeros((T.n, T.l))))
    eta_bar = spectral_norm(Re) * eta_v + spectral_norm(Psi @ gains.Phi @ W) * eta_w

    tag = spec.tag
    if tag == "Lipschitz" or (tag == "QC0" and lipschitz_surrogate is not None):
        L_f = spec.L_f if tag == "Lipschitz" else float(lipschitz_surrogate)
        theta2 = (L_f + spectral_norm(Psi)) * spectral_norm(ILPhi)
        beta = spectral_norm(V1M1C1 - V2M2C2 @ Psi) + L_f * spectral_norm(V2M2C2)
        if tag == "QC0":
            theta2 = math.inf
    elif tag == "QCStar" or (tag == "QC0" and spec.M is not None
                             and _qc0_structured(spec) is not None):
        A = spec.A if tag == "QCStar" else _qc0_structured(spec)
        lam = spectral_norm(A) ** 2
        factor = math.sqrt(lam) if sqrt_variant else lam
        theta2 = (factor + spectral_norm(Psi)) * spectral_norm(ILPhi)
        beta = spectral_norm(V1M1C1 - V2M2C2 @ Psi) + factor * spectral_norm(V2M2C2)
        if tag == "QC0":
            theta2 = math.inf
    elif tag == "LPV":
        Aes = [ILPhi @ (np.asarray(Ai) - Psi) for Ai in spec.A_list]
        theta2 = max(spectral_norm(Ae) for Ae in Aes)
        beta = max(spectral_norm(V1M1C1 + V2M2C2 @ Ae) for Ae in Aes)
    else:
        raise InputRadiusUnavailableError(
            "general-QC class without a Lipschitz surrogate or structured "
            "multiplier: no input-radius formula is available")
    return RadiiParams(
        theta1=theta1, theta2=theta2, beta=beta, alpha_bar=alpha_bar,
        eta_bar=eta_bar, rho=rho, lambda_min_P=lambda_min_P,
        eta_w=eta_w, eta_v=eta_v)


def _qc0_structured(spec):
    from .sysmodel import qcstar_from_qc
    try:
        return qcstar_from_qc(spec.M)
    except Exception:
        return None


def geometric_sum(theta: float, k: int) -> float:
    """sum_{i=1..k} theta^(i-1), with the theta = 1 limit equal to k.

    May overflow to +inf for theta > 1 at large k; that is the caller's
    legal divergent output.
    """
    if k <= 0:
        return 0.0
    if theta == 1.0 or abs(theta - 1.0) < 1e-13:
        return float(k)
    try:
        num = theta ** k - 1.0
    except OverflowError:
        return math.inf
    if math.isinf(num):
        return math.inf
    return (num if theta > 1.0 else -(num)) / (theta - 1.0 if theta > 1.0 else 1.0 - theta)


def _pow(theta: float, k: int) -> float:
    try:
        v = theta ** k
    except OverflowError:
        return math.inf
    return v


def radii_sequences(params: RadiiParams, delta0_x: float, K: int):
    """Closed-form radii over a horizon.

    Returns (delta_x, delta_d) with delta_x[k] for k = 0..K and delta_d[k]
    the input radius at step k (available for k = 0..K-1, one-step delayed).
    """
    if K < 1:
        raise ModelInvalidError("horizon must be >= 1")
    if delta0_x < 0:
        raise ModelInvalidError("initial radius must be >= 0")
    th1, th2 = params.theta1, params.theta2
    c = params.noise_drive
    delta_x = np.empty(K + 1)
    delta_x[0] = delta0_x
    for k in range(1, K + 1):
        b1sq = delta0_x ** 2 * _pow(th1, k) + c * geometric_sum(th1, k)
        b1 = math.sqrt(b1sq) if np.isfinite(b1sq) else math.inf
        b2 = delta0_x * _pow(th2, k) + params.eta_bar * geometric_sum(th2, k) \
            if np.isfinite(th2) else math.inf
        delta_x[k] = min(b1, b2)
    delta_d = params.beta * delta_x[:K] + params.alpha_bar
    return delta_x, delta_d


def steady_state(params: RadiiParams) -> Optional[tuple[float, float]]:
    """Limits of the radii sequences; None when both branches diverge."""
    th1, th2 = params.theta1, params.theta2
    candidates = []
    if th1 < 1.0:
        candidates.append(math.sqrt(params.noise_drive / (1.0 - th1)))
    if th2 < 1.0:
        candidates.append(params.eta_bar / (1.0 - th2))
    if not candidates:
        return None
    dx = min(candidates)
    return dx, params.beta * dx + params.alpha_bar


def lpv_convergence_check(A_e_list) -> bool:
    """True iff every closed-loop constituent has spectral norm < 1."""
    mats = [as_matrix(A) for A in A_e_list]
    if not mats:
        raise ModelInvalidError("constituent list must be nonempty")
    return all(spectral_norm(A) < 1.0 for A in mats)
