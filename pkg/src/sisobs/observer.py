"""Online recursion of the simultaneous input and state observer.

Each step consumes one measurement y_k and produces two hyperballs: a ball
guaranteed to contain the state x_k and a ball guaranteed to contain the
unknown input d_{k-1} (the input estimate is inherently one step delayed,
since the delayed channel d2 only becomes observable through the next
measurement).

The recursion, with z1 = T1 y and z2 = T2 y:

    d1_hat[k-1] = M1 (z1[k-1] - C1 xhat[k-1] - D1(k-1) u[k-1])
    xpred       = f[k-1](xhat[k-1]) + B[k-1] u[k-1] + G1 d1_hat[k-1]
    d2_hat[k-1] = M2 (z2[k] - C2 xpred - D2(k) u[k])
    d_hat[k-1]  = V1 d1_hat[k-1] + V2 d2_hat[k-1]
    xstar       = xpred + G2 d2_hat[k-1]
    xhat[k]     = xstar + L_tilde (z2[k] - C2 xstar - D2(k) u[k])

Radii are tracked by two scalar accumulators, updated in O(1) per step:
s1 <- theta1 * s1 + c (squared certificate branch) and
r2 <- theta2 * r2 + eta_bar (norm branch); the reported state radius is
min(sqrt(s1), r2).  Divergent branches saturate to +inf and are reported
as such, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import RadiiParams, class_radii_params, theta1_of
from .errors import DesignImpossibleError
from .numerics import sym_eig_extremes
from .synthesis import (FixedGains, SynthesisResult, class_multiplier_blocks,
                        fixed_gains, hinf_design, hinf_design_convergent)
from .transform import TransformedSystem, transform_system

__all__ = [
    "BallEstimate",
    "ObserverState",
    "ObserverDesign",
    "design_observer",
    "initialize",
    "step",
    "error_dynamics_matrices",
]


@dataclass(frozen=True)
class BallEstimate:
    """A 2-norm ball: {x : ||x - center|| <= radius}.  radius may be +inf."""
    center: np.ndarray
    radius: float

    def contains(self, point, slack: float = 0.0) -> bool:
        point = np.asarray(point, dtype=float).ravel()
        return float(np.linalg.norm(point - self.center)) <= self.radius + slack

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class ObserverState:
    k: int                      # time of the current state estimate
    x_hat: np.ndarray           # xhat[k|k]
    d1_hat: np.ndarray          # instantaneous-channel input estimate at k
    u_prev: np.ndarray          # u[k], needed for the next prediction
    s1: float                   # squared certificate-branch radius at k
    r2: float                   # norm-branch radius at k
    delta_x: float              # min(sqrt(s1), r2), the reported radius


@dataclass(frozen=True)
class ObserverDesign:
    """Everything the recursion needs, bundled by `design_observer`."""
    system: object              # NonlinearSystem
    T: TransformedSystem
    gains: FixedGains
    synthesis: SynthesisResult
    radii: RadiiParams

    @property
    def L_tilde(self) -> np.ndarray:
        return self.synthesis.L_tilde


def design_observer(sys, *, convergent: bool = False,
                    kappa_scaled: bool = False, sqrt_variant: bool = False,
                    lipschitz_surrogate: float | None = None,
                    alpha_grid=None, eps_grid=None,
                    solver=None) -> ObserverDesign:
    """Run the full pipeline: transform, fixed gains, gain synthesis, radii.

    Raises DesignImpossibleError when the structural rank condition fails
    and SynthesisInfeasibleError when no gain certificate exists on the
    search grid.
    """
    T = transform_system(sys)
    gains = fixed_gains(T, sys.W)
    blocks = class_multiplier_blocks(sys.class_spec, sys.n)
    designer = hinf_design_convergent if convergent else hinf_design
    result = designer(T, gains, blocks, alpha_grid=alpha_grid,
                      eps_grid=eps_grid, kappa_scaled=kappa_scaled,
                      solver=solver)
    lam_min, _ = sym_eig_extremes(result.P)
    radii = class_radii_params(
        sys.class_spec, gains, result.L_tilde, T, sys.W,
        theta1=theta1_of(result.P), rho=result.rho, lambda_min_P=lam_min,
        eta_w=sys.eta_w, eta_v=sys.eta_v, sqrt_variant=sqrt_variant,
        lipschitz_surrogate=lipschitz_surrogate)
    return ObserverDesign(system=sys, T=T, gains=gains,
                          synthesis=result, radii=radii)


def _d1_update(design: ObserverDesign, k: int, z1_k, x_hat, u_k):
    T = design.T
    if T.p_H == 0:
        return np.zeros(0)
    return design.gains.M1 @ (z1_k - T.C1 @ x_hat - T.D1(k) @ u_k)


def initialize(design: ObserverDesign, x0_hat=None, delta0_x: float | None = None,
               z1_0=None, u_0=None) -> ObserverState:
    """State at k = 0 from the initial guess ball and the first measurement.

    z1_0 = T1 y_0 is only needed when the feedthrough has rank > 0 (the
    instantaneous channel exists); it may be omitted otherwise.  Defaults
    for x0_hat / delta0_x come from the system description.
    """
    sysm = design.system
    x0 = np.asarray(sysm.x0_hat if x0_hat is None else x0_hat, dtype=float).ravel()
    d0 = float(sysm.delta0_x if delta0_x is None else delta0_x)
    u0 = np.zeros(sysm.m) if u_0 is None else np.asarray(u_0, dtype=float).ravel()
    if design.T.p_H > 0:
        if z1_0 is None:
            raise DesignImpossibleError(
                "feedthrough rank > 0: the first transformed measurement "
                "z1_0 is required to initialize the instantaneous channel")
        d1 = _d1_update(design, 0, np.asarray(z1_0, dtype=float).ravel(), x0, u0)
    else:
        d1 = np.zeros(0)
    return ObserverState(k=0, x_hat=x0, d1_hat=d1, u_prev=u0,
                         s1=d0 ** 2, r2=d0, delta_x=d0)


def _advance_radii(design: ObserverDesign, state: ObserverState):
    r = design.radii
    s1 = r.theta1 * state.s1 + r.noise_drive
    r2 = r.theta2 * state.r2 + r.eta_bar if math.isfinite(r.theta2) else math.inf
    delta = min(math.sqrt(s1) if math.isfinite(s1) else math.inf, r2)
    return s1, r2, delta


def step(design: ObserverDesign, state: ObserverState, y_k, u_k=None):
    """One observer update.

    Returns (state', X_ball, D_ball_prev): the new internal state, the ball
    containing x at the new time k, and the ball containing the unknown
    input at time k - 1.
    """
    sysm = design.system
    T = design.T
    g = design.gains
    k = state.k + 1
    y_k = np.asarray(y_k, dtype=float).ravel()
    u_k = np.zeros(sysm.m) if u_k is None else np.asarray(u_k, dtype=float).ravel()
    z1_k = T.T1 @ y_k
    z2_k = T.T2 @ y_k

    x_pred = sysm.f(k - 1, state.x_hat) + sysm.B(k - 1) @ state.u_prev \
        + G1d(T, state.d1_hat)
    d2_prev = g.M2 @ (z2_k - T.C2 @ x_pred - T.D2(k) @ u_k)
    d_prev = T.V1 @ state.d1_hat + T.V2 @ d2_prev
    x_star = x_pred + T.G2 @ d2_prev
    innov = z2_k - T.C2 @ x_star - T.D2(k) @ u_k
    x_hat = x_star + (design.L_tilde @ innov if innov.shape[0] else 0.0)
    d1_k = _d1_update(design, k, z1_k, x_hat, u_k)

    s1, r2, delta_x = _advance_radii(design, state)
    delta_d = design.radii.beta * state.delta_x + design.radii.alpha_bar
    new_state = ObserverState(k=k, x_hat=x_hat, d1_hat=d1_k, u_prev=u_k,
                              s1=s1, r2=r2, delta_x=delta_x)
    return (new_state,
            BallEstimate(center=x_hat, radius=delta_x),
            BallEstimate(center=d_prev, radius=delta_d))


def G1d(T: TransformedSystem, d1: np.ndarray) -> np.ndarray:
    """G1 @ d1, with the empty instantaneous channel mapping to zero."""
    if d1.shape[0] == 0:
        return np.zeros(T.n)
    return T.G1 @ d1


def error_dynamics_matrices(design: ObserverDesign):
    """Pieces of the closed-loop error recursion.

    Returns (A_err_map, W_err) where the state-estimation error obeys

        e[k+1] = A_err_map(delta_f, e[k]) + W_err @ wbar[k],

    A_err_map(delta_f, e) = (I - L_tilde C2) Phi (delta_f - Psi e) with
    delta_f = f(x) - f(x_hat), and wbar = [v/sqrt2; w; v+/sqrt2] stacks the
    scaled noises.  W_err = (I - L_tilde C2) R + L_tilde Q.
    """
    T = design.T
    g = design.gains
    n = T.n
    Lt = design.L_tilde
    ILC = np.eye(n) - (Lt @ T.C2 if Lt.shape[1] else np.zeros((n, n)))
    ILPhi = ILC @ g.Phi
    W_err = ILC @ g.R + (Lt @ g.Q if Lt.shape[1] else np.zeros_like(g.R))

    def A_err_map(delta_f, e):
        delta_f = np.asarray(delta_f, dtype=float).ravel()
        e = np.asarray(e, dtype=float).ravel()
        return ILPhi @ (delta_f - g.Psi @ e)

    return A_err_map, W_err
