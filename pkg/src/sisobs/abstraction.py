"""Affine abstraction of a nonlinear observation map over an interval box.

Given q : R^z -> R^l and an interval domain, a vertex LP finds a pair of
affine maps sandwiching q:

    min theta
    s.t.  A_lo z_s + e_lo + sigma <= q(z_s) <= A_up z_s + e_up - sigma
          (A_up - A_lo) z_s + e_up - e_lo - 2 sigma <= theta * 1

at every grid vertex z_s.  The midline of the sandwich converts a
nonlinear observation into a linear one plus a bounded disturbance of
infinity-norm theta* / 2.

The slack vector sigma extends the vertex guarantee to cell interiors:
with sigma = L_mu * r_cell * 1 (L_mu a Lipschitz constant of q over the
box, r_cell half the diagonal of one grid cell) the sandwich holds over
the whole box, not just at vertices.  sigma = 0 is allowed but yields a
vertices-only guarantee, which the result object records.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import cvxpy as cp

from .errors import AbstractionFailureError, ModelInvalidError

__all__ = ["IntervalBox", "AffineAbstraction", "abstract_on_box", "midline_observation"]


@dataclass(frozen=True)
class IntervalBox:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ModelInvalidError("box bounds must be equal-length vectors")
        if np.any(lo > hi):
            raise ModelInvalidError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def grid(self, subdivisions: int) -> np.ndarray:
        """All vertices of the uniform grid with `subdivisions` cells/axis."""
        axes = [np.linspace(lo, hi, subdivisions + 1)
                for lo, hi in zip(self.lower, self.upper)]
        return np.array([v for v in itertools.product(*axes)])

    def cell_half_diagonal(self, subdivisions: int) -> float:
        widths = (self.upper - self.lower) / subdivisions
        return 0.5 * float(np.linalg.norm(widths))


@dataclass(frozen=True)
class AffineAbstraction:
    A_upper: np.ndarray
    A_lower: np.ndarray
    e_upper: np.ndarray
    e_lower: np.ndarray
    theta_star: float
    sigma: np.ndarray
    vertices_only: bool      # True when sigma gives no interior guarantee


def abstract_on_box(q, box: IntervalBox, sigma=None, subdivisions: int = 1,
                    L_mu: float | None = None) -> AffineAbstraction:
    """Solve the vertex LP; see module docstring for the program.

    sigma may be a nonnegative vector (per output row), a scalar, or None.
    When None and L_mu is given, sigma = L_mu * r_cell * 1; when both are
    None, sigma = 0 and the result is flagged vertices-only.
    """
    if subdivisions < 1:
        raise ModelInvalidError("subdivisions must be >= 1")
    verts = box.grid(subdivisions)
    qv = np.array([np.atleast_1d(np.asarray(q(v), dtype=float)) for v in verts])
    l = qv.shape[1]
    z = box.dim

    vertices_only = False
    if sigma is None:
        if L_mu is None:
            sigma = np.zeros(l)
            vertices_only = True
        else:
            sigma = L_mu * box.cell_half_diagonal(subdivisions) * np.ones(l)
    else:
        sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (l,)).copy()
    if np.any(sigma < 0):
        raise ModelInvalidError("sigma must be nonnegative")

    A_up = cp.Variable((l, z))
    A_lo = cp.Variable((l, z))
    e_up = cp.Variable(l)
    e_lo = cp.Variable(l)
    theta = cp.Variable()
    cons = []
    for v, y in zip(verts, qv):
        cons.append(A_lo @ v + e_lo + sigma <= y)
        cons.append(y <= A_up @ v + e_up - sigma)
        cons.append((A_up - A_lo) @ v + e_up - e_lo - 2 * sigma <= theta * np.ones(l))
    prob = cp.Problem(cp.Minimize(theta), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise AbstractionFailureError(
            f"abstraction LP terminated with status {prob.status} "
            "(sigma too large for this map/box?)")
    return AffineAbstraction(
        A_upper=np.atleast_2d(A_up.value), A_lower=np.atleast_2d(A_lo.value),
        e_upper=np.atleast_1d(e_up.value), e_lower=np.atleast_1d(e_lo.value),
        theta_star=float(theta.value), sigma=sigma, vertices_only=vertices_only)


def midline_observation(abstraction: AffineAbstraction, n: int,
                        sound_norm: bool = True):
    """Midline linear observation model from a sandwich.

    Splits the abstraction columns into a state block (first n) and a known
    -input block (rest) and returns (C, D_tilde, e, eta_va) where the
    residual v^a satisfies |v^a|_inf <= theta*/2.  With sound_norm the
    radius is converted to a 2-norm bound via sqrt(l); without it the
    infinity-norm value is passed through unchanged (only sound for l = 1).
    """
    A_mid = 0.5 * (abstraction.A_upper + abstraction.A_lower)
    e = 0.5 * (abstraction.e_upper + abstraction.e_lower)
    C = A_mid[:, :n]
    D_tilde = A_mid[:, n:]
    l = A_mid.shape[0]
    eta_va = 0.5 * abstraction.theta_star
    if sound_norm:
        eta_va *= np.sqrt(l)
    return C, D_tilde, e, float(eta_va)
