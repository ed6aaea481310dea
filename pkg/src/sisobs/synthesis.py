"""LMI/SDP gain synthesis.

Given the transformed system blocks, this module assembles and solves the
package's semidefinite programs:

* fixed_gains            -- the closed-form input-estimation gains and the
                            derived matrices Phi, Psi, R, Q, Omega;
* class_multiplier_blocks-- the (M11, M12, M22) multiplier partition per
                            nonlinearity class;
* stability_feasibility  -- quadratic-stability feasibility LMIs at a fixed
                            decay rate alpha (plus stability_search);
* hinf_design            -- min rho^2 noise-attenuation SDP over a grid of
                            line-search scalars (alpha, eps1, eps2);
* hinf_design_convergent -- same objective with extra eigenvalue corridor
                            constraints on P that force theta1 < 1;
* instability_probe      -- necessary-condition LMIs whose feasibility
                            certifies that no Lyapunov-stable observer of
                            this structure exists;
* lti_design             -- the LTI feasibility test equivalent to strong
                            detectability.

alpha is a line-search scalar because alpha*P terms make the "joint"
program bilinear; the grid plus refinement pass is the standard
convexification.  All matrix inequalities written with strict definiteness
are realized as >= delta*I with delta = 1e-6.

Programs are compiled once with cvxpy Parameters for the line-search
scalars and re-solved across the grid, which keeps a full default sweep
(21 alpha x 13 x 13 eps points plus refinement) in the minutes range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import cvxpy as cp
import numpy as np

from . import sdp
from .errors import (
    CertifiedImpossibleError,
    DesignImpossibleError,
    ModelInvalidError,
    SynthesisInfeasibleError,
)
from .numerics import as_matrix, pinv, sym_eig_extremes
from .transform import TransformedSystem, decompose_feedthrough, rank_condition

__all__ = [
    "FixedGains",
    "SynthesisResult",
    "ProbeResult",
    "fixed_gains",
    "class_multiplier_blocks",
    "stability_feasibility",
    "stability_search",
    "hinf_design",
    "hinf_design_convergent",
    "instability_probe",
    "lti_design",
    "certificate_min_eig",
]

DELTA = 1e-6          # numerical strictness for definite inequalities
TAU = 1e-6            # strictness slack of the convergent-variant branches
SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# fixed gains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedGains:
    """Closed-form gains and derived constant matrices.

    M1 inverts the feedthrough singular block, M2 left-inverts C2 G2;
    Phi annihilates the delayed input channel (Phi G2 = 0), Psi is the
    feedback of the instantaneous input estimate into the prediction.
    R and Q stack the noise-injection blocks of the error dynamics; the
    stacked noise vector is [v_k/sqrt(2); w_k; v_{k+1}/sqrt(2)], so both
    have 2l + n columns.  Omega = C2 R - Q.
    """

    M1: np.ndarray
    M2: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    Omega: np.ndarray


def fixed_gains(T: TransformedSystem, W) -> FixedGains:
    """Assemble the fixed gains; requires the rank condition rk(C2 G2) = p - p_H."""
    if not T.rank_condition_ok:
        raise DesignImpossibleError(
            "rank condition rk(C2 G2) = p - p_H fails; the delayed input "
            "channel cannot be estimated with this output map")
    W = as_matrix(W, rows=T.n, cols=T.n)
    n, l, p_H = T.n, T.l, T.p_H
    M1 = np.diag(1.0 / np.diag(T.Sigma)) if p_H else np.zeros((0, 0))
    M2 = pinv(T.C2 @ T.G2)
    Phi = np.eye(n) - T.G2 @ M2 @ T.C2
    Psi = T.G1 @ M1 @ T.C1 if p_H else np.zeros((n, n))
    R = np.hstack([
        -SQRT2 * (Phi @ T.G1 @ M1 @ T.T1),
        -(Phi @ W),
        -SQRT2 * (T.G2 @ M2 @ T.T2),
    ])
    Q = np.hstack([
        np.zeros((l - p_H, l)),
        np.zeros((l - p_H, n)),
        -SQRT2 * T.T2,
    ])
    Omega = T.C2 @ R - Q
    return FixedGains(M1=M1, M2=M2, Phi=Phi, Psi=Psi, R=R, Q=Q, Omega=Omega)


def class_multiplier_blocks(spec, n: int):
    """Multiplier partition (M11, M12, M22) used by every synthesis program.

    Class QC0 requires gamma >= 0: a negative offset certifies that no
    quadratically stable design exists, so the request is rejected before
    any solve.
    """
    I = np.eye(n)
    Z = np.zeros((n, n))
    if spec.tag == "QC0":
        if spec.gamma < 0:
            raise CertifiedImpossibleError(
                f"QC certificate has gamma = {spec.gamma} < 0: no "
                "quadratically stable design exists for this class")
        M11, M12, M22 = spec.blocks()
        if M11.shape != (n, n):
            raise ModelInvalidError("multiplier blocks do not match state size")
        return M11, M12, M22
    if spec.tag == "Lipschitz":
        return -I, Z, (spec.L_f ** 2) * I
    if spec.tag == "QCStar":
        A = as_matrix(spec.A, rows=n, cols=n)
        return -I, A, -(A.T @ A)
    if spec.tag == "LPV":
        sig = max(float(np.linalg.norm(Ai, 2)) for Ai in spec.A_list)
        return -I, Z, (sig ** 2) * I
    raise ModelInvalidError(f"unknown class tag {spec.tag!r}")


# ---------------------------------------------------------------------------
# shared LMI assembly (works on cvxpy expressions and numpy arrays alike)
# ---------------------------------------------------------------------------

def _is_expr(*objs) -> bool:
    return any(isinstance(o, cp.expressions.expression.Expression) for o in objs)


def _bmat(rows):
    if any(_is_expr(b) for row in rows for b in row):
        return cp.bmat(rows)
    return np.block(rows)


def _sym(X):
    return 0.5 * (X + X.T)


def _eq16_matrices(P, Y, Gt, Qb, Zs, kappa, alpha, C2, Phi, Psi, M11, M12, M22):
    """The five quadratic-stability block LMIs; each returned matrix must be PSD.

    Works uniformly for decision variables (cvxpy) and numeric certificates
    (numpy).  Y may be an n x 0 array when there is no delayed output
    channel, in which case the Y C2 products collapse to zero.
    """
    n = Phi.shape[0]
    PmYC = P - Y @ C2 if Y.shape[1] else P
    Y1 = PmYC @ Phi
    Y2 = -(PmYC @ Phi @ Psi)
    L1 = _bmat([[P, Y1], [Y1.T, -kappa * M11 - Qb]])
    L2 = _bmat([[P, Y2], [Y2.T, -kappa * M22 + (1 - alpha) * P - Gt]])
    L3 = _bmat([[P, Y1], [Y1.T, -kappa * M11]])
    # The coupling variable Z enters the fourth LMI as Z + kappa M12' Psi,
    # which has to be symmetric for the constraint to be well posed, so its
    # skew part is pinned: parametrize with a free symmetric Zs and recover
    # Z = Zs - kappa M12' Psi.  Leaving the skew part free would relax the
    # fifth LMI and admit spurious certificates whenever M12' Psi is not
    # symmetric (the structured-multiplier class in particular).
    Z = Zs - kappa * (M12.T @ Psi)
    L4 = _bmat([[P, Y2], [Y2.T, Zs]])
    L5 = _bmat([[Gt, Z], [Z.T, Psi.T @ Qb @ Psi]])
    return [L1, L2, L3, L4, L5]


def _eq21_matrices(P, Y, Gamma, rho2, alpha, eps1, eps2, invsum,
                   C2, Phi, Psi, R, Omega, M11, M12, M22, kappa=1.0):
    """H-infinity performance LMIs (Pi, N); each returned matrix must be PSD.

    The nonsymmetric cross term 2 R' Y Omega enters through its symmetric
    part (the quadratic form is what the proof bounds).  kappa = 1.0 is the
    paper-literal scaling of the multiplier blocks here; the kappa-scaled
    compatibility variant passes the Theorem-1 kappa variable instead.
    """
    n = Phi.shape[0]
    w = R.shape[1]
    q = C2.shape[0]
    I_w, I_n = np.eye(w), np.eye(n)
    OtO = Omega.T @ Omega
    K1 = Psi.T @ Phi.T @ C2.T @ C2 @ Phi @ Psi
    K2 = Phi.T @ C2.T @ C2 @ Phi

    if Y.shape[1]:
        cross = R.T @ Y @ Omega
        YO = Y @ Omega
        CYR = C2.T @ Y.T @ R
    else:
        cross = np.zeros((w, w))
        YO = np.zeros((n, w))
        CYR = np.zeros((n, w))

    N11 = rho2 * I_w + cross + cross.T - R.T @ P @ R \
        - Omega.T @ Gamma @ Omega - invsum * OtO
    N21 = Psi.T @ Phi.T @ (P @ R - YO - CYR)
    N31 = Phi.T @ (YO + CYR - P @ R)
    N22 = -kappa * M22 + alpha * P - eps1 * K1 - I_n
    N32 = -kappa * M12
    N33 = -kappa * M11 - eps2 * K2
    N = _bmat([[N11, N21.T, N31.T], [N21, N22, N32.T], [N31, N32, N33]])

    if q:
        # Pi >= 0 is equivalent to L_tilde' P L_tilde <= Gamma <= I (q x q);
        # the lower 2x2 block is the Schur form of Y' P^-1 Y <= Gamma.
        Pi = _bmat([[np.eye(q) - Gamma, np.zeros((q, n)), np.zeros((q, q))],
                    [np.zeros((n, q)), P, Y],
                    [np.zeros((q, q)), Y.T, Gamma]])
    else:
        Pi = P  # no delayed channel: the sandwich is vacuous
    return [Pi, N]


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class SynthesisResult:
    feasible: bool
    P: Optional[np.ndarray] = None
    Y: Optional[np.ndarray] = None
    L_tilde: Optional[np.ndarray] = None
    L: Optional[np.ndarray] = None           # = L_tilde @ U2'
    alpha: Optional[float] = None
    rho: Optional[float] = None
    kappa: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    certificates: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)


@dataclass
class ProbeResult:
    verdict: str                    # "no-stable-observer" | "inconclusive"
    eta: Optional[float] = None     # witness grid point, if any
    diagnostics: list = field(default_factory=list)


def _finish(result: SynthesisResult, T: TransformedSystem) -> SynthesisResult:
    if result.P is not None and result.Y is not None:
        result.L_tilde = np.linalg.solve(result.P, result.Y) if result.Y.shape[1] \
            else np.zeros((T.n, 0))
        result.L = result.L_tilde @ T.U2.T
    return result


def certificate_min_eig(T: TransformedSystem, gains: FixedGains, blocks,
                        result: SynthesisResult, which: str = "eq16") -> float:
    """Round-trip check: rebuild constraint matrices from a returned
    certificate and report the smallest eigenvalue across all of them."""
    M11, M12, M22 = blocks
    c = result.certificates
    P, Y = result.P, result.Y
    mats = []
    if which in ("eq16", "both"):
        mats += _eq16_matrices(P, Y, c["Gamma_tilde"], c["Q_breve"], c["Z_sym"],
                               result.kappa, result.alpha,
                               T.C2, gains.Phi, gains.Psi, M11, M12, M22)
        mats += [P, c["Gamma_tilde"], c["Q_breve"]]
    if which in ("eq21", "both"):
        mats += _eq21_matrices(P, Y, c["Gamma"], result.rho ** 2, result.alpha,
                               result.eps1, result.eps2,
                               1.0 / result.eps1 + 1.0 / result.eps2,
                               T.C2, gains.Phi, gains.Psi, gains.R, gains.Omega,
                               M11, M12, M22,
                               kappa=result.kappa if c.get("kappa_scaled") else 1.0)
    return min(sym_eig_extremes(_sym(M))[0] for M in mats)


# ---------------------------------------------------------------------------
# Theorem-1 feasibility
# ---------------------------------------------------------------------------

def _make_eq16_vars(n: int, q: int):
    P = cp.Variable((n, n), symmetric=True)
    Y = cp.Variable((n, q)) if q else np.zeros((n, 0))
    Gt = cp.Variable((n, n), symmetric=True)
    Qb = cp.Variable((n, n), symmetric=True)
    Zs = cp.Variable((n, n), symmetric=True)
    kappa = cp.Variable()
    return P, Y, Gt, Qb, Zs, kappa


def _base_constraints(P, Gt, Qb, kappa, n):
    return [P >> DELTA * np.eye(n), Gt >> 0, Qb >> 0, kappa >= DELTA]


def stability_feasibility(T: TransformedSystem, gains: FixedGains, blocks,
                          alpha: float, solver=None) -> SynthesisResult:
    """Quadratic-stability feasibility at decay rate alpha in [0, 1]."""
    if not (0.0 <= alpha <= 1.0):
        raise ModelInvalidError("alpha must lie in [0, 1]")
    M11, M12, M22 = blocks
    n, q = T.n, T.C2.shape[0]
    P, Y, Gt, Qb, Zs, kappa = _make_eq16_vars(n, q)
    cons = _base_constraints(P, Gt, Qb, kappa, n)
    cons += [M >> 0 for M in _eq16_matrices(
        P, Y, Gt, Qb, Zs, kappa, alpha, T.C2, gains.Phi, gains.Psi,
        M11, M12, M22)]
    out = sdp.solve(cp.Problem(cp.Minimize(0), cons), solver=solver)
    res = SynthesisResult(feasible=out.status == sdp.OPTIMAL, alpha=float(alpha),
                          diagnostics=[(float(alpha), out.raw_status)])
    if res.feasible:
        res.P = np.array(P.value)
        res.Y = np.array(Y.value) if q else np.zeros((n, 0))
        res.kappa = float(kappa.value)
        res.certificates = {
            "Gamma_tilde": np.array(Gt.value),
            "Q_breve": np.array(Qb.value),
            "Z_sym": np.array(Zs.value),
        }
        _finish(res, T)
    elif out.status == sdp.FAILED:
        res.certificates["solver_failed"] = True
    return res


def stability_search(T: TransformedSystem, gains: FixedGains, blocks,
                     tol: float = 1e-3, solver=None):
    """Largest feasible decay rate alpha in [0, 1] by bisection.

    Feasibility is monotone in alpha (smaller alpha relaxes the only
    alpha-dependent block), so bisection applies.  Returns (alpha, result);
    raises SynthesisInfeasibleError when even alpha = 0 is infeasible.
    """
    lo_res = stability_feasibility(T, gains, blocks, 0.0, solver=solver)
    if not lo_res.feasible:
        raise SynthesisInfeasibleError(
            "quadratic stability infeasible even at alpha = 0",
            diagnostics=lo_res.diagnostics)
    hi_res = stability_feasibility(T, gains, blocks, 1.0, solver=solver)
    if hi_res.feasible:
        return 1.0, hi_res
    lo, hi, best = 0.0, 1.0, lo_res
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = stability_feasibility(T, gains, blocks, mid, solver=solver)
        if res.feasible:
            lo, best = mid, res
        else:
            hi = mid
    return lo, best


# ---------------------------------------------------------------------------
# Theorem-2 H-infinity design
# ---------------------------------------------------------------------------

def _default_alpha_coarse():
    return np.round(np.arange(0.0, 1.0 + 1e-12, 0.05), 10)


def _default_eps_grid():
    return np.logspace(-3.0, 3.0, 13)


class _HinfProgram:
    """One compiled parametric SDP, re-solved across the line-search grid."""

    def __init__(self, T, gains, blocks, kappa_scaled=False, branch=None):
        M11, M12, M22 = blocks
        n, q = T.n, T.C2.shape[0]
        self.n, self.q = n, q
        self.P, self.Y, self.Gt, self.Qb, self.Zs, self.kappa = _make_eq16_vars(n, q)
        # Gamma lives on the delayed output channel: the performance proof
        # bounds L_tilde' P L_tilde <= Gamma <= I, a q x q sandwich.
        self.Gamma = cp.Variable((q, q), symmetric=True) if q else np.zeros((0, 0))
        self.rho2 = cp.Variable(nonneg=True)
        self.alpha_p = cp.Parameter()
        self.eps1_p = cp.Parameter(nonneg=True)
        self.eps2_p = cp.Parameter(nonneg=True)
        self.invsum_p = cp.Parameter(nonneg=True)
        cons = _base_constraints(self.P, self.Gt, self.Qb, self.kappa, n)
        if q:
            cons += [self.Gamma >> 0]
        cons += [M >> 0 for M in _eq16_matrices(
            self.P, self.Y, self.Gt, self.Qb, self.Zs, self.kappa, self.alpha_p,
            T.C2, gains.Phi, gains.Psi, M11, M12, M22)]
        cons += [M >> 0 for M in _eq21_matrices(
            self.P, self.Y, self.Gamma, self.rho2, self.alpha_p,
            self.eps1_p, self.eps2_p, self.invsum_p,
            T.C2, gains.Phi, gains.Psi, gains.R, gains.Omega,
            M11, M12, M22, kappa=self.kappa if kappa_scaled else 1.0)]
        self.kappa1 = self.kappa2 = None
        if branch is not None:
            k1, k2 = cp.Variable(), cp.Variable()
            I = np.eye(n)
            cons += [self.P >> k1 * I, k2 * I >> self.P]
            if branch == "A":
                cons += [k1 >= 1.0, k2 - k1 <= 1.0 - TAU]
            elif branch == "B":
                cons += [k2 <= 1.0, k1 >= 0.5 + TAU]
            else:
                raise ValueError(f"unknown branch {branch!r}")
            self.kappa1, self.kappa2 = k1, k2
        self.problem = cp.Problem(cp.Minimize(self.rho2), cons)
        self.kappa_scaled = kappa_scaled

    def solve_at(self, alpha, eps1, eps2, solver=None):
        self.alpha_p.value = float(alpha)
        self.eps1_p.value = float(eps1)
        self.eps2_p.value = float(eps2)
        self.invsum_p.value = 1.0 / float(eps1) + 1.0 / float(eps2)
        return sdp.solve(self.problem, solver=solver)

    def snapshot(self):
        n, q = self.n, self.q
        return {
            "P": np.array(self.P.value),
            "Y": np.array(self.Y.value) if q else np.zeros((n, 0)),
            "kappa": float(self.kappa.value),
            "Gamma_tilde": np.array(self.Gt.value),
            "Q_breve": np.array(self.Qb.value),
            "Z_sym": np.array(self.Zs.value),
            "Gamma": np.array(self.Gamma.value) if q else np.zeros((0, 0)),
            "rho2": float(self.rho2.value),
            "kappa1": float(self.kappa1.value) if self.kappa1 is not None else None,
            "kappa2": float(self.kappa2.value) if self.kappa2 is not None else None,
        }


def _sweep(prog: _HinfProgram, alphas, eps_grid, solver=None, best=None,
           diagnostics=None):
    """Lexicographically-minimal (rho2, alpha, eps1, eps2) over a grid."""
    diagnostics = diagnostics if diagnostics is not None else []
    for alpha in alphas:
        for eps1 in eps_grid:
            for eps2 in eps_grid:
                out = prog.solve_at(alpha, eps1, eps2, solver=solver)
                diagnostics.append((float(alpha), float(eps1), float(eps2),
                                    out.raw_status,
                                    out.objective if out.objective is not None else None))
                if out.status != sdp.OPTIMAL:
                    continue
                rho2 = float(out.objective)
                if best is None or rho2 < best["rho2"] - 1e-12:
                    best = prog.snapshot()
                    best.update(rho2=rho2, alpha=float(alpha),
                                eps1=float(eps1), eps2=float(eps2))
    return best, diagnostics


def _refined_alphas(center: float, lo=0.0, hi=1.0):
    pts = np.round(np.arange(center - 0.045, center + 0.045 + 1e-12, 0.005), 10)
    return [a for a in pts if lo - 1e-12 <= a <= hi + 1e-12]


def _grid_design(T, gains, blocks, alpha_grid, eps_grid, *, kappa_scaled,
                 branch, refine, solver):
    prog = _HinfProgram(T, gains, blocks, kappa_scaled=kappa_scaled, branch=branch)
    eps_grid = _default_eps_grid() if eps_grid is None else np.asarray(eps_grid, float)
    if alpha_grid is None:
        alphas = _default_alpha_coarse()
        do_refine = refine
    else:
        alphas = np.asarray(alpha_grid, dtype=float)
        do_refine = False
    if np.any((alphas < 0) | (alphas > 1)):
        raise ModelInvalidError("alpha grid must lie in [0, 1]")
    best, diags = _sweep(prog, alphas, eps_grid, solver=solver)
    if best is not None and do_refine:
        best, diags = _sweep(prog, _refined_alphas(best["alpha"]), eps_grid,
                             solver=solver, best=best, diagnostics=diags)
    return best, diags


def _result_from_best(T, best, diags, kappa_scaled) -> SynthesisResult:
    res = SynthesisResult(
        feasible=True, P=best["P"], Y=best["Y"],
        alpha=best["alpha"], rho=math.sqrt(max(best["rho2"], 0.0)),
        kappa=best["kappa"], eps1=best["eps1"], eps2=best["eps2"],
        certificates={
            "Gamma_tilde": best["Gamma_tilde"], "Q_breve": best["Q_breve"],
            "Z_sym": best["Z_sym"], "Gamma": best["Gamma"],
            "kappa_scaled": kappa_scaled,
        },
        diagnostics=diags)
    if best.get("kappa1") is not None:
        res.certificates["kappa1"] = best["kappa1"]
        res.certificates["kappa2"] = best["kappa2"]
    return _finish(res, T)


def hinf_design(T: TransformedSystem, gains: FixedGains, blocks,
                alpha_grid=None, eps_grid=None, *, kappa_scaled: bool = False,
                refine: bool = True, solver=None) -> SynthesisResult:
    """Grid-minimal H-infinity design.

    Minimizes rho^2 subject to the quadratic-stability LMIs and the
    performance LMIs at every (alpha, eps1, eps2) grid point; default grids
    are a coarse 0.05 alpha pass refined at 0.005 around the best point,
    and a 13-point logarithmic eps grid on [1e-3, 1e3].  Ties break
    lexicographically on (rho^2, alpha, eps1, eps2).
    """
    best, diags = _grid_design(T, gains, blocks, alpha_grid, eps_grid,
                               kappa_scaled=kappa_scaled, branch=None,
                               refine=refine, solver=solver)
    if best is None:
        raise SynthesisInfeasibleError(
            "H-infinity design infeasible at every grid point",
            diagnostics=diags)
    return _result_from_best(T, best, diags, kappa_scaled)


def hinf_design_convergent(T: TransformedSystem, gains: FixedGains, blocks,
                           alpha_grid=None, eps_grid=None, *,
                           kappa_scaled: bool = False, refine: bool = True,
                           solver=None) -> SynthesisResult:
    """H-infinity design with a convergence guarantee on the radii recursion.

    Solves two branches that confine the spectrum of P (branch A:
    1 <= lambda <= kappa1 + 1 - tau; branch B: 0.5 + tau <= lambda <= 1)
    and returns the smaller rho.  Either corridor forces
    theta1 = |lambda_max(P) - 1| / lambda_min(P) < 1.
    """
    results = []
    all_diags = []
    for branch in ("A", "B"):
        best, diags = _grid_design(T, gains, blocks, alpha_grid, eps_grid,
                                   kappa_scaled=kappa_scaled, branch=branch,
                                   refine=refine, solver=solver)
        all_diags.extend((branch,) + d for d in diags)
        if best is not None:
            results.append((best["rho2"], branch, best))
    if not results:
        raise SynthesisInfeasibleError(
            "no convergent design on either eigenvalue-corridor branch "
            "(an unconstrained design may still exist)", diagnostics=all_diags)
    results.sort(key=lambda t: t[0])
    rho2, branch, best = results[0]
    res = _result_from_best(T, best, all_diags, kappa_scaled)
    res.certificates["branch"] = branch
    return res


# ---------------------------------------------------------------------------
# Proposition-10 probe and LTI design
# ---------------------------------------------------------------------------

def instability_probe(T: TransformedSystem, gains: FixedGains, blocks,
                      eta_grid=None, solver=None) -> ProbeResult:
    """Necessary-condition probe: a feasible point at any eta certifies that
    no Lyapunov-stable observer of this structure exists for the class."""
    M11, M12, M22 = blocks
    n, q = T.n, T.C2.shape[0]
    C2, Phi, Psi = T.C2, gains.Phi, gains.Psi
    if eta_grid is None:
        eta_grid = np.linspace(0.05, 0.95, 19)
    eta_grid = np.asarray(eta_grid, dtype=float)
    if np.any((eta_grid <= 0) | (eta_grid >= 1)):
        raise ModelInvalidError("eta grid must lie strictly inside (0, 1)")

    Pt = cp.Variable((n, n), symmetric=True)
    Yt = cp.Variable((n, q)) if q else np.zeros((n, 0))
    Gt = cp.Variable((q, q), symmetric=True) if q else np.zeros((0, 0))
    one_minus_eta = cp.Parameter(nonneg=True)
    CtC = C2.T @ C2
    S = Pt - (C2.T @ Yt.T + Yt @ C2) if q else Pt
    P11 = Phi.T @ S @ Phi - one_minus_eta * (Phi.T @ CtC @ Phi) - M11
    P12 = -(Phi.T @ S @ Phi @ Psi) - M12
    P22 = Psi.T @ Phi.T @ S @ Phi @ Psi \
        - one_minus_eta * (Psi.T @ Phi.T @ CtC @ Phi @ Psi) - Pt - M22
    Pit = cp.bmat([[P11, P12], [P12.T, P22]])
    cons = [Pt >> DELTA * np.eye(n), Pit >> DELTA * np.eye(2 * n)]
    if q:
        Pih = cp.bmat([
            [np.eye(q) - Gt, np.zeros((q, q)), np.zeros((q, n))],
            [np.zeros((q, q)), Gt, Yt.T],
            [np.zeros((n, q)), Yt, Pt]])
        cons += [Gt >> DELTA * np.eye(q), Pih >> 0]
    prob = cp.Problem(cp.Minimize(0), cons)

    diags = []
    for eta in eta_grid:
        one_minus_eta.value = 1.0 - float(eta)
        out = sdp.solve(prob, solver=solver)
        diags.append((float(eta), out.raw_status))
        if out.status == sdp.OPTIMAL:
            return ProbeResult(verdict="no-stable-observer", eta=float(eta),
                               diagnostics=diags)
    return ProbeResult(verdict="inconclusive", diagnostics=diags)


def lti_design(A, G, C, H, solver=None) -> SynthesisResult:
    """LTI observer feasibility test, equivalent to strong detectability.

    Maximizes the margin t with [P, Lam; Lam', P] >= t I over a normalized
    delta I <= P <= I, where Lam = (A - Psi)' Phi' (P - C2' Y'); the tuple
    admits a stable observer iff the optimal margin is positive.
    """
    A = as_matrix(A)
    n = A.shape[0]
    G = as_matrix(G, rows=n)
    C = as_matrix(C, cols=n)
    H = as_matrix(H, rows=C.shape[0], cols=G.shape[1])
    p_H, Sigma, U1, U2, V1, V2 = decompose_feedthrough(H)
    T1, T2 = U1.T, U2.T
    G1, G2 = G @ V1, G @ V2
    C1, C2 = T1 @ C, T2 @ C
    if not rank_condition(C2, G2, G.shape[1], p_H):
        raise DesignImpossibleError("rank condition rk(C2 G2) = p - p_H fails")
    M1 = np.diag(1.0 / np.diag(Sigma)) if p_H else np.zeros((0, 0))
    M2 = pinv(C2 @ G2)
    Phi = np.eye(n) - G2 @ M2 @ C2
    Psi = G1 @ M1 @ C1 if p_H else np.zeros((n, n))
    q = C2.shape[0]

    P = cp.Variable((n, n), symmetric=True)
    Y = cp.Variable((n, q)) if q else np.zeros((n, 0))
    t = cp.Variable()
    Lam = (A - Psi).T @ Phi.T @ (P - (C2.T @ Y.T if q else 0))
    cons = [P >> DELTA * np.eye(n), np.eye(n) >> P,
            cp.bmat([[P, Lam], [Lam.T, P]]) >> t * np.eye(2 * n)]
    out = sdp.solve(cp.Problem(cp.Maximize(t), cons), solver=solver)
    feasible = out.status == sdp.OPTIMAL and float(t.value) > DELTA
    res = SynthesisResult(feasible=feasible,
                          diagnostics=[("margin", out.raw_status,
                                        float(t.value) if t.value is not None else None)])
    if out.status == sdp.OPTIMAL:
        res.P = np.array(P.value)
        res.Y = np.array(Y.value) if q else np.zeros((n, 0))
        res.L_tilde = np.linalg.solve(res.P, res.Y) if q else np.zeros((n, 0))
        res.L = res.L_tilde @ U2.T
        res.certificates = {"margin": float(t.value), "M1": M1, "M2": M2,
                            "Phi": Phi, "Psi": Psi}
    return res
