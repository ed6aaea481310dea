"""Thin conic-backend wrapper around cvxpy.

All LMI programs in the package go through `solve`, which normalizes the
solver status into three outcomes:

* "optimal"    -- a primal solution was produced;
* "infeasible" -- the solver certified primal infeasibility;
* "failed"     -- anything else (no logical conclusions may be drawn).

The solver tolerance defaults to 1e-7 and can be overridden with the
SISO_SOLVER_TOL environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import cvxpy as cp

__all__ = ["SolveOutcome", "solve", "solver_tol"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
FAILED = "failed"


def solver_tol() -> float:
    try:
        return float(os.environ.get("SISO_SOLVER_TOL", "1e-7"))
    except ValueError:
        return 1e-7


@dataclass
class SolveOutcome:
    status: str            # optimal / infeasible / failed
    objective: float | None
    raw_status: str
    inaccurate: bool


def solve(problem: cp.Problem, solver: str | None = None,
          warm_start: bool = True) -> SolveOutcome:
    tol = solver_tol()
    solver = solver or cp.CLARABEL
    kwargs = {}
    if solver == cp.CLARABEL:
        kwargs = {"tol_gap_abs": tol, "tol_gap_rel": tol,
                  "tol_feas": tol, "max_iter": 200}
    elif solver == cp.SCS:
        kwargs = {"eps": tol, "max_iters": 20000}
    try:
        problem.solve(solver=solver, warm_start=warm_start, **kwargs)
    except cp.error.SolverError:
        return SolveOutcome(FAILED, None, "solver-error", False)
    raw = problem.status
    if raw in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        return SolveOutcome(OPTIMAL, problem.value, raw, raw == cp.OPTIMAL_INACCURATE)
    if raw in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return SolveOutcome(INFEASIBLE, None, raw, raw == cp.INFEASIBLE_INACCURATE)
    return SolveOutcome(FAILED, None, str(raw), False)
