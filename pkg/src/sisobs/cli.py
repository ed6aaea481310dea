"""Command-line entry point.

Subcommands:
  synthesize <scenario> [--class ...] [--convergent] [--alpha-grid ...]
                        [--eps-grid ...]
  simulate   <scenario> --seed S --out DIR
  batch      <scenario> [--runs N] [--master-seed S] --out DIR
  check      <scenario>

<scenario> is a JSON file path or a builtin system name ("flex_joint",
"tanh_benchmark").  Exit codes: 0 success, 2 synthesis infeasible (no gain
certificate exists on the grid, or the design is structurally/certifiably
impossible), 3 invalid model or scenario, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness
from .errors import (CertifiedImpossibleError, DesignImpossibleError,
                     ModelInvalidError, SynthesisInfeasibleError)
from .synthesis import class_multiplier_blocks, fixed_gains, instability_probe
from .transform import strong_detectability, transform_system

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_IO = 4


def _float_list(text):
    return [float(tok) for tok in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siso",
        description="Set-valued state and unknown-input observer toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("scenario", help="scenario JSON path or builtin name")
        p.add_argument("--class", dest="class_label",
                       choices=("0", "I", "II", "III"),
                       help="override the nonlinearity class")
        p.add_argument("--convergent", action="store_true",
                       help="force theta1 < 1 (eigenvalue-corridor variant)")
        p.add_argument("--alpha-grid", type=_float_list, default=None,
                       help="explicit decay-rate grid, e.g. '0.5,0.6,0.7'")
        p.add_argument("--eps-grid", type=_float_list, default=None,
                       help="explicit scaling grid for the S-procedure terms")

    p_syn = sub.add_parser("synthesize", help="design gains, print the result")
    add_common(p_syn)

    p_sim = sub.add_parser("simulate", help="one seeded run, export trace")
    add_common(p_sim)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="output directory")

    p_bat = sub.add_parser("batch", help="many seeded runs, export summary")
    add_common(p_bat)
    p_bat.add_argument("--runs", type=int, default=None)
    p_bat.add_argument("--master-seed", type=int, default=0)
    p_bat.add_argument("--out", required=True, help="output directory")

    p_chk = sub.add_parser("check", help="structural feasibility report")
    add_common(p_chk)
    return parser


def _load(args) -> harness.Scenario:
    scenario = harness.load_scenario(args.scenario)
    if args.class_label is not None:
        doc = {"schema": harness.SCHEMA_VERSION, "system": scenario.name,
               "class": args.class_label}
        if scenario.name in ("flex_joint", "tanh_benchmark"):
            reloaded = harness.scenario_from_dict(doc)
            reloaded.horizon = scenario.horizon
            reloaded.batch = scenario.batch
            reloaded.signal_spec = scenario.signal_spec
            reloaded.synthesis = scenario.synthesis
            scenario = reloaded
        else:
            raise ModelInvalidError(
                "--class overrides are only supported for builtin systems")
    if args.convergent:
        scenario.synthesis["convergent"] = True
    if args.alpha_grid is not None:
        scenario.synthesis["alpha_grid"] = args.alpha_grid
    if args.eps_grid is not None:
        scenario.synthesis["eps_grid"] = args.eps_grid
    return scenario


def _print_design(design) -> None:
    res = design.synthesis
    out = {
        "rho_star": res.rho,
        "alpha_star": res.alpha,
        "eps1": res.eps1,
        "eps2": res.eps2,
        "theta1": design.radii.theta1,
        "theta2": design.radii.theta2,
        "beta": design.radii.beta,
        "alpha_bar": design.radii.alpha_bar,
        "eta_bar": design.radii.eta_bar,
        "L_tilde": np.asarray(res.L_tilde).tolist(),
        "P": np.asarray(res.P).tolist(),
    }
    if "branch" in res.certificates:
        out["branch"] = res.certificates["branch"]
    print(json.dumps(out, indent=2))


def cmd_synthesize(args) -> int:
    scenario = _load(args)
    design = harness.get_design(scenario)
    _print_design(design)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = _load(args)
    os.makedirs(args.out, exist_ok=True)
    trace = harness.simulate(scenario, args.seed)
    harness.export(trace, "csv", os.path.join(args.out, "trace.csv"))
    harness.export(trace, "svg", os.path.join(args.out, "trace.svg"))
    print(json.dumps({
        "steps": int(trace.k.shape[0]),
        "containment_violations": trace.containment_violations(),
        "out": args.out}))
    return EXIT_OK


def cmd_batch(args) -> int:
    scenario = _load(args)
    os.makedirs(args.out, exist_ok=True)
    summary = harness.run_batch(scenario, runs=args.runs,
                                master_seed=args.master_seed)
    harness.export(summary, "csv", os.path.join(args.out, "summary.csv"))
    harness.export(summary, "svg", args.out)
    print(json.dumps({
        "runs": summary.runs,
        "containment_violations": summary.violations,
        "out": args.out}))
    return EXIT_OK


def cmd_check(args) -> int:
    scenario = _load(args)
    sysm = scenario.system
    T = transform_system(sysm)
    report = {
        "feedthrough_rank": T.p_H,
        "rank_condition_ok": bool(T.rank_condition_ok),
    }
    spec = sysm.class_spec
    A_lin = None
    if spec.tag == "QCStar":
        A_lin = spec.A
    elif spec.tag == "LPV":
        report["lpv_constituents_strongly_detectable"] = all(
            strong_detectability(Ai, sysm.G, sysm.C, sysm.H)
            for Ai in spec.A_list)
    if A_lin is not None:
        report["strongly_detectable"] = bool(
            strong_detectability(A_lin, sysm.G, sysm.C, sysm.H))
    if T.rank_condition_ok:
        gains = fixed_gains(T, sysm.W)
        blocks = class_multiplier_blocks(spec, sysm.n)
        probe = instability_probe(T, gains, blocks)
        report["instability_probe"] = probe.verdict
        if probe.eta is not None:
            report["probe_witness_eta"] = probe.eta
    print(json.dumps(report, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"synthesize": cmd_synthesize, "simulate": cmd_simulate,
                "batch": cmd_batch, "check": cmd_check}
    try:
        return handlers[args.command](args)
    except (SynthesisInfeasibleError, DesignImpossibleError,
            CertifiedImpossibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ModelInvalidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
