#!/usr/bin/env python3
"""Two-state tanh benchmark demo.

This system is a cautionary example: its linearized tuple has invariant
zeros outside the unit circle, so no observer of this structure can be
stable, and the synthesis programs correctly report infeasibility.  The
demo walks through the structural checks, the instability probe, and the
synthesis attempt, then shows the affine abstraction of the tanh
nonlinearity over an interval (the route one would take to replace the
nonlinearity with a linear observation plus bounded disturbance).

Run with: python3 demos/tanh_benchmark_demo.py
"""

import numpy as np

from sisobs import IntervalBox, abstract_on_box, midline_observation
from sisobs.errors import SynthesisInfeasibleError
from sisobs.harness import builtin_system
from sisobs.synthesis import (class_multiplier_blocks, fixed_gains,
                              hinf_design, instability_probe)
from sisobs.transform import (invariant_zeros, strong_detectability,
                              transform_system)


def main():
    sysm = builtin_system("tanh_benchmark", "I")
    A_lin = np.array([[-0.42, 1.0], [-0.6, 0.0]])

    print("--- structural checks ---")
    zeros = invariant_zeros(A_lin, sysm.G, sysm.C, sysm.H)
    print("invariant zeros of the linear part:",
          [complex(round(z.real, 4), round(z.imag, 4)) for z in zeros])
    print("strongly detectable:",
          strong_detectability(A_lin, sysm.G, sysm.C, sysm.H))

    T = transform_system(sysm)
    gains = fixed_gains(T, sysm.W)
    blocks = class_multiplier_blocks(sysm.class_spec, sysm.n)
    probe = instability_probe(T, gains, blocks)
    print("instability probe:", probe.verdict)

    print("--- synthesis attempt (restricted grid for speed) ---")
    try:
        hinf_design(T, gains, blocks, alpha_grid=[0.3, 0.6, 0.9],
                    eps_grid=[0.1, 1.0, 10.0])
        print("unexpectedly feasible")
    except SynthesisInfeasibleError:
        print("infeasible, as the structural analysis predicts")

    print("--- affine abstraction of tanh on [-2, 2] ---")
    box = IntervalBox([-2.0], [2.0])
    res = abstract_on_box(np.tanh, box, subdivisions=256, L_mu=1.0)
    C, D, e, eta = midline_observation(res, n=1)
    print(f"midline: mu(x) ~ {C[0, 0]:.4f} x + {e[0]:.4f}, "
          f"|residual| <= {eta:.4f}")
    pts = np.linspace(-2.0, 2.0, 2001)
    worst = np.abs(np.tanh(pts) - (C[0, 0] * pts + e[0])).max()
    print(f"checked on a dense grid: max residual {worst:.4f}")


if __name__ == "__main__":
    main()
