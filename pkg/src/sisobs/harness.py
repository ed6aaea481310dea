"""Scenario-driven simulation harness.

A scenario is a JSON document (versioned "schema" field, see
`SCHEMA_VERSION`) naming a system, a horizon, an unknown-input signal, a
noise/initialization policy, and synthesis options.  Two builtin systems
are available by name:

* "flex_joint"      -- 4-state single-link manipulator with a flexible
                       joint, sinusoidal nonlinearity, one unknown input
                       entering both dynamics and measurement;
* "tanh_benchmark"  -- 2-state system with a tanh nonlinearity and an
                       unknown input in the dynamics only (no feedthrough).

`simulate` rolls the true plant and the observer side by side and records
a Trace; `run_batch` aggregates many seeded runs into per-step order
statistics plus a containment-violation count.  Exports are CSV with
17-significant-digit rendering (lossless round-trip for doubles) and
static SVG plots.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ModelInvalidError
from .observer import ObserverDesign, design_observer, initialize, step
from .sysmodel import FunctionClassSpec, NonlinearSystem, qc_from_lipschitz

__all__ = [
    "SCHEMA_VERSION",
    "Scenario",
    "Trace",
    "BatchSummary",
    "load_scenario",
    "builtin_system",
    "sample_bounded_noise",
    "make_input_signal",
    "simulate",
    "run_batch",
    "export",
]

SCHEMA_VERSION = "sisobs-scenario/1"
CLASS_LABELS = ("0", "I", "II", "III")


# ---------------------------------------------------------------------------
# builtin systems
# ---------------------------------------------------------------------------

def _flex_joint(class_label: str, x0_hat, delta0_x) -> NonlinearSystem:
    Ts = 0.01
    A = np.array([
        [1.0, Ts, 0.0, 0.0],
        [-48.6 * Ts, 1.0 - 1.25 * Ts, 48.6 * Ts, 0.0],
        [0.0, 0.0, 1.0, Ts],
        [19.5 * Ts, 0.0, -19.5 * Ts, 1.0]])

    def f(k, x):
        return A @ x + np.array([0.0, 2.16 * Ts, 0.0, -3.33 * Ts * math.sin(x[2])])

    if class_label == "I":
        spec = FunctionClassSpec.lipschitz(3.33 * Ts)
    elif class_label == "II":
        spec = FunctionClassSpec.qcstar(A, 0.0)
    elif class_label == "0":
        M, gamma = qc_from_lipschitz(3.333 * Ts, n=4)
        spec = FunctionClassSpec.qc0(M, gamma)
    else:
        raise ModelInvalidError(
            "scenario field 'class': flex_joint supports classes 0, I, II")
    return NonlinearSystem(
        f=f, B=np.zeros((4, 1)), G=Ts * np.array([[5.0], [5.0], [2.0], [1.0]]),
        C=np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]]), D=np.zeros((2, 1)),
        H=Ts * np.array([[1.1], [2.0]]), W=np.eye(4),
        eta_w=0.1, eta_v=0.1,
        x0_hat=np.zeros(4) if x0_hat is None else x0_hat,
        delta0_x=0.5 if delta0_x is None else delta0_x,
        class_spec=spec)


def _tanh_benchmark(class_label: str, x0_hat, delta0_x) -> NonlinearSystem:
    def f(k, x):
        return np.array([-0.42 * x[0] + x[1],
                         -0.6 * x[0] - 1.25 * math.tanh(x[0])])

    if class_label == "I":
        spec = FunctionClassSpec.lipschitz(1.1171)
    elif class_label == "0":
        M, gamma = qc_from_lipschitz(1.1171, n=2)
        spec = FunctionClassSpec.qc0(M, gamma)
    else:
        raise ModelInvalidError(
            "scenario field 'class': tanh_benchmark supports classes 0, I")
    return NonlinearSystem(
        f=f, B=np.zeros((2, 1)), G=np.array([[1.0], [-0.65]]),
        C=np.array([[0.0, 1.0]]), D=np.zeros((1, 1)), H=np.zeros((1, 1)),
        W=np.eye(2), eta_w=0.2, eta_v=0.1,
        x0_hat=np.zeros(2) if x0_hat is None else x0_hat,
        delta0_x=1.0 if delta0_x is None else delta0_x,
        class_spec=spec)


_BUILTINS = {"flex_joint": _flex_joint, "tanh_benchmark": _tanh_benchmark}

_DEFAULT_SIGNALS = {
    "flex_joint": {"kind": "composite", "parts": [
        {"kind": "sinusoid", "amplitude": 0.5, "frequency_hz": 0.5,
         "sample_time": 0.01},
        {"kind": "step_train", "levels": [0.0, 1.0], "period": 250}]},
    "tanh_benchmark": {"kind": "random_ball", "bound": 0.2},
}


def builtin_system(name: str, class_label: str = "I", x0_hat=None,
                   delta0_x=None) -> NonlinearSystem:
    """Instantiate a builtin system under the requested nonlinearity class."""
    if name not in _BUILTINS:
        raise ModelInvalidError(
            f"scenario field 'system': unknown builtin {name!r}; "
            f"available: {sorted(_BUILTINS)}")
    return _BUILTINS[name](class_label, x0_hat, delta0_x)


# ---------------------------------------------------------------------------
# scenario documents
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    name: str
    system: NonlinearSystem
    horizon: int
    signal_spec: dict
    noise_seed: int
    batch: int
    random_init: bool
    x0_fixed: Optional[np.ndarray]
    synthesis: dict = field(default_factory=dict)
    class_label: str = "I"

    def __post_init__(self):
        if self.horizon < 1:
            raise ModelInvalidError("scenario field 'horizon': must be >= 1")
        if self.batch < 1:
            raise ModelInvalidError("scenario field 'batch': must be >= 1")
        make_input_signal(self.signal_spec, self.system.p)  # validate early


def _require(doc: dict, key: str, typ, default=None, required=False):
    if key not in doc:
        if required:
            raise ModelInvalidError(f"scenario field {key!r}: missing")
        return default
    val = doc[key]
    if typ is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, typ):
        raise ModelInvalidError(
            f"scenario field {key!r}: expected {typ.__name__}, "
            f"got {type(val).__name__}")
    return val


def _custom_system(doc: dict, class_label: str, x0_hat, delta0_x) -> NonlinearSystem:
    """A fully linear custom plant given by explicit matrices.

    The dynamics map is f(x) = A x; the class certificate defaults to the
    structured one (A, 0) unless LPV data is supplied.
    """
    for key in ("A", "G", "C", "H"):
        if key not in doc:
            raise ModelInvalidError(f"scenario field 'system.{key}': missing")
    A = np.asarray(doc["A"], dtype=float)
    n = A.shape[0]
    G = np.asarray(doc["G"], dtype=float)
    C = np.asarray(doc["C"], dtype=float)
    H = np.asarray(doc["H"], dtype=float)
    W = np.asarray(doc.get("W", np.eye(n)), dtype=float)
    l = C.shape[0]
    B = np.asarray(doc.get("B", np.zeros((n, 1))), dtype=float)
    D = np.asarray(doc.get("D", np.zeros((l, B.shape[1]))), dtype=float)
    if "lpv" in doc:
        A_list = [np.asarray(Ai, dtype=float) for Ai in doc["lpv"]["A_list"]]
        lam = np.asarray(doc["lpv"]["coeffs"], dtype=float)
        if lam.ndim != 1 or lam.shape[0] != len(A_list):
            raise ModelInvalidError(
                "scenario field 'system.lpv.coeffs': one constant weight "
                "per constituent is required")
        spec = FunctionClassSpec.lpv(A_list, lambda k, w=lam: w)
        Amix = sum(w * Ai for w, Ai in zip(lam, A_list))
        f = lambda k, x, _A=Amix: _A @ x
    else:
        spec = FunctionClassSpec.qcstar(A, 0.0)
        f = lambda k, x, _A=A: _A @ x
    return NonlinearSystem(
        f=f, B=B, G=G, C=C, D=D, H=H, W=W,
        eta_w=float(doc.get("eta_w", 0.0)), eta_v=float(doc.get("eta_v", 0.0)),
        x0_hat=np.zeros(n) if x0_hat is None else x0_hat,
        delta0_x=1.0 if delta0_x is None else delta0_x, class_spec=spec)


def scenario_from_dict(doc: dict) -> Scenario:
    schema = _require(doc, "schema", str, required=True)
    if schema != SCHEMA_VERSION:
        raise ModelInvalidError(
            f"scenario field 'schema': expected {SCHEMA_VERSION!r}, got {schema!r}")
    class_label = _require(doc, "class", str, default="I")
    if class_label not in CLASS_LABELS:
        raise ModelInvalidError(
            f"scenario field 'class': must be one of {CLASS_LABELS}")

    init = _require(doc, "init", dict, default={})
    x0_hat = np.asarray(init["x0_hat"], dtype=float) if "x0_hat" in init else None
    delta0_x = float(init["delta0_x"]) if "delta0_x" in init else None
    x0_fixed = np.asarray(init["x0"], dtype=float) if "x0" in init else None
    random_init = bool(init.get("random", x0_fixed is None))

    sysdoc = doc.get("system", None)
    if isinstance(sysdoc, str):
        system = builtin_system(sysdoc, class_label, x0_hat, delta0_x)
        name = sysdoc
        default_signal = _DEFAULT_SIGNALS[sysdoc]
    elif isinstance(sysdoc, dict):
        system = _custom_system(sysdoc, class_label, x0_hat, delta0_x)
        name = sysdoc.get("name", "custom")
        default_signal = {"kind": "constant", "value": 0.0}
    else:
        raise ModelInvalidError(
            "scenario field 'system': must be a builtin name or an object")

    noise = _require(doc, "noise", dict, default={})
    if "eta_w" in noise:
        system.eta_w = float(noise["eta_w"])
    if "eta_v" in noise:
        system.eta_v = float(noise["eta_v"])

    return Scenario(
        name=name, system=system,
        horizon=int(_require(doc, "horizon", int, default=500)),
        signal_spec=_require(doc, "input_signal", dict, default=default_signal),
        noise_seed=int(noise.get("seed", 0)),
        batch=int(_require(doc, "batch", int, default=1)),
        random_init=random_init, x0_fixed=x0_fixed,
        synthesis=_require(doc, "synthesis", dict, default={}),
        class_label=class_label)


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario JSON file (or a bare builtin name)."""
    if path in _BUILTINS:
        return scenario_from_dict({"schema": SCHEMA_VERSION, "system": path})
    with open(path, "r") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelInvalidError(f"scenario file {path}: invalid JSON "
                                    f"({exc})") from exc
    if not isinstance(doc, dict):
        raise ModelInvalidError(f"scenario file {path}: top level must be an object")
    return scenario_from_dict(doc)


# ---------------------------------------------------------------------------
# signals and noise
# ---------------------------------------------------------------------------

def make_input_signal(spec: dict, p: int) -> Callable:
    """Compile a signal spec into a callable (k, rng) -> p-vector.

    Kinds: constant, sinusoid, ramp (c*k), step_train, random_ball, and
    composite (elementwise sum of parts).  Scalar parameters broadcast over
    the p channels.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelInvalidError("scenario field 'input_signal.kind': missing")
    kind = spec["kind"]

    def vec(v):
        return np.broadcast_to(np.asarray(v, dtype=float).ravel(), (p,)).copy()

    if kind == "constant":
        val = vec(spec.get("value", 0.0))
        return lambda k, rng: val
    if kind == "sinusoid":
        amp = vec(spec.get("amplitude", 1.0))
        freq = float(spec.get("frequency_hz", 1.0))
        Ts = float(spec.get("sample_time", 1.0))
        phase = float(spec.get("phase", 0.0))
        w = 2.0 * math.pi * freq * Ts
        return lambda k, rng: amp * math.sin(w * k + phase)
    if kind == "ramp":
        slope = vec(spec.get("slope", 1.0))
        return lambda k, rng: slope * k
    if kind == "step_train":
        levels = [vec(v) for v in spec.get("levels", [0.0, 1.0])]
        period = int(spec.get("period", 100))
        if period < 1 or not levels:
            raise ModelInvalidError(
                "scenario field 'input_signal': step_train needs period >= 1 "
                "and a nonempty level list")
        return lambda k, rng: levels[(k // period) % len(levels)]
    if kind == "random_ball":
        bound = float(spec.get("bound", 1.0))
        return lambda k, rng: sample_bounded_noise(p, bound, rng)
    if kind == "composite":
        parts = [make_input_signal(s, p) for s in spec.get("parts", [])]
        if not parts:
            raise ModelInvalidError(
                "scenario field 'input_signal': composite needs parts")
        return lambda k, rng: np.sum([g(k, rng) for g in parts], axis=0)
    raise ModelInvalidError(
        f"scenario field 'input_signal.kind': unknown kind {kind!r}")


def sample_bounded_noise(dim: int, bound: float, rng) -> np.ndarray:
    """Uniform sample from the closed 2-norm ball of the given radius.

    Direction uniform on the sphere (normalized Gaussian), radius
    bound * U^(1/dim).  dim = 0 returns the empty vector.
    """
    if bound < 0:
        raise ModelInvalidError("noise bound must be >= 0")
    if dim == 0:
        return np.zeros(0)
    direction = rng.standard_normal(dim)
    nrm = np.linalg.norm(direction)
    while nrm == 0.0:
        direction = rng.standard_normal(dim)
        nrm = np.linalg.norm(direction)
    radius = bound * rng.uniform() ** (1.0 / dim)
    return (radius / nrm) * direction


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

@dataclass
class Trace:
    """Per-step records for k = 1..K; the input columns are delayed one
    step (row k describes d_{k-1} and its estimate)."""
    k: np.ndarray            # (K,)
    x: np.ndarray            # (K, n) true state at k
    x_hat: np.ndarray        # (K, n) filtered estimate at k
    delta_x: np.ndarray      # (K,) state-ball radius at k
    d: np.ndarray            # (K, p) true unknown input at k-1
    d_hat: np.ndarray        # (K, p) its estimate
    delta_d: np.ndarray      # (K,) input-ball radius at k-1
    err_x: np.ndarray        # (K,) ||x - x_hat||
    err_d: np.ndarray        # (K,) ||d - d_hat||

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def p(self) -> int:
        return self.d.shape[1]

    def containment_violations(self, slack: float = 1e-9) -> int:
        bad_x = np.sum(self.err_x > self.delta_x + slack)
        bad_d = np.sum(self.err_d > self.delta_d + slack)
        return int(bad_x + bad_d)


def get_design(scenario: Scenario) -> ObserverDesign:
    """Run synthesis with the scenario's options."""
    opts = scenario.synthesis
    return design_observer(
        scenario.system,
        convergent=bool(opts.get("convergent", False)),
        kappa_scaled=bool(opts.get("kappa_scaled", False)),
        sqrt_variant=bool(opts.get("sqrt_variant", False)),
        lipschitz_surrogate=opts.get("lipschitz_surrogate"),
        alpha_grid=opts.get("alpha_grid"), eps_grid=opts.get("eps_grid"),
        solver=opts.get("solver"))


def simulate(scenario: Scenario, seed, design: ObserverDesign | None = None) -> Trace:
    """One seeded closed-loop run of plant plus observer.

    `seed` may be an int or a numpy SeedSequence.  Passing a pre-computed
    design skips re-synthesis (run_batch does this).
    """
    if design is None:
        design = get_design(scenario)
    sysm = scenario.system
    K, n, p, m = scenario.horizon, sysm.n, sysm.p, sysm.m
    rng = np.random.default_rng(seed)
    signal = make_input_signal(scenario.signal_spec, p)

    if scenario.x0_fixed is not None:
        x = scenario.x0_fixed.astype(float).copy()
    elif scenario.random_init:
        x = sysm.x0_hat + sample_bounded_noise(n, sysm.delta0_x, rng)
    else:
        x = sysm.x0_hat.copy()

    u = np.zeros(m)
    d = signal(0, rng)
    v = sample_bounded_noise(sysm.l, sysm.eta_v, rng)
    y = sysm.C @ x + sysm.D(0) @ u + sysm.H @ d + v
    state = initialize(design, z1_0=design.T.T1 @ y, u_0=u)

    rows = dict(k=np.arange(1, K + 1, dtype=float),
                x=np.empty((K, n)), x_hat=np.empty((K, n)),
                delta_x=np.empty(K), d=np.empty((K, p)),
                d_hat=np.empty((K, p)), delta_d=np.empty(K),
                err_x=np.empty(K), err_d=np.empty(K))
    for i in range(K):
        k = i + 1
        w = sample_bounded_noise(n, sysm.eta_w, rng)
        x_next = sysm.f(k - 1, x) + sysm.B(k - 1) @ u + sysm.G @ d + sysm.W @ w
        u_next = np.zeros(m)
        d_next = signal(k, rng)
        v = sample_bounded_noise(sysm.l, sysm.eta_v, rng)
        y = sysm.C @ x_next + sysm.D(k) @ u_next + sysm.H @ d_next + v
        state, x_ball, d_ball = step(design, state, y, u_next)
        rows["x"][i] = x_next
        rows["x_hat"][i] = x_ball.center
        rows["delta_x"][i] = x_ball.radius
        rows["d"][i] = d
        rows["d_hat"][i] = d_ball.center
        rows["delta_d"][i] = d_ball.radius
        rows["err_x"][i] = np.linalg.norm(x_next - x_ball.center)
        rows["err_d"][i] = np.linalg.norm(d - d_ball.center)
        x, u, d = x_next, u_next, d_next
    return Trace(**rows)


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------

@dataclass
class BatchSummary:
    k: np.ndarray                    # (K,)
    stats: dict                      # name -> (5, K): min, q1, median, q3, max
    delta_x: np.ndarray              # (K,) radius of the first run (identical
    delta_d: np.ndarray              # across runs: radii are input-independent)
    violations: int
    runs: int


def _order_stats(samples: np.ndarray) -> np.ndarray:
    """(runs, K) -> (5, K) min/q1/median/q3/max along the run axis."""
    qs = np.quantile(samples, [0.0, 0.25, 0.5, 0.75, 1.0], axis=0)
    return qs


def run_batch(scenario: Scenario, runs: int | None = None,
              master_seed: int = 0,
              design: ObserverDesign | None = None,
              max_workers: int | None = None) -> BatchSummary:
    """Seed-ordered aggregation of many simulate() runs.

    Child seeds come from SeedSequence(master_seed).spawn, so the summary
    is a deterministic function of (scenario, master_seed) regardless of
    execution order.
    """
    runs = scenario.batch if runs is None else int(runs)
    if runs < 1:
        raise ModelInvalidError("batch run count must be >= 1")
    if design is None:
        design = get_design(scenario)
    seeds = np.random.SeedSequence(master_seed).spawn(runs)
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        traces = list(pool.map(lambda s: simulate(scenario, s, design), seeds))

    K, n, p = scenario.horizon, scenario.system.n, scenario.system.p
    stats = {
        "err_x": _order_stats(np.stack([t.err_x for t in traces])),
        "err_d": _order_stats(np.stack([t.err_d for t in traces])),
    }
    for j in range(n):
        chan = np.stack([np.abs(t.x[:, j] - t.x_hat[:, j]) for t in traces])
        stats[f"abs_err_x{j}"] = _order_stats(chan)
    for j in range(p):
        chan = np.stack([np.abs(t.d[:, j] - t.d_hat[:, j]) for t in traces])
        stats[f"abs_err_d{j}"] = _order_stats(chan)
    violations = sum(t.containment_violations() for t in traces)
    return BatchSummary(k=traces[0].k, stats=stats,
                        delta_x=traces[0].delta_x, delta_d=traces[0].delta_d,
                        violations=violations, runs=runs)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return "%.17g" % v


def _trace_header(n: int, p: int) -> list:
    return (["k"] + [f"x{j}" for j in range(n)] + [f"xhat{j}" for j in range(n)]
            + ["delta_x"] + [f"d{j}" for j in range(p)]
            + [f"dhat{j}" for j in range(p)] + ["delta_d", "err_x", "err_d"])


def trace_to_csv(trace: Trace, path: str) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(_trace_header(trace.n, trace.p))
        for i in range(trace.k.shape[0]):
            row = ([trace.k[i]] + list(trace.x[i]) + list(trace.x_hat[i])
                   + [trace.delta_x[i]] + list(trace.d[i]) + list(trace.d_hat[i])
                   + [trace.delta_d[i], trace.err_x[i], trace.err_d[i]])
            wr.writerow(_fmt(v) for v in row)


def trace_from_csv(path: str) -> Trace:
    with open(path, "r", newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        data = np.array([[float(v) for v in row] for row in rd])
    n = sum(1 for h in header if h.startswith("x") and not h.startswith("xhat"))
    p = sum(1 for h in header if h.startswith("d") and h[1:].isdigit())
    if data.size == 0:
        data = data.reshape(0, len(header))
    c = 1
    x = data[:, c:c + n]; c += n
    x_hat = data[:, c:c + n]; c += n
    delta_x = data[:, c]; c += 1
    d = data[:, c:c + p]; c += p
    d_hat = data[:, c:c + p]; c += p
    return Trace(k=data[:, 0], x=x, x_hat=x_hat, delta_x=delta_x, d=d,
                 d_hat=d_hat, delta_d=data[:, c], err_x=data[:, c + 1],
                 err_d=data[:, c + 2])


def summary_to_csv(summary: BatchSummary, path: str) -> None:
    names = sorted(summary.stats)
    cols = ["k"]
    for name in names:
        cols += [f"{name}_{s}" for s in ("min", "q1", "med", "q3", "max")]
    cols += ["delta_x", "delta_d"]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(cols)
        for i in range(summary.k.shape[0]):
            row = [summary.k[i]]
            for name in names:
                row += list(summary.stats[name][:, i])
            row += [summary.delta_x[i], summary.delta_d[i]]
            wr.writerow(_fmt(v) for v in row)


def _finite_for_plot(a: np.ndarray) -> np.ndarray:
    return np.where(np.isfinite(a), a, np.nan)


def trace_to_svg(trace: Trace, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(trace.k, trace.err_x, label="state error norm")
    axes[0].plot(trace.k, _finite_for_plot(trace.delta_x), "--", label="state radius")
    axes[1].plot(trace.k, trace.err_d, label="input error norm")
    axes[1].plot(trace.k, _finite_for_plot(trace.delta_d), "--", label="input radius")
    for ax in axes:
        ax.legend()
        ax.set_yscale("symlog")
    axes[1].set_xlabel("k")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def summary_to_svg(summary: BatchSummary, out_dir: str) -> list:
    """One SVG per recorded channel: median with quartile and range bands."""
    import os
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    paths = []
    for name in sorted(summary.stats):
        lo, q1, med, q3, hi = summary.stats[name]
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.fill_between(summary.k, lo, hi, alpha=0.2, label="range")
        ax.fill_between(summary.k, q1, q3, alpha=0.4, label="quartiles")
        ax.plot(summary.k, med, label="median")
        if name == "err_x":
            ax.plot(summary.k, _finite_for_plot(summary.delta_x), "--",
                    label="radius bound")
        elif name == "err_d":
            ax.plot(summary.k, _finite_for_plot(summary.delta_d), "--",
                    label="radius bound")
        ax.set_xlabel("k")
        ax.set_yscale("symlog")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"batch_{name}.svg")
        fig.savefig(path, format="svg")
        plt.close(fig)
        paths.append(path)
    return paths


def export(obj, fmt: str, path: str):
    """Write a Trace or BatchSummary as 'csv' or 'svg'."""
    if fmt == "csv":
        if isinstance(obj, Trace):
            return trace_to_csv(obj, path)
        return summary_to_csv(obj, path)
    if fmt == "svg":
        if isinstance(obj, Trace):
            return trace_to_svg(obj, path)
        return summary_to_svg(obj, path)
    raise ModelInvalidError(f"unknown export format {fmt!r}")
