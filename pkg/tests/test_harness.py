"""Unit tests for scenario parsing, signals, noise sampling, simulation
determinism, batching, and the CSV round trip.

Simulation tests use a custom linear scenario with a hand-built design so
no SDP is solved in this module.
"""

import json
import math
import os

import numpy as np
import pytest

from sisobs.errors import ModelInvalidError
from sisobs.harness import (SCHEMA_VERSION, Trace, builtin_system,
                            load_scenario, make_input_signal, run_batch,
                            sample_bounded_noise, scenario_from_dict, simulate,
                            export, trace_from_csv, trace_to_csv)
from sisobs.transform import transform_system
from tests.test_observer import manual_design


def custom_doc(**over):
    doc = {
        "schema": SCHEMA_VERSION,
        "system": {"A": [[0.5, 0.1], [0.0, 0.3]], "G": [[1.0], [0.0]],
                   "C": [[1.0, 0.0], [0.0, 1.0]], "H": [[0.0], [0.0]],
                   "eta_w": 0.1, "eta_v": 0.05},
        "horizon": 40,
        "input_signal": {"kind": "random_ball", "bound": 0.5},
    }
    doc.update(over)
    return doc


def custom_scenario(**over):
    sc = scenario_from_dict(custom_doc(**over))
    design = manual_design(sc.system, transform_system(sc.system))
    return sc, design


# ---------------------------------------------------------------------------
# builtins
# ---------------------------------------------------------------------------

def test_builtin_systems_exist():
    fj = builtin_system("flex_joint", "II")
    assert (fj.n, fj.l, fj.p) == (4, 2, 1)
    tb = builtin_system("tanh_benchmark", "0")
    assert (tb.n, tb.l, tb.p) == (2, 1, 1)


def test_builtin_unknown_name_and_class():
    with pytest.raises(ModelInvalidError):
        builtin_system("no_such_system")
    with pytest.raises(ModelInvalidError):
        builtin_system("flex_joint", "III")
    with pytest.raises(ModelInvalidError):
        builtin_system("tanh_benchmark", "II")


# ---------------------------------------------------------------------------
# signals
# ---------------------------------------------------------------------------

def test_signal_kinds():
    rng = np.random.default_rng(0)
    const = make_input_signal({"kind": "constant", "value": 2.0}, 3)
    assert np.allclose(const(5, rng), [2.0, 2.0, 2.0])

    sin = make_input_signal({"kind": "sinusoid", "amplitude": 2.0,
                             "frequency_hz": 0.5, "sample_time": 0.01}, 1)
    assert sin(7, rng)[0] == pytest.approx(2.0 * math.sin(2 * math.pi * 0.5 * 0.01 * 7))

    ramp = make_input_signal({"kind": "ramp", "slope": 0.5}, 1)
    assert ramp(4, rng)[0] == pytest.approx(2.0)

    tr = make_input_signal({"kind": "step_train", "levels": [0.0, 1.0],
                            "period": 3}, 1)
    assert [tr(k, rng)[0] for k in range(7)] == [0, 0, 0, 1, 1, 1, 0]

    comp = make_input_signal({"kind": "composite", "parts": [
        {"kind": "constant", "value": 1.0}, {"kind": "ramp", "slope": 1.0}]}, 1)
    assert comp(3, rng)[0] == pytest.approx(4.0)


def test_signal_validation():
    with pytest.raises(ModelInvalidError):
        make_input_signal({"kind": "warble"}, 1)
    with pytest.raises(ModelInvalidError):
        make_input_signal({}, 1)
    with pytest.raises(ModelInvalidError):
        make_input_signal({"kind": "step_train", "period": 0}, 1)
    with pytest.raises(ModelInvalidError):
        make_input_signal({"kind": "composite", "parts": []}, 1)


def test_random_ball_signal_within_bound():
    rng = np.random.default_rng(3)
    sig = make_input_signal({"kind": "random_ball", "bound": 0.2}, 2)
    for k in range(200):
        assert np.linalg.norm(sig(k, rng)) <= 0.2 + 1e-12


# ---------------------------------------------------------------------------
# bounded noise sampler
# ---------------------------------------------------------------------------

def test_noise_sampler_stays_in_ball_and_mean_norm():
    rng = np.random.default_rng(11)
    norms = np.array([np.linalg.norm(sample_bounded_noise(2, 1.0, rng))
                      for _ in range(4000)])
    assert np.all(norms <= 1.0 + 1e-12)
    # radius is U^(1/d): E||.|| = d/(d+1) = 2/3 for d = 2
    assert norms.mean() == pytest.approx(2.0 / 3.0, abs=0.02)


def test_noise_sampler_edge_cases():
    rng = np.random.default_rng(0)
    assert sample_bounded_noise(0, 1.0, rng).shape == (0,)
    assert np.allclose(sample_bounded_noise(3, 0.0, rng), 0.0)
    with pytest.raises(ModelInvalidError):
        sample_bounded_noise(2, -1.0, rng)


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------

def test_scenario_requires_schema_and_matching_version():
    with pytest.raises(ModelInvalidError):
        scenario_from_dict({"system": "flex_joint"})
    with pytest.raises(ModelInvalidError):
        scenario_from_dict({"schema": "sisobs-scenario/999",
                            "system": "flex_joint"})


def test_scenario_defaults():
    sc = scenario_from_dict({"schema": SCHEMA_VERSION, "system": "flex_joint"})
    assert sc.horizon == 500 and sc.batch == 1
    assert sc.name == "flex_joint"
    assert sc.signal_spec["kind"] == "composite"
    assert sc.random_init


def test_scenario_field_type_errors():
    with pytest.raises(ModelInvalidError):
        scenario_from_dict(custom_doc(horizon="long"))
    with pytest.raises(ModelInvalidError):
        scenario_from_dict(custom_doc(horizon=0))
    with pytest.raises(ModelInvalidError):
        scenario_from_dict({**custom_doc(), "class": "IX"})
    with pytest.raises(ModelInvalidError):
        scenario_from_dict({"schema": SCHEMA_VERSION, "system": 7})


def test_custom_system_requires_matrices():
    doc = custom_doc()
    del doc["system"]["G"]
    with pytest.raises(ModelInvalidError):
        scenario_from_dict(doc)


def test_scenario_fixed_init_and_noise_override():
    doc = custom_doc(init={"x0": [0.3, -0.1]},
                     noise={"eta_w": 0.0, "eta_v": 0.0, "seed": 4})
    sc = scenario_from_dict(doc)
    assert not sc.random_init
    assert np.allclose(sc.x0_fixed, [0.3, -0.1])
    assert sc.system.eta_w == 0.0 and sc.noise_seed == 4


def test_load_scenario_builtin_name_and_bad_json(tmp_path):
    sc = load_scenario("tanh_benchmark")
    assert sc.name == "tanh_benchmark"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelInvalidError):
        load_scenario(str(bad))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ModelInvalidError):
        load_scenario(str(arr))


# ---------------------------------------------------------------------------
# simulation and batching
# ---------------------------------------------------------------------------

def test_simulate_deterministic_in_seed():
    sc, design = custom_scenario()
    t1 = simulate(sc, 42, design)
    t2 = simulate(sc, 42, design)
    t3 = simulate(sc, 43, design)
    assert np.array_equal(t1.x, t2.x) and np.array_equal(t1.d_hat, t2.d_hat)
    assert not np.array_equal(t1.x, t3.x)


def test_batch_of_one_equals_single_run():
    sc, design = custom_scenario()
    summary = run_batch(sc, runs=1, master_seed=9, design=design)
    seed = np.random.SeedSequence(9).spawn(1)[0]
    t = simulate(sc, seed, design)
    assert np.array_equal(summary.stats["err_x"][2], t.err_x)  # median = run
    assert np.array_equal(summary.delta_x, t.delta_x)
    assert summary.runs == 1


def test_batch_deterministic_and_order_stats_sorted():
    sc, design = custom_scenario()
    s1 = run_batch(sc, runs=5, master_seed=1, design=design)
    s2 = run_batch(sc, runs=5, master_seed=1, design=design, max_workers=1)
    for name in s1.stats:
        assert np.array_equal(s1.stats[name], s2.stats[name])
    lo, q1, med, q3, hi = s1.stats["err_x"]
    assert np.all(lo <= q1 + 1e-15) and np.all(q1 <= med + 1e-15)
    assert np.all(med <= q3 + 1e-15) and np.all(q3 <= hi + 1e-15)


def test_containment_violation_count():
    k = np.arange(1.0, 4.0)
    z3, z31 = np.zeros((3, 1)), np.zeros(3)
    tr = Trace(k=k, x=z3, x_hat=z3, delta_x=np.array([1.0, 1.0, math.inf]),
               d=z3, d_hat=z3, delta_d=np.array([0.5, 0.5, 0.5]),
               err_x=np.array([0.5, 2.0, 100.0]),
               err_d=np.array([0.6, 0.1, 0.1]))
    assert tr.containment_violations() == 2  # one x breach, one d breach


# ---------------------------------------------------------------------------
# export round trip
# ---------------------------------------------------------------------------

def test_trace_csv_round_trip_is_bitwise(tmp_path):
    sc, design = custom_scenario()
    t = simulate(sc, 5, design)
    path = tmp_path / "trace.csv"
    trace_to_csv(t, str(path))
    back = trace_from_csv(str(path))
    for name in ("k", "x", "x_hat", "delta_x", "d", "d_hat", "delta_d",
                 "err_x", "err_d"):
        assert np.array_equal(getattr(t, name), getattr(back, name)), name


def test_export_dispatch_and_svg(tmp_path):
    sc, design = custom_scenario(horizon=10)
    t = simulate(sc, 5, design)
    svg = tmp_path / "trace.svg"
    export(t, "svg", str(svg))
    assert svg.stat().st_size > 0
    with pytest.raises(ModelInvalidError):
        export(t, "pdf", str(tmp_path / "x.pdf"))
    summary = run_batch(sc, runs=2, design=design)
    csvp = tmp_path / "summary.csv"
    export(summary, "csv", str(csvp))
    header = csvp.read_text().splitlines()[0]
    assert header.startswith("k,") and "err_x_med" in header
