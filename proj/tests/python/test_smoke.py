"""End-to-end smoke tests for the Python bindings and the CLI binary."""

import json
import os
import subprocess

import pytest

import ragnet

ALOHA = {
    "lambda1": 0.1, "lambda2": 0.1,
    "alpha1": 0.5, "alpha2": 0.5,
    "s1": 0.0, "s2": 0.0,
    "l1_minus": 1.0, "l1_plus": 0.0,
    "l2_minus": 1.0, "l2_plus": 0.0,
}

SIGNALS = {
    "lambda1": 0.05, "lambda2": 0.08,
    "alpha1": 0.4, "alpha2": 0.6,
    "s1": 0.2, "s2": 0.1,
    "l1_minus": 0.3, "l1_plus": 0.7,
    "l2_minus": 0.5, "l2_plus": 0.5,
}

SYMMETRIC = {"lambda": 0.05, "alpha": 0.4, "s": 0.6, "l_minus": 0.9,
             "l_plus": 0.1}


def embed(sym):
    return {
        "lambda1": sym["lambda"], "lambda2": sym["lambda"],
        "alpha1": sym["alpha"], "alpha2": sym["alpha"],
        "s1": sym["s"], "s2": sym["s"],
        "l1_minus": sym["l_minus"], "l1_plus": sym["l_plus"],
        "l2_minus": sym["l_minus"], "l2_plus": sym["l_plus"],
    }


def test_kernel_rows_are_probability_laws():
    for state in [(0, 0), (0, 3), (5, 0), (4, 7)]:
        for gm in (False, True):
            dist = ragnet.step_kernel(state[0], state[1], SIGNALS, gm)
            total = sum(o["prob"] for o in dist)
            assert abs(total - 1.0) < 1e-12
            for o in dist:
                assert o["prob"] >= 0.0
                assert state[0] + o["delta1"] >= 0
                assert state[1] + o["delta2"] >= 0


def test_region_and_drift_verdicts():
    verdict = ragnet.stability_region(0.1, 0.1, ALOHA)
    assert verdict["member"] is True
    assert verdict["via"] == "both"
    drift = ragnet.classify_drift(0.1, 0.1, ALOHA)
    assert drift["verdict"] == "positive-recurrent"
    # Far outside the region both calls flip.
    assert ragnet.stability_region(0.6, 0.6, ALOHA)["member"] is False
    assert ragnet.classify_drift(0.6, 0.6, ALOHA)["verdict"] != \
        "positive-recurrent"
    # Throughput region is contained in the stability region.
    t = ragnet.throughput_region(0.1, 0.1, SIGNALS)
    r = ragnet.stability_region(0.1, 0.1, SIGNALS)
    assert not (t["member"] and not r["member"])


def test_bounds_collapse_without_signals_and_match_oracle():
    plain = {"lambda": 0.1, "alpha": 0.5, "s": 0.0, "l_minus": 1.0,
             "l_plus": 0.0}
    b = ragnet.queue_bounds(plain)
    assert b["stable"] is True
    assert b["L_low"] == b["L_up"]
    oracle = ragnet.truncated_stationary(embed(plain), N=32)
    assert abs(oracle["stats"]["mean_q1"] - b["L_low"]) < 1e-6
    assert oracle["tail_mass"] < 1e-8


def test_unstable_bounds_raise_numeric_error():
    hot = {"lambda": 0.45, "alpha": 0.5, "s": 0.0, "l_minus": 1.0,
           "l_plus": 0.0}
    with pytest.raises(ragnet.NumericError):
        ragnet.queue_bounds(hot)
    # NumericError is a RuntimeError, ConfigError a ValueError.
    assert issubclass(ragnet.NumericError, RuntimeError)
    assert issubclass(ragnet.ConfigError, ValueError)


def test_bad_parameters_raise_config_error():
    with pytest.raises(ragnet.ConfigError):
        ragnet.validate_params({"lambda1": 2.0})
    with pytest.raises(ValueError):
        ragnet.step_kernel(1, 1, {"bogus": 1.0})


def test_simulation_is_deterministic_per_seed():
    a = ragnet.simulate(SIGNALS, slots=50000, burn_in=5000, seed=9)
    b = ragnet.simulate(SIGNALS, slots=50000, burn_in=5000, seed=9)
    c = ragnet.simulate(SIGNALS, slots=50000, burn_in=5000, seed=10)
    assert a == b
    assert a != c
    assert a["diverged"] is False
    assert a["slots"] == 45000


def test_dominant_simulation_accepts_direction_names():
    st = ragnet.simulate_dominant(SIGNALS, "R1", slots=20000, burn_in=2000,
                                  seed=4)
    assert 0.0 <= st["p_empty2"] <= 1.0
    with pytest.raises(ValueError):
        ragnet.simulate_dominant(SIGNALS, "R3", slots=1000, burn_in=100,
                                 seed=4)


def test_boundary_value_solution_converges():
    sol = ragnet.solve_riemann(SYMMETRIC, M=256)
    assert sol["chi"] == 1
    assert sol["max_kernel_residual"] < 1e-8
    assert sol["bc_residual"] < 1e-6
    oracle = ragnet.truncated_stationary(embed(SYMMETRIC), N=16)
    assert abs(sol["pi00"] - oracle["stats"]["p_both_empty"]) < 1e-5
    assert abs(sol["L_exact"] - oracle["stats"]["mean_q1"]) < 1e-5


def test_cli_binary_round_trip(tmp_path):
    cli = os.environ.get("RAGNET_CLI_BIN")
    assert cli, "RAGNET_CLI_BIN must point at the command-line binary"
    params = tmp_path / "params.json"
    params.write_text(json.dumps(ALOHA))
    run = subprocess.run(
        [cli, "simulate", "--params", str(params), "--slots", "20000",
         "--burn-in", "2000", "--seed", "5"],
        capture_output=True, text=True)
    assert run.returncode == 0, run.stderr
    doc = json.loads(run.stdout)
    assert doc["config"]["command"] == "simulate"
    assert doc["stats"]["slots"] == 18000
    # Configuration errors exit with code 2.
    bad = subprocess.run([cli, "simulate", "--params", "/no/such/file.json"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
