"""Smoke tests for the python module: the worked two-queue example end to end."""

import json
import math
import os
import subprocess

import numpy as np
import pytest

import fpcs_lab as fl


@pytest.fixture
def two_queue():
    return fl.maxweight_system([[1.0, 0.0], [0.0, 1.0]], idle=True)


def test_system_shape(two_queue):
    assert two_queue.dim == 2
    assert two_queue.piece_count == 3
    value, active = two_queue.evaluate(np.array([2.0, 1.0]))
    assert value == pytest.approx(2.0)
    assert active == [0]


def test_actual_drift_serves_longest_queue(two_queue):
    drift = two_queue.actual_drift(np.array([2.0, 1.0]))
    assert np.allclose(drift, [-1.0, 0.0])
    diag = two_queue.actual_drift(np.array([1.0, 1.0]))
    assert np.allclose(diag, [-0.5, -0.5])


def test_trajectory_breakpoints(two_queue):
    traj = fl.integrate(two_queue, np.array([2.0, 1.0]), 5.0)
    assert traj.flag == fl.TerminalFlag.equilibrium
    assert traj.times == pytest.approx([0.0, 1.0, 3.0])
    assert np.allclose(traj.states[1], [1.0, 1.0])
    assert np.allclose(traj.states[2], [0.0, 0.0])
    assert np.allclose(traj.at(2.0), [0.5, 0.5])


def test_perturbed_run_and_deviation(two_queue):
    path = fl.make_path("square_wave", 2, {"amplitude": 0.1, "period": 2.0, "horizon": 10.0})
    base = fl.integrate(two_queue, np.array([2.0, 1.0]), 10.0)
    pert = fl.integrate_perturbed(two_queue, np.array([2.0, 1.0]), path, 10.0)
    report = fl.measure_deviation(base, pert, path)
    assert report.sup_perturbation == pytest.approx(0.1)
    assert report.sup_deviation <= report.cumulative_abs + 1e-12
    assert report.ratio <= 6.5


def test_constants_match_the_worked_table(two_queue):
    report = fl.compute_constants(two_queue, gamma_override=1.0)
    assert report["M"] == 1
    assert report["D_C"] == 0.0
    assert report["sigma"] == 5.0
    assert report["eta"] == 240.0
    assert report["kappa"] == 1921.0
    assert math.isinf(report["gamma_min"])


def test_analysis(two_queue):
    analysis = fl.analyze(two_queue, gamma_samples=300, seed=3)
    assert len(analysis["critical_points"]) == 1
    assert math.isinf(analysis["cnc"])
    assert analysis["gamma_empirical"] <= analysis["gamma_bound"] + 1e-6


def test_geometry_primitives():
    point, support, weights = fl.min_norm_point([np.array([3.0, 4.0]), np.array([3.0, -4.0])])
    assert np.allclose(point, [3.0, 0.0])
    assert sum(weights) == pytest.approx(1.0)

    proj, dist = fl.project_onto_polyhedron(
        np.array([[1.0, -1.0], [0.0, -1.0]]), np.zeros(2), np.array([1.0, 0.0])
    )
    assert np.allclose(proj, [0.5, 0.5])
    assert dist == pytest.approx(1.0 / math.sqrt(2.0))

    c = fl.hoffman_constant(np.eye(2), np.zeros(2))
    assert c == pytest.approx(math.sqrt(2.0))


def test_sweep_determinism(two_queue):
    kwargs = dict(runs=4, horizon=8.0, seed=11)
    s1 = fl.sensitivity_sweep(two_queue, np.array([2.0, 1.0]), "bernoulli_steps",
                              {"theta": 0.2, "count": 8}, **kwargs)
    s2 = fl.sensitivity_sweep(two_queue, np.array([2.0, 1.0]), "bernoulli_steps",
                              {"theta": 0.2, "count": 8}, **kwargs)
    assert s1.max_ratio == s2.max_ratio
    assert s1.max_sup_deviation == s2.max_sup_deviation


def test_error_translation():
    with pytest.raises(fl.FpcsError):
        fl.min_norm_point([])


def test_cli_round_trip(tmp_path):
    cli = os.environ.get("FPCS_CLI_PATH")
    data = os.environ.get("FPCS_DATA_DIR")
    if not cli or not data:
        pytest.skip("CLI path not provided")
    out = subprocess.run(
        [cli, "constants", os.path.join(data, "fig1_maxweight.json"), "--gamma", "1",
         "--out", str(tmp_path)],
        capture_output=True, text=True, check=True)
    doc = json.loads(out.stdout)
    assert doc["kappa"] == 1921.0
