import json

import numpy as np
import pytest

from ssreg.core.exceptions import ConfigException, SsregException
from ssreg.dao import ResultDAO, SystemDAO, TrajectoryDAO
from ssreg.excitation import build_hankel, random_pe_input
from ssreg.identify import estimate_gain_noise_free
from ssreg.lti import random_admissible_system, simulate


def test_trajectory_csv_layout(tmp_path, scalar_system):
    traj = simulate(scalar_system, [0.0], [1.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 0.0])
    path = TrajectoryDAO.save(traj, tmp_path / "trajectory.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "k,u_0,x_0,y_0,w_0"
    assert len(lines) == 6
    assert lines[-1] == "4,,1.125,1.125,"


def test_trajectory_csv_reload(tmp_path):
    system = random_admissible_system(3, 2, 4, 1, seed=0)
    u = random_pe_input(2, 20, 4, seed=0)
    w = np.random.default_rng(1).standard_normal((20, 1))
    traj = simulate(system, np.ones(3), u, w)
    loaded = TrajectoryDAO.load(TrajectoryDAO.save(traj, tmp_path / "t.csv"))
    assert np.array_equal(loaded.inputs, traj.inputs)
    assert np.array_equal(loaded.outputs, traj.outputs)
    assert np.array_equal(loaded.states, traj.states)
    assert np.array_equal(loaded.disturbances, traj.disturbances)


def test_trajectory_load_errors(tmp_path):
    with pytest.raises(ConfigException):
        TrajectoryDAO.load(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("k,x_0\n0,1\n")
    with pytest.raises(SsregException) as exc:
        TrajectoryDAO.load(bad)
    assert exc.value.exit_code == 2


def test_system_json(tmp_path):
    system = random_admissible_system(3, 2, 4, 2, seed=6)
    path = SystemDAO.save(system, tmp_path / "system.json")
    payload = json.loads(path.read_text())
    assert (payload["n"], payload["m"], payload["p"], payload["r"]) == (3, 2, 4, 2)
    assert SystemDAO.load(path) == system


def test_system_json_dimension_mismatch():
    payload = SystemDAO.to_dict(random_admissible_system(2, 1, 2, 1, seed=0))
    payload["n"] = 5
    with pytest.raises(SsregException) as exc:
        SystemDAO.from_dict(payload)
    assert exc.value.exit_code == 2
    del payload["E"]
    with pytest.raises(SsregException):
        SystemDAO.from_dict(payload)


def test_estimate_json_and_gain_reload(tmp_path):
    estimate = estimate_gain_noise_free([1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.5, 0.25, 1.125])
    path = ResultDAO.save_estimate(estimate, tmp_path / "estimate.json", error_fro=0.0)
    payload = json.loads(path.read_text())
    assert payload["method"] == "noise_free"
    assert payload["error_fro"] == 0.0
    assert np.allclose(ResultDAO.load_gain(path), [[2.0]])


def test_gain_file_errors(tmp_path):
    with pytest.raises(ConfigException):
        ResultDAO.load_gain(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{\"method\": \"noise_free\"}")
    with pytest.raises(SsregException):
        ResultDAO.load_gain(bad)


def test_hankel_csv(tmp_path):
    path = ResultDAO.save_hankel(build_hankel([1.0, 2.0, 3.0, 4.0], 2), tmp_path / "hankel.csv")
    assert path.read_text().splitlines() == ["t,q,sigma", "2,3,1", "1,2,3", "2,3,4"]


def test_mc_trials_long_format(tmp_path):
    errors = np.array([[0.1, 0.2], [0.3, np.nan]])
    path = ResultDAO.save_mc_trials([10, 11], errors, tmp_path / "mc_trials.csv")
    frame = ResultDAO.load_mc_trials(path)
    assert list(frame.columns) == ["trial", "k", "err_fro"]
    assert frame["trial"].tolist() == [0, 0, 1, 1]
    assert frame["k"].tolist() == [10, 11, 10, 11]
    assert np.isnan(frame["err_fro"].iloc[3])


def test_mc_trials_reload_is_exact(tmp_path):
    errors = np.random.default_rng(7).standard_normal((4, 25)) ** 2
    path = ResultDAO.save_mc_trials(range(25), errors, tmp_path / "mc_trials.csv")
    frame = ResultDAO.load_mc_trials(path)
    assert np.array_equal(frame["err_fro"].to_numpy().reshape(4, 25), errors)
