import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.characteristic.transform import CharState
from src.cli.artifacts import git_blob_hash
from src.cli.pipelines import (
    COMPARISON_COLUMNS,
    EXIT_BLOWUP,
    EXIT_CONFIG,
    EXIT_NO_COLLISION,
    EXIT_OK,
    run_experiment,
)
from src.config.experiment import ExperimentConfig, load_config
from src.errors import BlowupError
from src.peakons.dynamics import PeakonState, detect_crossing, integrate_peakons

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SMALL_GRID = {"L": 20.0, "n": 256}
BUMP = {"kind": "gaussian", "amp": 0.5, "width": 1.0, "center": 0.0}


def make_config(tmp_path, command, **overrides):
    data = {
        "command": command,
        "initial_data": BUMP,
        "grid": SMALL_GRID,
        "time": {"t_end": 0.05, "dt": 1e-3, "store_every": 10},
        "output_dir": str(tmp_path / command),
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


def read_json(path):
    return json.loads(path.read_text())


def test_smooth_run(tmp_path):
    cfg = make_config(tmp_path, "smooth")
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    assert result.input_hash == git_blob_hash(cfg.canonical_json())
    out = cfg.output_dir
    series = pd.read_csv(out / "energy_series.csv")
    assert list(series.columns) == ["t", "E", "F"]
    assert series["t"].iloc[-1] == pytest.approx(0.05)
    manifest = read_json(out / "manifest.json")
    assert set(manifest["files"]) == {"config.json", "trajectory.csv", "energy_series.csv", "report.json"}
    assert manifest["input_hash"] == result.input_hash
    assert result.outcome.summary["bounds_initial"].passed


def test_reruns_are_byte_identical(tmp_path):
    cfg = make_config(tmp_path, "smooth")
    run_experiment(cfg)
    first = read_json(cfg.output_dir / "manifest.json")
    run_experiment(cfg)
    second = read_json(cfg.output_dir / "manifest.json")
    assert first["files"] == second["files"]
    assert first["times"] == second["times"]


def test_peakon_run(tmp_path):
    cfg = make_config(
        tmp_path, "peakons",
        initial_data={"kind": "peakons", "peakons": [[1.0, -0.5], [-0.5, 0.5]]},
        time={"t_end": 0.5, "dt": 1e-3},
    )
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    frame = pd.read_csv(cfg.output_dir / "trajectory.csv")
    assert {"t", "p1", "q1", "p2", "q2"} <= set(frame.columns)
    assert result.outcome.summary["E_drift"] < 1e-6


def test_peakon_command_needs_peakons(tmp_path):
    result = run_experiment(make_config(tmp_path, "peakons"))
    assert result.exit_code == EXIT_CONFIG
    assert "peakon" in result.note


def test_semilinear_run(tmp_path):
    cfg = make_config(tmp_path, "semilinear")
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    index = read_json(cfg.output_dir / "slices" / "index.json")
    assert index["times"][0] == 0.0
    assert index["times"][-1] == pytest.approx(0.05)
    assert result.outcome.summary["n_events"] == 0
    assert result.outcome.summary["min_xi"] > 0
    profiles = pd.read_csv(cfg.output_dir / "profiles_x.csv")
    assert list(profiles.columns) == ["t", "x", "u"]
    assert len(profiles) == len(index["times"]) * SMALL_GRID["n"]
    assert profiles["u"].abs().max() == pytest.approx(0.5, abs=1e-2)


def test_semilinear_picard_run(tmp_path):
    cfg = make_config(tmp_path, "semilinear", solver="picard", picard={"n_slices": 16})
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    assert len(read_json(cfg.output_dir / "slices" / "index.json")["files"]) == 17


def test_metric_run(tmp_path):
    cfg = make_config(tmp_path, "metric", metric={"n_pairs": 2, "n_theta": 5}, time={"t_end": 0.02, "dt": 1e-3})
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    table = pd.read_csv(cfg.output_dir / "distances.csv")
    assert list(table.columns) == COMPARISON_COLUMNS
    assert len(table) == 2
    assert (cfg.output_dir / "growth.csv").exists()
    assert result.outcome.summary["flat_shift_cost"].I1 == pytest.approx(2.0, abs=1e-3)


def test_ch_run(tmp_path):
    cfg = make_config(tmp_path, "ch", time={"t_end": 0.02, "dt": 1e-3})
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    assert result.outcome.summary["E_drift"] < 1e-3
    assert list(pd.read_csv(cfg.output_dir / "energy_series.csv").columns) == ["t", "E"]


def test_single_peakon_has_no_collision(tmp_path):
    cfg = make_config(
        tmp_path, "concentration",
        initial_data={"kind": "peakons", "peakons": [[1.0, 0.0]]},
        window={"Y1": -1.0, "Y2": 1.0},
    )
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_NO_COLLISION
    assert read_json(cfg.output_dir / "events.json") == []
    assert (cfg.output_dir / "manifest.json").exists()


def test_near_breaking_data_stops_the_solver(tmp_path):
    cfg = make_config(
        tmp_path, "smooth",
        initial_data={"kind": "gaussian", "amp": 1.0, "width": 0.05},
        grid={"L": 2.0, "n": 1024},
        time={"t_end": 0.01, "dt": 5e-4},
    )
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_BLOWUP
    report = read_json(cfg.output_dir / "report.json")
    assert report["error"]


def test_characteristic_blowup_keeps_the_slices(tmp_path, monkeypatch):
    s0 = CharState.zeros(20.0, 64)
    slices = [s0, s0.replace(t=0.01)]

    def blow_up(*args, **kwargs):
        raise BlowupError(partial=slices, detail="non-finite characteristic step at t=0.010000")

    monkeypatch.setattr("src.cli.pipelines.integrate_characteristics", blow_up)
    cfg = make_config(tmp_path, "semilinear")
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_BLOWUP
    report = read_json(cfg.output_dir / "report.json")
    assert report["partial_frames"] == 2
    assert report["partial_file"] == "partial/index.json"
    index = read_json(cfg.output_dir / "partial" / "index.json")
    assert index["times"] == [0.0, 0.01]
    assert "partial/slice_00001.csv" in read_json(cfg.output_dir / "manifest.json")["files"]


def test_peakon_blowup_keeps_the_trajectory(tmp_path, monkeypatch):
    states = [PeakonState(0.0, [1.0, -0.5], [-0.5, 0.5]), PeakonState(0.1, [1.0, -0.5], [-0.4, 0.45])]

    def blow_up(*args, **kwargs):
        raise BlowupError(partial=states)

    monkeypatch.setattr("src.cli.pipelines.integrate_peakons", blow_up)
    cfg = make_config(tmp_path, "peakons", initial_data={"kind": "peakons", "peakons": [[1.0, -0.5], [-0.5, 0.5]]})
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_BLOWUP
    assert read_json(cfg.output_dir / "report.json")["partial_file"] == "partial.csv"
    frame = pd.read_csv(cfg.output_dir / "partial.csv")
    np.testing.assert_allclose(frame["q1"], [-0.5, -0.4])


def test_cfl_violation_is_a_config_error(tmp_path):
    cfg = make_config(tmp_path, "smooth", grid={"L": 2.0, "n": 1024}, time={"t_end": 0.01, "dt": 5e-2})
    assert run_experiment(cfg).exit_code == EXIT_CONFIG


@pytest.mark.slow
def test_two_peakon_concentration(tmp_path, peakon_pair):
    t_star, _ = detect_crossing(integrate_peakons(peakon_pair, 20.0, 1e-3))
    cfg = make_config(
        tmp_path, "concentration",
        initial_data={"kind": "peakons", "peakons": [[1.0, -0.5], [-0.5, 0.5]]},
        grid={"L": 20.0, "n": 1024},
        time={"t_end": round(1.1 * t_star, 3), "dt": 1e-3, "store_every": 100},
    )
    result = run_experiment(cfg)
    assert result.exit_code == EXIT_OK
    assert result.outcome.t_star is not None
    series = pd.read_csv(cfg.output_dir / "energy_series.csv")
    assert list(series.columns) == ["t", "E", "F", "E_win", "F_win", "L_win"]
    report = result.outcome.summary["report"]
    assert report.L_positive
    assert report.E_vanishes
    assert (cfg.output_dir / "profiles_x.csv").exists()


@pytest.mark.slow
def test_concentration_config_reruns_are_byte_identical(tmp_path):
    cfg = load_config(CONFIGS / "concentration.yml").model_copy(update={"output_dir": tmp_path / "run"})
    first = run_experiment(cfg)
    files = read_json(cfg.output_dir / "manifest.json")["files"]
    second = run_experiment(cfg)
    assert first.exit_code == second.exit_code == EXIT_OK
    assert read_json(cfg.output_dir / "manifest.json")["files"] == files
    assert {"events.json", "profiles_x.csv", "energy_series.csv"} <= set(files)
