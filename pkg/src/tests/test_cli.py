"""
Tests for the command-line interface.

Each test runs src.main.main() in-process with small sizes and an output
directory under tmp_path, then checks exit codes and the files written.
"""

import json

import pandas as pd
import pytest

from src.main import EXIT_ESTIMATOR, EXIT_OK, EXIT_VALIDATION, main
from src.utils.config import SEED_ENV


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (SEED_ENV, "LORDS_LAB_CONFIG", "LORDS_LAB_WORKERS", "LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def run(command, out, *extra):
    return main([command, "--out", str(out), "--workers", "1", "--quiet", *extra])


def test_simulate(output_dir):
    assert run("simulate", output_dir, "--n", "200", "--seed", "3") == EXIT_OK
    frame = pd.read_csv(output_dir / "dataset.csv")
    assert list(frame.columns) == ["X", "M0", "Y0", "Y1", "Hall", "Diet", "dY"]
    assert len(frame) == 200


def test_estimate_from_csv(output_dir):
    run("simulate", output_dir, "--n", "500", "--seed", "3")
    code = run("estimate", output_dir, "--input", str(output_dir / "dataset.csv"))
    assert code == EXIT_OK
    frame = pd.read_csv(output_dir / "estimates.csv")
    assert len(frame) == 1
    assert frame.loc[0, "approach4"] == pytest.approx(frame.loc[0, "approach2"], abs=1e-4)
    positivity = json.loads((output_dir / "positivity.json").read_text())
    assert positivity == {"Hall": True, "Diet": True}


def test_reproduce_table1_writes_every_artifact(output_dir):
    code = run("reproduce-table1", output_dir, "--reps", "3", "--n", "300", "--seed", "1", "--format", "all")
    assert code == EXIT_OK
    for name in ("estimates.csv", "summary.json", "ground_truth.json", "table1.md", "table1.csv", "table1.json"):
        assert (output_dir / name).exists(), name
    truth = json.loads((output_dir / "ground_truth.json").read_text())
    assert truth["cde_kg"] == pytest.approx(5.0)


def test_pipeline_is_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert run("reproduce-table1", first, "--reps", "4", "--n", "300", "--seed", "11") == EXIT_OK
    assert main(["reproduce-table1", "--out", str(second), "--workers", "2", "--quiet",
                 "--reps", "4", "--n", "300", "--seed", "11"]) == EXIT_OK
    for name in ("estimates.csv", "summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_figure3_is_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert run("figure3", first, "--n", "400", "--seed", "5") == EXIT_OK
    assert run("figure3", second, "--n", "400", "--seed", "5") == EXIT_OK
    assert (first / "figure3.svg").read_bytes() == (second / "figure3.svg").read_bytes()
    assert (first / "figure3_ellipses.csv").exists()


def test_figure3_svg_only(output_dir):
    run("figure3", output_dir, "--n", "400", "--no-csv")
    assert sorted(p.name for p in output_dir.iterdir()) == ["figure3.svg"]


def test_rtm_report(output_dir):
    assert run("rtm-report", output_dir, "--n", "2000", "--beta1", "0.58") == EXIT_OK
    report = json.loads((output_dir / "rtm_report.json").read_text())
    assert report["beta1"] == 0.58
    assert report["diagnosis"]


def test_did_demo(output_dir):
    assert run("did-demo", output_dir, "--reps", "3", "--n", "300") == EXIT_OK
    report = json.loads((output_dir / "did_report.json").read_text())
    assert report["equivalence"]["abs_difference_kg"] < 1e-8
    assert report["randomized_study"]["truth_kg"] == pytest.approx(7.0)


def test_power(output_dir):
    assert run("power", output_dir, "--reps", "5", "--n", "300") == EXIT_OK
    report = json.loads((output_dir / "precision.json").read_text())
    assert report["replications"] == 5
    assert report["truth_kg"] == pytest.approx(7.0)


def test_environment_seed_wins(tmp_path, monkeypatch):
    run("simulate", tmp_path / "flag", "--n", "100", "--seed", "5")
    monkeypatch.setenv(SEED_ENV, "5")
    run("simulate", tmp_path / "env", "--n", "100", "--seed", "999")
    assert (tmp_path / "flag" / "dataset.csv").read_bytes() == (tmp_path / "env" / "dataset.csv").read_bytes()


def test_invalid_model_exits_with_validation_code(output_dir, tmp_path):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({"nodes": [
        {"name": "A", "kind": "linear_gaussian", "parents": ["B"], "coefficients": [0.5], "noise_sd": 1.0},
        {"name": "B", "kind": "linear_gaussian", "parents": ["A"], "coefficients": [0.5], "noise_sd": 1.0},
    ]}))
    assert run("simulate", output_dir, "--model", str(model), "--n", "10") == EXIT_VALIDATION


def test_invalid_replication_count(output_dir):
    assert run("reproduce-table1", output_dir, "--reps", "0", "--n", "300") == EXIT_VALIDATION


def test_estimator_error_exit_code(output_dir, tmp_path):
    data = tmp_path / "no_m0.csv"
    pd.DataFrame({"X": [-1, 1] * 10, "Y0": range(20), "Y1": range(5, 25)}).to_csv(data, index=False)
    assert run("estimate", output_dir, "--input", str(data)) == EXIT_ESTIMATOR
