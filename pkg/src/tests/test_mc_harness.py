"""
Tests for the Monte Carlo harness.

Small configurations run by default. The desk-scale Table 1 reproduction,
the randomized precision study and the interval convergence check are marked
slow.
"""

import json
import pickle

import numpy as np
import pandas as pd
import pytest

from src.estimators import EstimateSet
from src.services.simulation import (
    McConfig,
    box1_study,
    compare_precision,
    run_replications,
    summarize,
    summary_to_json,
    write_estimates_csv,
    write_summary_json,
)
from src.services.simulation.mc_harness import _map_replications
from src.utils.errors import EmptyGroupError, EstimatorError, ReplicationError
from src.utils.rng import child_seed

TABLE1_MEDIANS = {
    "approach1": 0.0, "approach2": 4.2, "gcomp_cde": 5.0,
    "approach4": 4.2, "approach5": 10.0, "gcomp_tce": 10.0,
}
TABLE1_INTERVALS = {
    "approach1": (-0.3, 0.3), "approach2": (3.9, 4.5), "gcomp_cde": (4.7, 5.3),
    "approach4": (3.9, 4.5), "approach5": (9.7, 10.4), "gcomp_tce": (9.7, 10.4),
}


@pytest.fixture
def small_config(paper_spec):
    return McConfig(spec=paper_spec, replications=12, n_per_replication=400, master_seed=123)


def test_child_seed():
    assert child_seed(5, 0) == child_seed(5, 0)
    assert len({child_seed(5, r) for r in range(100)}) == 100
    assert child_seed(5, 1) != child_seed(6, 1)
    assert 0 <= child_seed(5, 3) < 2 ** 64
    with pytest.raises(ValueError):
        child_seed(-1, 0)


def test_config_validation(paper_spec):
    with pytest.raises(ValueError):
        McConfig(spec=paper_spec, replications=0)
    with pytest.raises(ValueError):
        McConfig(spec=paper_spec, n_per_replication=5)
    with pytest.raises(ValueError):
        McConfig(spec=paper_spec, master_seed=-3)


def test_replications_are_reproducible(small_config):
    first = run_replications(small_config)
    second = run_replications(small_config)
    assert len(first) == small_config.replications
    assert [e.values() for e in first] == [e.values() for e in second]


def test_worker_count_does_not_change_results(small_config):
    serial = run_replications(small_config, workers=1)
    parallel = run_replications(small_config, workers=2)
    assert [e.values() for e in serial] == [e.values() for e in parallel]


def test_summarize(small_config):
    estimates = run_replications(small_config)
    summary = summarize(estimates, small_config, elapsed_seconds=1.5)
    assert list(summary.approaches) == list(TABLE1_MEDIANS)
    assert summary.replications == small_config.replications
    assert summary.ground_truth.tce_kg == pytest.approx(10.0)
    values = np.array([e.approach5_kg for e in estimates])
    stats = summary.approaches["approach5"]
    assert stats.median_kg == pytest.approx(np.median(values))
    assert stats.lo_kg <= stats.median_kg <= stats.hi_kg
    assert stats.sd_kg == pytest.approx(np.std(values, ddof=1))


def test_summarize_without_estimates():
    with pytest.raises(EmptyGroupError):
        summarize([])


def test_summary_json_is_deterministic(small_config):
    estimates = run_replications(small_config)
    first = summary_to_json(summarize(estimates, small_config, elapsed_seconds=1.0))
    second = summary_to_json(summarize(estimates, small_config, elapsed_seconds=9.0))
    assert first == second
    document = json.loads(first)
    assert "elapsed_seconds" not in document
    assert document["config"]["master_seed"] == 123


def test_writers(small_config, output_dir):
    estimates = run_replications(small_config)
    write_estimates_csv(estimates, output_dir / "estimates.csv")
    write_summary_json(summarize(estimates, small_config), output_dir / "summary.json")
    frame = pd.read_csv(output_dir / "estimates.csv")
    assert list(frame.columns) == ["rep"] + list(TABLE1_MEDIANS)
    assert frame["rep"].tolist() == list(range(small_config.replications))
    assert (output_dir / "summary.json").read_text().endswith("\n")


def test_compare_precision_requires_two_replications():
    single = [EstimateSet(
        approach1_kg=0.0, approach2_kg=4.2, gcomp_cde_kg=5.0,
        approach4_kg=4.2, approach5_kg=10.0, gcomp_tce_kg=10.0,
    )]
    with pytest.raises(EmptyGroupError):
        compare_precision(single)


def test_compare_precision_report(randomized_spec):
    cfg = McConfig(spec=randomized_spec, replications=30, n_per_replication=1000, master_seed=9)
    report = compare_precision(run_replications(cfg))
    assert report["replications"] == 30
    assert report["variance_ratio"] == pytest.approx(
        (report["change_score_sd_kg"] / report["ancova_sd_kg"]) ** 2
    )


def test_box1_study(randomized_spec):
    cfg = McConfig(spec=randomized_spec, replications=20, n_per_replication=500, master_seed=4)
    report = box1_study(cfg, truth_kg=7.0)
    assert report["replications"] == 20
    assert report["max_abs_did_minus_change_score_kg"] < 1e-8
    assert report["did_rmse_kg"] > 0.0


def _failing_task(ds, cfg):
    raise EmptyGroupError("no rows")


def test_replication_errors_carry_the_index(small_config):
    with pytest.raises(ReplicationError) as excinfo:
        _map_replications(small_config, _failing_task)
    assert excinfo.value.replication == 0
    assert isinstance(excinfo.value.cause, EmptyGroupError)


def test_replication_error_pickles():
    error = ReplicationError(7, EmptyGroupError("no rows"))
    restored = pickle.loads(pickle.dumps(error))
    assert restored.replication == 7
    assert isinstance(restored.cause, EstimatorError)
    assert "no rows" in str(restored)


@pytest.mark.slow
def test_desk_scale_table1(paper_spec):
    cfg = McConfig(spec=paper_spec, replications=1000, n_per_replication=10000, master_seed=20230101)
    summary = summarize(run_replications(cfg, workers=4), cfg)
    for name, median in TABLE1_MEDIANS.items():
        stats = summary.approaches[name]
        lo, hi = TABLE1_INTERVALS[name]
        assert stats.median_kg == pytest.approx(median, abs=0.1)
        assert stats.lo_kg == pytest.approx(lo, abs=0.1)
        assert stats.hi_kg == pytest.approx(hi, abs=0.1)


@pytest.mark.slow
def test_randomized_precision(randomized_spec):
    cfg = McConfig(spec=randomized_spec, replications=500, n_per_replication=10000, master_seed=77)
    estimates = run_replications(cfg, workers=4)
    summary = summarize(estimates, cfg)
    assert summary.approaches["approach1"].median_kg == pytest.approx(7.0, abs=0.1)
    assert summary.approaches["approach2"].median_kg == pytest.approx(7.0, abs=0.1)
    report = compare_precision(estimates)
    assert report["ancova_sd_kg"] < report["change_score_sd_kg"]
    assert report["ancova_more_precise"] is True


@pytest.mark.slow
def test_interval_width_shrinks_with_root_n(paper_spec):
    """Quadrupling n halves every simulation interval, within 15%."""
    widths = {}
    for n in (2_500, 10_000, 40_000):
        cfg = McConfig(spec=paper_spec, replications=1000, n_per_replication=n, master_seed=20230101)
        summary = summarize(run_replications(cfg, workers=4), cfg)
        widths[n] = {name: s.hi_kg - s.lo_kg for name, s in summary.approaches.items()}

    for name, reference in widths[10_000].items():
        assert widths[2_500][name] / 2.0 == pytest.approx(reference, rel=0.15)
        assert widths[40_000][name] * 2.0 == pytest.approx(reference, rel=0.15)
