"""
Monte Carlo Harness Module for the Lord's Paradox Laboratory

This module runs seeded replications of simulate -> rescale -> estimate,
summarizes the estimates as medians with 2.5th/97.5th centiles, compares the
precision of change-score and ANCOVA estimates, and studies the error of the
simple difference-in-difference.

Replication r always uses child_seed(master_seed, r), and results are
assembled in replication order, so output does not depend on the number of
worker processes.
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from tqdm import tqdm

from src.estimators.approaches import (
    APPROACH_FIELDS,
    EstimateSet,
    approach1_change_score,
    approach2_ancova,
    did_means,
    estimate_all,
)
from src.scm.lords_dgp import BASELINE, EXPOSURE, GroundTruth, ground_truth
from src.scm.schema import Dataset, ScmSpec
from src.scm.scm_core import simulate, to_natural_units, validate_scm
from src.utils.errors import EmptyGroupError, ReplicationError
from src.utils.rng import child_seed

logger = logging.getLogger(__name__)

T = TypeVar("T")

DESK_REPLICATIONS = 1000
CENTILES = (2.5, 50.0, 97.5)


class McConfig(BaseModel):
    """What to simulate and how often. Execution details (workers) live elsewhere."""
    model_config = ConfigDict(frozen=True)

    spec: ScmSpec
    replications: int = DESK_REPLICATIONS
    n_per_replication: int = 10000
    master_seed: int = 0
    y0_fixed_kg: float = 80.0

    @field_validator("replications")
    @classmethod
    def validate_replications(cls, v):
        if v < 1:
            raise ValueError("replications must be at least 1")
        return v

    @field_validator("n_per_replication")
    @classmethod
    def validate_n(cls, v):
        if v < 10:
            raise ValueError("n_per_replication must be at least 10")
        return v

    @field_validator("master_seed")
    @classmethod
    def validate_seed(cls, v):
        if v < 0 or v >= 1 << 64:
            raise ValueError("master_seed must be a non-negative 64-bit integer")
        return v

    def echo(self) -> Dict[str, Any]:
        return {
            "replications": self.replications,
            "n_per_replication": self.n_per_replication,
            "master_seed": self.master_seed,
            "y0_fixed_kg": self.y0_fixed_kg,
            "nodes": [node.name for node in self.spec.nodes],
        }


class ApproachSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    median_kg: float
    lo_kg: float
    hi_kg: float
    mean_kg: float
    sd_kg: float

    @model_validator(mode="after")
    def check_order(self):
        if not self.lo_kg <= self.median_kg <= self.hi_kg:
            raise ValueError("centiles must satisfy lo <= median <= hi")
        return self


class SummaryTable(BaseModel):
    """Per-approach summaries across replications (the Table 1 analogue)."""
    model_config = ConfigDict(frozen=True)

    approaches: Dict[str, ApproachSummary]
    replications: int
    config: Dict[str, Any] = Field(default_factory=dict)
    ground_truth: Optional[GroundTruth] = None
    elapsed_seconds: Optional[float] = None


def _dataset(spec: ScmSpec, n: int, master_seed: int, replication: int) -> Dataset:
    seed = child_seed(master_seed, replication)
    return to_natural_units(simulate(spec, n, seed), spec)


def _replicate(cfg: McConfig, task: Callable[[Dataset, McConfig], T], replication: int) -> T:
    try:
        ds = _dataset(cfg.spec, cfg.n_per_replication, cfg.master_seed, replication)
        return task(ds, cfg)
    except Exception as e:
        raise ReplicationError(replication, e) from e


def _map_replications(
    cfg: McConfig,
    task: Callable[[Dataset, McConfig], T],
    workers: int = 1,
    progress: bool = False,
    label: str = "replications",
) -> List[T]:
    validated = cfg.model_copy(update={"spec": validate_scm(cfg.spec)})
    job = partial(_replicate, validated, task)
    indices = range(validated.replications)
    logger.info(
        f"Running {validated.replications} {label} of n={validated.n_per_replication} "
        f"with {workers} worker(s), master seed {validated.master_seed}"
    )

    if workers <= 1:
        iterator = map(job, indices)
        return list(tqdm(iterator, total=validated.replications, desc=label, disable=not progress))

    chunksize = max(1, validated.replications // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        # map yields in submission order regardless of which worker finishes first
        iterator = executor.map(job, indices, chunksize=chunksize)
        return list(tqdm(iterator, total=validated.replications, desc=label, disable=not progress))


def _estimate_task(ds: Dataset, cfg: McConfig) -> EstimateSet:
    return estimate_all(ds, cfg.y0_fixed_kg)


def run_replications(cfg: McConfig, workers: int = 1, progress: bool = False) -> List[EstimateSet]:
    """
    Run the six approaches on cfg.replications simulated datasets.

    Args:
        cfg: Monte Carlo configuration
        workers: Number of worker processes (1 runs in-process)
        progress: Show a tqdm progress bar

    Returns:
        One EstimateSet per replication, in replication order

    Raises:
        ReplicationError: An estimator failed; carries the replication index
    """
    start = time.perf_counter()
    estimates = _map_replications(cfg, _estimate_task, workers, progress)
    logger.info(f"Finished {len(estimates)} replications in {time.perf_counter() - start:.1f}s")
    return estimates


def _centiles(values: np.ndarray) -> ApproachSummary:
    lo, median, hi = np.percentile(values, CENTILES, method="linear")
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return ApproachSummary(
        median_kg=float(median),
        lo_kg=float(lo),
        hi_kg=float(hi),
        mean_kg=float(np.mean(values)),
        sd_kg=sd,
    )


def summarize(
    estimates: Sequence[EstimateSet],
    cfg: Optional[McConfig] = None,
    elapsed_seconds: Optional[float] = None,
) -> SummaryTable:
    """
    Median and 2.5th/97.5th centiles per approach (linear interpolation
    between order statistics), plus mean and sd.

    Raises:
        EmptyGroupError: No estimates were supplied
    """
    if not estimates:
        raise EmptyGroupError("Cannot summarize an empty list of estimates")
    frame = pd.DataFrame([e.values() for e in estimates], columns=list(APPROACH_FIELDS))
    approaches = {name: _centiles(frame[name].to_numpy()) for name in APPROACH_FIELDS}
    return SummaryTable(
        approaches=approaches,
        replications=len(estimates),
        config=cfg.echo() if cfg else {},
        ground_truth=ground_truth(cfg.spec) if cfg else None,
        elapsed_seconds=elapsed_seconds,
    )


def compare_precision(estimates: Sequence[EstimateSet]) -> Dict[str, Any]:
    """
    Compare the spread of change-score (approach 1) and ANCOVA (approach 2)
    estimates across replications.
    """
    if len(estimates) < 2:
        raise EmptyGroupError("Need at least two replications to compare precision")
    change = np.array([e.approach1_kg for e in estimates])
    ancova = np.array([e.approach2_kg for e in estimates])
    sd_change = float(np.std(change, ddof=1))
    sd_ancova = float(np.std(ancova, ddof=1))
    return {
        "replications": len(estimates),
        "change_score_median_kg": float(np.median(change)),
        "ancova_median_kg": float(np.median(ancova)),
        "change_score_sd_kg": sd_change,
        "ancova_sd_kg": sd_ancova,
        "variance_ratio": (sd_change / sd_ancova) ** 2 if sd_ancova > 0 else float("inf"),
        "ancova_more_precise": sd_ancova < sd_change,
    }


def _box1_task(ds: Dataset, cfg: McConfig) -> Dict[str, float]:
    boy = ds.column(EXPOSURE) > 0
    y0 = ds.column(BASELINE)
    return {
        "y0_imbalance_kg": float(np.mean(y0[boy]) - np.mean(y0[~boy])),
        "did_kg": did_means(ds),
        "change_score_kg": approach1_change_score(ds),
        "ancova_kg": approach2_ancova(ds).coefficients[EXPOSURE],
    }


def box1_study(cfg: McConfig, truth_kg: float, workers: int = 1, progress: bool = False) -> Dict[str, Any]:
    """
    Error of the simple difference-in-difference versus ANCOVA across replications.

    Under random change any chance baseline imbalance leaks into the DiD
    estimate through the -beta2 * Y0 term, so DiD error tracks the imbalance
    while ANCOVA removes it.

    Args:
        cfg: Monte Carlo configuration (usually the randomized model)
        truth_kg: True contrast the estimators should recover
        workers: Worker processes
        progress: Show a progress bar

    Returns:
        Summary dictionary with RMSEs, the error/imbalance correlation and
        the largest DiD vs change-score discrepancy
    """
    rows = pd.DataFrame(_map_replications(cfg, _box1_task, workers, progress, label="box1 replications"))
    did_error = rows["did_kg"] - truth_kg
    ancova_error = rows["ancova_kg"] - truth_kg
    correlation = float("nan")
    if len(rows) > 1 and rows["y0_imbalance_kg"].std() > 0 and did_error.std() > 0:
        correlation = float(np.corrcoef(did_error, rows["y0_imbalance_kg"])[0, 1])
    return {
        "replications": len(rows),
        "n_per_replication": cfg.n_per_replication,
        "truth_kg": truth_kg,
        "did_median_kg": float(rows["did_kg"].median()),
        "ancova_median_kg": float(rows["ancova_kg"].median()),
        "did_rmse_kg": float(np.sqrt(np.mean(did_error ** 2))),
        "ancova_rmse_kg": float(np.sqrt(np.mean(ancova_error ** 2))),
        "corr_did_error_y0_imbalance": correlation,
        "max_abs_did_minus_change_score_kg": float((rows["did_kg"] - rows["change_score_kg"]).abs().max()),
    }


def write_estimates_csv(estimates: Sequence[EstimateSet], path: Union[str, Path]) -> None:
    """One row per replication: rep,approach1,...,gcomp_tce in kg with 4 decimals."""
    frame = pd.DataFrame([e.values() for e in estimates], columns=list(APPROACH_FIELDS))
    frame.insert(0, "rep", range(len(estimates)))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.4f")
    logger.info(f"Wrote {len(estimates)} estimate rows to {path}")


def summary_to_json(summary: SummaryTable) -> str:
    """Deterministic JSON; elapsed time is left out so reruns are byte-identical."""
    document = summary.model_dump(mode="json", exclude={"elapsed_seconds"})
    return json.dumps(document, indent=2) + "\n"


def write_summary_json(summary: SummaryTable, path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(summary_to_json(summary))
    logger.info(f"Wrote summary to {path}")
