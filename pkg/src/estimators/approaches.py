"""
Analytical Approaches Module for the Lord's Paradox Laboratory

This module implements the six ways of analysing an outcome measured at two
timepoints (change score, ANCOVA, g-computation of the controlled direct
effect, baseline-adjusted change score, follow-up only, g-computation of the
total effect), the summary-level difference-in-difference, and a positivity
check for the copies of the exposure.

Every contrast is boy versus girl. Analysis models recode the exposure to
0 = girl, 1 = boy so that coefficients are the contrasts themselves; on
natural-unit data they are in kilograms.
"""

import logging
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.estimators.ols import FitResult, ols
from src.scm.lords_dgp import BASELINE, CONFOUNDER, DIET, EXPOSURE, FOLLOW_UP, HALL
from src.scm.schema import Dataset
from src.utils.errors import EmptyGroupError, MissingColumnError

logger = logging.getLogger(__name__)

INTERACTION = f"{EXPOSURE}:{BASELINE}"
IDENTITY_TOLERANCE = 1e-8

APPROACH_FIELDS = ("approach1", "approach2", "gcomp_cde", "approach4", "approach5", "gcomp_tce")


class EstimateSet(BaseModel):
    """The six boy-vs-girl estimates from one dataset, in Table 1 order."""
    model_config = ConfigDict(frozen=True)

    approach1_kg: float
    approach2_kg: float
    gcomp_cde_kg: float
    approach4_kg: float
    approach5_kg: float
    gcomp_tce_kg: float

    @model_validator(mode="after")
    def check_identity(self):
        # Approach 4 is Approach 2 with Y0 subtracted from both sides
        if abs(self.approach4_kg - self.approach2_kg) > IDENTITY_TOLERANCE:
            raise ValueError(
                f"approach4 ({self.approach4_kg}) differs from approach2 ({self.approach2_kg})"
            )
        return self

    def values(self) -> Dict[str, float]:
        return {name: getattr(self, f"{name}_kg") for name in APPROACH_FIELDS}


def _require(ds: Dataset, columns: Iterable[str]) -> None:
    missing = [name for name in columns if name not in ds.names]
    if missing:
        raise MissingColumnError(missing)


def _boy(ds: Dataset) -> np.ndarray:
    """Exposure recoded to 0 = girl, 1 = boy (works for -1/+1 and 0/1 coding)."""
    return (ds.column(EXPOSURE) > 0).astype(float)


def _arms(boy: np.ndarray) -> Dict[int, np.ndarray]:
    arms = {1: boy == 1.0, 0: boy == 0.0}
    for arm, rows in arms.items():
        if not rows.any():
            raise EmptyGroupError(f"Exposure arm {'boys' if arm else 'girls'} has no rows")
    return arms


def approach1_change_score(ds: Dataset) -> float:
    """Approach 1: regress Y1 - Y0 on X; returns the X coefficient."""
    _require(ds, [EXPOSURE, BASELINE, FOLLOW_UP])
    change = ds.column(FOLLOW_UP) - ds.column(BASELINE)
    fit = ols(change, {EXPOSURE: _boy(ds)})
    return fit.coefficients[EXPOSURE]


def approach2_ancova(ds: Dataset, with_interaction: bool = False) -> FitResult:
    """
    Approach 2: regress Y1 on X and Y0 (ANCOVA), optionally with an X*Y0 term.

    The contrast is the X coefficient. With the interaction the X coefficient
    is the contrast at Y0 = 0.
    """
    _require(ds, [EXPOSURE, BASELINE, FOLLOW_UP])
    boy = _boy(ds)
    y0 = ds.column(BASELINE)
    design = {EXPOSURE: boy, BASELINE: y0}
    if with_interaction:
        design[INTERACTION] = boy * y0
    return ols(ds.column(FOLLOW_UP), design)


def approach4_change_adjusted(ds: Dataset) -> FitResult:
    """Approach 4: regress Y1 - Y0 on X and Y0."""
    _require(ds, [EXPOSURE, BASELINE, FOLLOW_UP])
    y0 = ds.column(BASELINE)
    return ols(ds.column(FOLLOW_UP) - y0, {EXPOSURE: _boy(ds), BASELINE: y0})


def approach5_follow_up(ds: Dataset) -> float:
    """Approach 5: regress Y1 on X alone."""
    _require(ds, [EXPOSURE, FOLLOW_UP])
    fit = ols(ds.column(FOLLOW_UP), {EXPOSURE: _boy(ds)})
    return fit.coefficients[EXPOSURE]


def _outcome_model(ds: Dataset, with_interaction: bool) -> FitResult:
    boy = _boy(ds)
    y0 = ds.column(BASELINE)
    design = {EXPOSURE: boy, BASELINE: y0, CONFOUNDER: ds.column(CONFOUNDER)}
    if with_interaction:
        design[INTERACTION] = boy * y0
    return ols(ds.column(FOLLOW_UP), design)


def _arm_mean(fit: FitResult, arm: int, y0: np.ndarray, m0: np.ndarray) -> float:
    x = np.full(m0.shape, float(arm))
    design = {EXPOSURE: x, BASELINE: y0, CONFOUNDER: m0}
    if INTERACTION in fit.coefficients:
        design[INTERACTION] = x * y0
    return float(np.mean(fit.predict(design)))


def gcomp_cde(ds: Dataset, y0_fixed: float, with_interaction: bool = False) -> float:
    """
    Controlled direct effect by the parametric g-formula.

    Fits Y1 ~ X + Y0 + M0, then for each arm predicts with X set to the arm,
    Y0 set to y0_fixed and M0 taken from the observed rows of that arm
    (an empirical average in place of a sum over a discrete M0).

    Args:
        ds: Dataset with X, M0, Y0, Y1
        y0_fixed: Value at which baseline weight is held, in the dataset's units
        with_interaction: Add an X*Y0 term to the outcome model

    Returns:
        E[Y1(X=1, Y0=y0)] - E[Y1(X=0, Y0=y0)]
    """
    _require(ds, [EXPOSURE, CONFOUNDER, BASELINE, FOLLOW_UP])
    arms = _arms(_boy(ds))
    fit = _outcome_model(ds, with_interaction)
    m0 = ds.column(CONFOUNDER)
    means = {}
    for arm, rows in arms.items():
        arm_m0 = m0[rows]
        means[arm] = _arm_mean(fit, arm, np.full(arm_m0.shape, float(y0_fixed)), arm_m0)
    return means[1] - means[0]


def gcomp_tce(ds: Dataset, with_interaction: bool = False) -> float:
    """
    Total causal effect by the parametric g-formula: predictions with X set per
    arm and (Y0, M0) drawn jointly from the observed rows of that arm.
    """
    _require(ds, [EXPOSURE, CONFOUNDER, BASELINE, FOLLOW_UP])
    arms = _arms(_boy(ds))
    fit = _outcome_model(ds, with_interaction)
    y0 = ds.column(BASELINE)
    m0 = ds.column(CONFOUNDER)
    means = {arm: _arm_mean(fit, arm, y0[rows], m0[rows]) for arm, rows in arms.items()}
    return means[1] - means[0]


def did_means(ds: Dataset) -> float:
    """Summary-level difference-in-difference of group means."""
    _require(ds, [EXPOSURE, BASELINE, FOLLOW_UP])
    arms = _arms(_boy(ds))
    y0 = ds.column(BASELINE)
    y1 = ds.column(FOLLOW_UP)
    change = {arm: float(np.mean(y1[rows]) - np.mean(y0[rows])) for arm, rows in arms.items()}
    return change[1] - change[0]


def estimate_all(ds: Dataset, y0_fixed_kg: float = 80.0) -> EstimateSet:
    """Run the six approaches on one dataset, in Table 1 order."""
    return EstimateSet(
        approach1_kg=approach1_change_score(ds),
        approach2_kg=approach2_ancova(ds).coefficients[EXPOSURE],
        gcomp_cde_kg=gcomp_cde(ds, y0_fixed_kg),
        approach4_kg=approach4_change_adjusted(ds).coefficients[EXPOSURE],
        approach5_kg=approach5_follow_up(ds),
        gcomp_tce_kg=gcomp_tce(ds),
    )


def check_positivity(
    ds: Dataset,
    exposure: str = EXPOSURE,
    candidates: Optional[Sequence[str]] = None,
) -> Dict[str, bool]:
    """
    Report which candidate columns are fully determined by the exposure.

    A candidate is determined when it is constant within every exposure arm;
    such a column can never vary independently of the exposure, so no model
    can separate its effect from the exposure's.
    """
    candidates = [c for c in (candidates or (HALL, DIET)) if c in ds.names]
    _require(ds, [exposure])
    x = ds.column(exposure)
    report = {}
    for name in candidates:
        values = ds.column(name)
        report[name] = all(np.ptp(values[x == level]) == 0.0 for level in np.unique(x))
        if report[name]:
            logger.info(f"Column {name!r} is fully determined by {exposure!r} (positivity violated)")
    return report
