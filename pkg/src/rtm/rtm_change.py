"""
Regression-to-the-Mean and Change Decomposition Module

Follow-up weight splits into an endogenous part carried from baseline
(slope beta1) and a residual part holding exogenous and random change
(weight beta2 = 1 - beta1). The change score subtracts all of Y0 rather than
beta1 * Y0, which leaves an extra -beta2 * Y0 term in every row. This module
estimates beta1, performs that split row by row and reports how much of a
change-score contrast the extra term accounts for.

Exogenous and random change cannot be separated with two waves; only their
beta2-weighted sum is reported.
"""

import json
import logging
import math
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from src.estimators.ols import ols
from src.scm.lords_dgp import BASELINE, EXPOSURE, FOLLOW_UP
from src.scm.schema import Dataset
from src.utils.errors import DegenerateDataError, EmptyGroupError, MissingColumnError

logger = logging.getLogger(__name__)

NO_BIAS = "no bias contribution"
CANCELLATION = "exact cancellation"
SIGN_REVERSAL = "sign reversal"
ATTENUATION = "attenuation"
AMPLIFICATION = "amplification"


class ChangeDecomposition(BaseModel):
    """Per-row split of the change score into residual change and bias term."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    beta1: float
    beta2: float
    residual_change: np.ndarray
    bias_term: np.ndarray

    @model_validator(mode="after")
    def check_weights(self):
        if abs(self.beta1 + self.beta2 - 1.0) > 1e-12:
            raise ValueError("beta1 + beta2 must equal 1")
        if self.residual_change.shape != self.bias_term.shape:
            raise ValueError("residual_change and bias_term must have the same length")
        return self

    @property
    def change_score(self) -> np.ndarray:
        return self.residual_change + self.bias_term


def _require(ds: Dataset, *columns: str) -> None:
    missing = [name for name in columns if name not in ds.names]
    if missing:
        raise MissingColumnError(missing)


def endogenous_slope(ds: Dataset, within_strata_of: Optional[str] = None) -> float:
    """
    Slope of Y1 on Y0, pooled within strata when a stratifying column is given.

    The pooled within-strata slope is the Y0 coefficient of the ANCOVA; both
    variables are demeaned inside each stratum before the regression.

    Args:
        ds: Dataset with Y0 and Y1
        within_strata_of: Optional column defining strata (usually the exposure)

    Returns:
        Estimated beta1

    Raises:
        DegenerateDataError: Y0 has no (within-strata) variance
    """
    _require(ds, BASELINE, FOLLOW_UP)
    frame = pd.DataFrame({"y0": ds.column(BASELINE), "y1": ds.column(FOLLOW_UP)})
    if within_strata_of is not None:
        _require(ds, within_strata_of)
        frame["stratum"] = ds.column(within_strata_of)
        grouped = frame.groupby("stratum")
        frame["y0"] = frame["y0"] - grouped["y0"].transform("mean")
        frame["y1"] = frame["y1"] - grouped["y1"].transform("mean")

    y0 = frame["y0"].to_numpy()
    if np.ptp(y0) == 0.0:
        raise DegenerateDataError("Baseline outcome has zero variance; slope is undefined")
    fit = ols(frame["y1"].to_numpy(), {BASELINE: y0})
    return fit.coefficients[BASELINE]


def decompose_change(ds: Dataset, beta1: float) -> ChangeDecomposition:
    """
    Split Y1 - Y0 into beta2 * (exogenous + random change) and the -beta2 * Y0 term.

    Y0 is mean-centered inside the bias term and the constant it drops is
    absorbed into the residual change, so the two parts add back to the
    change score exactly for any beta1.
    """
    if not math.isfinite(beta1):
        raise DegenerateDataError(f"beta1 must be finite, got {beta1}")
    _require(ds, BASELINE, FOLLOW_UP)
    y0 = ds.column(BASELINE)
    y1 = ds.column(FOLLOW_UP)
    beta2 = 1.0 - beta1
    y0_mean = float(np.mean(y0))
    residual_change = y1 - beta1 * y0 - beta2 * y0_mean
    bias_term = -beta2 * (y0 - y0_mean)
    return ChangeDecomposition(beta1=beta1, beta2=beta2, residual_change=residual_change, bias_term=bias_term)


def _contrast(values: np.ndarray, boy: np.ndarray) -> float:
    return float(np.mean(values[boy]) - np.mean(values[~boy]))


def biasing_term_report(ds: Dataset, beta1: Optional[float] = None) -> Dict[str, Any]:
    """
    Diagnose how the -beta2 * Y0 term shapes a change-score contrast.

    Args:
        ds: Dataset with X, Y0 and Y1
        beta1: Endogenous slope to use; defaults to the within-sex slope

    Returns:
        Dictionary with corr_x_y0, beta1, beta2, the bias, residual and
        change-score contrasts, the masking flag and a diagnosis string
    """
    _require(ds, EXPOSURE, BASELINE, FOLLOW_UP)
    x = ds.column(EXPOSURE)
    boy = x > 0
    if boy.all() or not boy.any():
        raise EmptyGroupError("Both exposure groups must be present")

    if beta1 is None:
        beta1 = endogenous_slope(ds, within_strata_of=EXPOSURE)
    parts = decompose_change(ds, beta1)
    y0 = ds.column(BASELINE)
    y1 = ds.column(FOLLOW_UP)

    corr = float(np.corrcoef(x, y0)[0, 1])
    bias = _contrast(parts.bias_term, boy)
    residual = _contrast(parts.residual_change, boy)
    change = bias + residual
    change_fit = ols(y1 - y0, {EXPOSURE: boy.astype(float)})
    change_se = change_fit.standard_errors[EXPOSURE]

    if abs(corr) <= 3.0 / math.sqrt(ds.n):
        diagnosis = NO_BIAS
    elif abs(change) <= 3.0 * change_se:
        diagnosis = CANCELLATION
    elif math.copysign(1.0, change) != math.copysign(1.0, residual):
        diagnosis = SIGN_REVERSAL
    elif abs(change) < abs(residual):
        diagnosis = ATTENUATION
    else:
        diagnosis = AMPLIFICATION

    report = {
        "corr_x_y0": corr,
        "beta1": parts.beta1,
        "beta2": parts.beta2,
        "bias_contrast_kg": bias,
        "residual_contrast_kg": residual,
        "change_score_contrast_kg": change,
        "change_score_se_kg": change_se,
        "y0_contrast_kg": _contrast(y0, boy),
        "y1_contrast_kg": _contrast(y1, boy),
        "masked": abs(bias) >= abs(residual),
        "diagnosis": diagnosis,
    }
    logger.info(f"Biasing term diagnosis: {diagnosis} (bias {bias:.2f} kg, residual {residual:.2f} kg)")
    return report


def report_to_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2)
