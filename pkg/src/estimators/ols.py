"""
Ordinary least squares engine.

Fits y on an intercept plus named regressors and reports coefficients,
classical standard errors (residual variance times the diagonal of the
inverse normal matrix) and the residual variance.
"""

import logging
from itertools import combinations
from typing import Dict, List, Mapping, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.utils.errors import PositivityViolationError, SingularDesignError

logger = logging.getLogger(__name__)

INTERCEPT = "intercept"


class FitResult(BaseModel):
    """Least-squares output keyed by term name."""
    model_config = ConfigDict(frozen=True)

    coefficients: Dict[str, float]
    standard_errors: Dict[str, float]
    residual_variance: float
    n: int

    @model_validator(mode="after")
    def check_consistency(self):
        if set(self.coefficients) != set(self.standard_errors):
            raise ValueError("coefficients and standard_errors must share the same terms")
        if self.residual_variance < 0:
            raise ValueError("residual_variance must be non-negative")
        if self.n <= len(self.coefficients):
            raise ValueError("n must exceed the number of terms")
        return self

    @property
    def terms(self) -> List[str]:
        return list(self.coefficients)

    def predict(self, design: Mapping[str, np.ndarray]) -> np.ndarray:
        """Linear predictor for new regressor values (intercept implied)."""
        prediction = self.coefficients.get(INTERCEPT, 0.0)
        for term, coef in self.coefficients.items():
            if term == INTERCEPT:
                continue
            prediction = prediction + coef * np.asarray(design[term], dtype=float)
        return prediction


def _collinear_pairs(names: List[str], columns: np.ndarray) -> List[Tuple[str, str]]:
    pairs = []
    for i, j in combinations(range(len(names)), 2):
        a, b = columns[:, i], columns[:, j]
        if np.std(a) == 0 or np.std(b) == 0:
            continue
        if abs(abs(np.corrcoef(a, b)[0, 1]) - 1.0) < 1e-12:
            pairs.append((names[i], names[j]))
    return pairs


def ols(y: np.ndarray, design: Mapping[str, np.ndarray], intercept: bool = True) -> FitResult:
    """
    Fit y on the named regressors by least squares.

    Args:
        y: Outcome vector of length n
        design: Mapping of term name to regressor vector (no intercept column)
        intercept: Whether to add an intercept term

    Returns:
        FitResult with one entry per term, intercept first

    Raises:
        SingularDesignError: Design is rank deficient or n <= number of terms
        PositivityViolationError: Rank deficiency caused by regressors that
            are exact copies (up to an affine map) of each other
    """
    y = np.asarray(y, dtype=float)
    names = list(design)
    regressors = [np.asarray(design[name], dtype=float) for name in names]
    for name, column in zip(names, regressors):
        if column.shape != y.shape:
            raise SingularDesignError(f"Regressor {name!r} has length {column.shape[0]}, outcome has {y.shape[0]}")

    if intercept:
        names = [INTERCEPT] + names
        regressors = [np.ones_like(y)] + regressors
    if not regressors:
        raise SingularDesignError("Design has no columns")

    matrix = np.column_stack(regressors)
    n, k = matrix.shape
    if n <= k:
        raise SingularDesignError(f"Need more observations ({n}) than terms ({k})")

    beta, _, rank, _ = np.linalg.lstsq(matrix, y, rcond=None)
    if rank < k:
        offset = 1 if intercept else 0
        pairs = _collinear_pairs(names[offset:], matrix[:, offset:])
        if pairs:
            raise PositivityViolationError(sorted({name for pair in pairs for name in pair}))
        raise SingularDesignError(f"Design matrix has rank {rank} < {k} terms ({', '.join(names)})")

    residuals = y - matrix @ beta
    residual_variance = float(residuals @ residuals) / (n - k)
    normal_inverse = np.linalg.inv(matrix.T @ matrix)
    se = np.sqrt(np.clip(residual_variance * np.diag(normal_inverse), 0.0, None))

    return FitResult(
        coefficients={name: float(b) for name, b in zip(names, beta)},
        standard_errors={name: float(s) for name, s in zip(names, se)},
        residual_variance=residual_variance,
        n=n,
    )
