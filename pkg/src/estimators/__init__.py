"""
Estimators package: least squares and the six analytical approaches.
"""

from .ols import FitResult, ols
from .approaches import (
    APPROACH_FIELDS,
    EstimateSet,
    approach1_change_score,
    approach2_ancova,
    approach4_change_adjusted,
    approach5_follow_up,
    check_positivity,
    did_means,
    estimate_all,
    gcomp_cde,
    gcomp_tce,
)

__all__ = [
    'FitResult', 'ols', 'APPROACH_FIELDS', 'EstimateSet',
    'approach1_change_score', 'approach2_ancova', 'approach4_change_adjusted',
    'approach5_follow_up', 'check_positivity', 'did_means', 'estimate_all',
    'gcomp_cde', 'gcomp_tce',
]
