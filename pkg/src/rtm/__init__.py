"""
Regression-to-the-mean package: endogenous slope and change decomposition.
"""

from .rtm_change import (
    ChangeDecomposition,
    biasing_term_report,
    decompose_change,
    endogenous_slope,
    report_to_json,
)

__all__ = ['ChangeDecomposition', 'biasing_term_report', 'decompose_change', 'endogenous_slope', 'report_to_json']
