"""
Monte Carlo simulation service.
"""

from .mc_harness import (
    DESK_REPLICATIONS,
    ApproachSummary,
    McConfig,
    SummaryTable,
    box1_study,
    compare_precision,
    run_replications,
    summarize,
    summary_to_json,
    write_estimates_csv,
    write_summary_json,
)

__all__ = [
    'DESK_REPLICATIONS', 'ApproachSummary', 'McConfig', 'SummaryTable',
    'box1_study', 'compare_precision', 'run_replications', 'summarize', 'summary_to_json',
    'write_estimates_csv', 'write_summary_json',
]
