"""
Table 1 Module for the six analytical approaches.

Turns a SummaryTable into the Table 1 analogue: one row per approach in
fixed order, with the implied estimand, the value simulated by the model
(the path-tracing ground truth) and the value estimated across replications.
"""

import io
import json
import logging
from typing import Any, Dict, List, Literal, Optional

import pandas as pd

from src.estimators.approaches import APPROACH_FIELDS
from src.services.simulation.mc_harness import SummaryTable
from src.utils.template_utils import format_kg, render_template

logger = logging.getLogger(__name__)

TableFormat = Literal["markdown", "csv", "json"]
TABLE_FORMATS = ("markdown", "csv", "json")
FILE_SUFFIX = {"markdown": "md", "csv": "csv", "json": "json"}

OBSCURE = "Obscure when X and Y0 are correlated"
CONTROLLED_DIRECT = "Controlled direct causal effect of X on Y1"
TOTAL = "Total causal effect of X on Y1"

# (approach, description, model, estimand, ground-truth attribute)
ROWS = (
    ("approach1", "Change-score analysis", "Y1 - Y0 = a0 + a1*X", OBSCURE, None),
    ("approach2", "Follow-up conditional on baseline (ANCOVA)", "Y1 = b0 + b1*X + b2*Y0", CONTROLLED_DIRECT, "cde_kg"),
    (
        "gcomp_cde",
        "Parametric g-computation, baseline held fixed",
        "E[Y1(X=1, Y0=y0)] - E[Y1(X=0, Y0=y0)]",
        CONTROLLED_DIRECT,
        "cde_kg",
    ),
    ("approach4", "Change-score conditional on baseline", "Y1 - Y0 = c0 + c1*X + c2*Y0", CONTROLLED_DIRECT, "cde_kg"),
    ("approach5", "Follow-up unconditional on baseline", "Y1 = d0 + d1*X", TOTAL, "tce_kg"),
    ("gcomp_tce", "Parametric g-computation", "E[Y1(X=1)] - E[Y1(X=0)]", TOTAL, "tce_kg"),
)


def table1_rows(summary: SummaryTable) -> List[Dict[str, Any]]:
    """
    Full-precision Table 1 rows in fixed approach order.

    Args:
        summary: Replication summary, normally carrying the ground truth

    Returns:
        List of row dictionaries
    """
    rows = []
    for index, (approach, description, model, estimand, truth_field) in enumerate(ROWS, start=1):
        stats = summary.approaches[approach]
        simulated: Optional[float] = None
        if truth_field is not None and summary.ground_truth is not None:
            simulated = getattr(summary.ground_truth, truth_field)
        rows.append({
            "row": index,
            "approach": approach,
            "description": description,
            "model": model,
            "estimand": estimand,
            "value_simulated_kg": simulated,
            "median_kg": stats.median_kg,
            "lo_kg": stats.lo_kg,
            "hi_kg": stats.hi_kg,
        })
    return rows


def estimate_cell(row: Dict[str, Any]) -> str:
    """Human-readable "median (lo, hi)" at 1 decimal."""
    return f"{format_kg(row['median_kg'])} ({format_kg(row['lo_kg'])}, {format_kg(row['hi_kg'])})"


def emit_table1(summary: SummaryTable, format: TableFormat = "markdown") -> str:
    """
    Render the Table 1 analogue.

    Args:
        summary: Replication summary
        format: markdown (1 decimal), csv or json (full precision)

    Returns:
        Document text
    """
    if format not in TABLE_FORMATS:
        raise ValueError(f"Unknown table format: {format}")
    rows = table1_rows(summary)

    if format == "markdown":
        return render_template(
            "table1.md.j2",
            rows=[{**row, "estimate": estimate_cell(row)} for row in rows],
            replications=summary.replications,
            n_per_replication=summary.config.get("n_per_replication"),
        )
    if format == "csv":
        buffer = io.StringIO()
        pd.DataFrame(rows).to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()
    return json.dumps({"replications": summary.replications, "rows": rows}, indent=2) + "\n"
