"""
Artifact writers for the command-line pipeline.

Every file the CLI emits goes through here so names and encodings stay in one
place. JSON documents are written with a fixed indent and a trailing newline;
NaN values become null so the output is strict JSON.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Union

from src.services.report.figure3 import Figure3Bundle, write_bundle_csvs
from src.services.report.svg import render_svg
from src.services.report.table1 import FILE_SUFFIX, TableFormat, emit_table1
from src.services.simulation.mc_harness import SummaryTable

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
ESTIMATES_FILE = "estimates.csv"
SUMMARY_FILE = "summary.json"
GROUND_TRUTH_FILE = "ground_truth.json"
FIGURE3_SVG_FILE = "figure3.svg"
RTM_REPORT_FILE = "rtm_report.json"
DID_REPORT_FILE = "did_report.json"
PRECISION_FILE = "precision.json"
POSITIVITY_FILE = "positivity.json"

PathLike = Union[str, Path]


def _strict(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _strict(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_strict(v) for v in value]
    return value


def json_text(document: Any) -> str:
    return json.dumps(_strict(document), indent=2, allow_nan=False) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Wrote {path}")
    return path


def write_json(path: PathLike, document: Any) -> Path:
    return write_text(path, json_text(document))


def write_table1(summary: SummaryTable, directory: PathLike, formats: Iterable[TableFormat]) -> List[Path]:
    """
    Write table1.<suffix> for each requested format.

    Args:
        summary: Replication summary
        directory: Output directory
        formats: Any of markdown, csv, json

    Returns:
        Paths written
    """
    return [
        write_text(Path(directory) / f"table1.{FILE_SUFFIX[fmt]}", emit_table1(summary, fmt))
        for fmt in formats
    ]


def write_figure3(bundle: Figure3Bundle, directory: PathLike, svg: bool = True, csv: bool = True) -> List[Path]:
    """Write the Figure 3 CSV bundle and/or the SVG rendering."""
    written: List[Path] = []
    if csv:
        written.extend(write_bundle_csvs(bundle, directory))
    if svg:
        written.append(write_text(Path(directory) / FIGURE3_SVG_FILE, render_svg(bundle)))
    return written
