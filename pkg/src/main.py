"""
Lord's Paradox Laboratory command-line interface.

Run as ``python -m src.main <subcommand>``. Every subcommand simulates from
the weight-example model (or a model file given with --model), writes its
artifacts under --out and exits 0 on success, 2 on model/config validation
errors and 3 on estimator errors.
"""

import sys
import time
import logging
import argparse
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src.estimators import approach1_change_score, check_positivity, did_means, estimate_all
from src.rtm import biasing_term_report
from src.scm import (
    Dataset,
    ScmSpec,
    build_paper_scm,
    build_randomized_scm,
    dataset_from_csv,
    dataset_to_csv,
    ground_truth,
    ground_truth_report,
    load_scm,
    simulate,
    to_natural_units,
)
from src.services.report import figure3_data, table1_rows, write_figure3, write_json, write_table1, write_text
from src.services.report.artifacts import (
    DATASET_FILE,
    DID_REPORT_FILE,
    ESTIMATES_FILE,
    GROUND_TRUTH_FILE,
    POSITIVITY_FILE,
    PRECISION_FILE,
    RTM_REPORT_FILE,
    SUMMARY_FILE,
)
from src.services.report.table1 import TABLE_FORMATS, estimate_cell
from src.services.simulation import (
    McConfig,
    box1_study,
    compare_precision,
    run_replications,
    summarize,
    write_estimates_csv,
    write_summary_json,
)
from src.utils.config import LabSettings, env_seed, load_settings
from src.utils.errors import EstimatorError, ModelValidationError
from src.utils.template_utils import format_kg

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ESTIMATOR = 3


def configure_logging(level: str) -> None:
    """Configure the root logger once for the CLI process."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--reps", type=int, help="Monte Carlo replications")
    common.add_argument("--n", type=int, help="Observations per dataset")
    common.add_argument("--seed", type=int, help="Master seed (LORDS_LAB_SEED wins over this flag)")
    common.add_argument("--model", type=str, help="Path to a model JSON file")
    common.add_argument("--out", type=str, help="Output directory")
    common.add_argument("--format", choices=list(TABLE_FORMATS) + ["all"], help="Table format")
    common.add_argument("--paper-scale", action="store_true", help="Use the full replication count")
    common.add_argument("--workers", type=int, help="Worker processes for replications")
    common.add_argument("--quiet", action="store_true", help="No progress bars or console tables")
    common.add_argument("--config", type=str, help="Path to config file")
    common.add_argument("--log-level", type=str, help="Logging level")

    parser = argparse.ArgumentParser(description="Lord's paradox simulation and estimation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="Write one simulated dataset as CSV")
    estimate = sub.add_parser("estimate", parents=[common], help="Run the six approaches on a dataset CSV")
    estimate.add_argument("--input", type=str, required=True, help="Dataset CSV")
    sub.add_parser("reproduce-table1", parents=[common], help="Replicate, summarize and emit Table 1")
    figure3 = sub.add_parser("figure3", parents=[common], help="Figure 3 bundle CSVs and SVG")
    figure3.add_argument("--no-svg", action="store_true", help="Skip the SVG rendering")
    figure3.add_argument("--no-csv", action="store_true", help="Skip the bundle CSV files")
    rtm = sub.add_parser("rtm-report", parents=[common], help="Change-score biasing term report")
    rtm.add_argument("--input", type=str, help="Dataset CSV instead of a fresh simulation")
    rtm.add_argument("--beta1", type=float, help="Endogenous slope (default: within-sex slope)")
    sub.add_parser("did-demo", parents=[common], help="Difference-in-difference equivalence report")
    sub.add_parser("power", parents=[common], help="Change-score vs ANCOVA precision under randomization")
    return parser


class RunContext:
    """Resolved options for one CLI invocation."""

    def __init__(self, args: argparse.Namespace, settings: LabSettings):
        sim = settings.simulation
        self.args = args
        self.settings = settings
        forced = env_seed()
        self.seed = forced if forced is not None else (args.seed if args.seed is not None else sim.master_seed)
        if args.reps is not None:
            self.reps = args.reps
        else:
            self.reps = sim.paper_replications if args.paper_scale else sim.replications
        self.n = args.n if args.n is not None else sim.n_per_replication
        self.workers = args.workers if args.workers is not None else sim.workers
        self.out = Path(args.out or settings.output.directory)
        self.format = args.format or settings.output.table_format
        self.progress = not args.quiet and sys.stderr.isatty()
        self.console = None if args.quiet else Console()

    def model(self) -> ScmSpec:
        if self.args.model:
            return load_scm(self.args.model)
        return build_paper_scm()

    def mc_config(self, spec: ScmSpec) -> McConfig:
        return McConfig(
            spec=spec,
            replications=self.reps,
            n_per_replication=self.n,
            master_seed=self.seed,
            y0_fixed_kg=self.settings.simulation.y0_fixed_kg,
        )

    def dataset(self, spec: ScmSpec, n: Optional[int] = None) -> Dataset:
        return to_natural_units(simulate(spec, n or self.n, self.seed), spec)

    def show(self, table: Table) -> None:
        if self.console is not None:
            self.console.print(table)


def _key_value_table(title: str, values: Dict[str, Any]) -> Table:
    table = Table(title=title)
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    for key, value in values.items():
        table.add_row(key, format_kg(value, 3) if isinstance(value, float) else str(value))
    return table


def cmd_simulate(ctx: RunContext) -> None:
    spec = ctx.model()
    dataset_to_csv(ctx.dataset(spec), ctx.out / DATASET_FILE)


def cmd_estimate(ctx: RunContext) -> None:
    ds = dataset_from_csv(ctx.args.input)
    estimates = estimate_all(ds, ctx.settings.simulation.y0_fixed_kg)
    write_estimates_csv([estimates], ctx.out / ESTIMATES_FILE)
    ctx.show(_key_value_table(f"Estimates for {ctx.args.input}", estimates.values()))
    positivity = check_positivity(ds)
    write_json(ctx.out / POSITIVITY_FILE, positivity)
    ctx.show(_key_value_table("Columns fully determined by the exposure", positivity))


def cmd_reproduce_table1(ctx: RunContext) -> None:
    spec = ctx.model()
    cfg = ctx.mc_config(spec)
    logger.info(f"Reproducing Table 1 with {cfg.replications} x {cfg.n_per_replication} (seed {cfg.master_seed})")

    start = time.perf_counter()
    estimates = run_replications(cfg, workers=ctx.workers, progress=ctx.progress)
    summary = summarize(estimates, cfg, elapsed_seconds=time.perf_counter() - start)
    logger.info(f"Pipeline took {summary.elapsed_seconds:.1f}s")

    write_estimates_csv(estimates, ctx.out / ESTIMATES_FILE)
    write_summary_json(summary, ctx.out / SUMMARY_FILE)
    write_text(ctx.out / GROUND_TRUTH_FILE, ground_truth_report(summary.ground_truth) + "\n")
    formats = list(TABLE_FORMATS) if ctx.format == "all" else [ctx.format]
    write_table1(summary, ctx.out, formats)

    table = Table(title="Table 1: boy-vs-girl contrast in follow-up weight (kg)")
    for column in ("#", "Approach", "Implied estimand", "Simulated", "Estimated (95% SI)"):
        table.add_column(column)
    for row in table1_rows(summary):
        table.add_row(
            str(row["row"]),
            row["description"],
            row["estimand"],
            format_kg(row["value_simulated_kg"]),
            estimate_cell(row),
        )
    ctx.show(table)


def cmd_figure3(ctx: RunContext) -> None:
    fig = ctx.settings.figure3
    spec = ctx.model()
    ds = ctx.dataset(spec, ctx.args.n or fig.n)
    bundle = figure3_data(ds, coverage=fig.coverage, vertices=fig.ellipse_vertices, grid_points=fig.density_grid_points)
    write_figure3(bundle, ctx.out, svg=not ctx.args.no_svg, csv=not ctx.args.no_csv)


def cmd_rtm_report(ctx: RunContext) -> None:
    if ctx.args.input:
        ds = dataset_from_csv(ctx.args.input)
    else:
        ds = ctx.dataset(ctx.model())
    report = biasing_term_report(ds, beta1=ctx.args.beta1)
    write_json(ctx.out / RTM_REPORT_FILE, report)
    ctx.show(_key_value_table("Change-score biasing term", report))


def cmd_did_demo(ctx: RunContext) -> None:
    ds = ctx.dataset(ctx.model())
    did = did_means(ds)
    change = approach1_change_score(ds)

    randomized = build_randomized_scm()
    truth = ground_truth(randomized).tce_kg
    study = box1_study(ctx.mc_config(randomized), truth, workers=ctx.workers, progress=ctx.progress)

    report = {
        "equivalence": {
            "did_means_kg": did,
            "change_score_kg": change,
            "abs_difference_kg": abs(did - change),
        },
        "randomized_study": study,
    }
    write_json(ctx.out / DID_REPORT_FILE, report)
    ctx.show(_key_value_table("Difference-in-difference vs change score", report["equivalence"]))


def cmd_power(ctx: RunContext) -> None:
    spec = build_randomized_scm()
    cfg = ctx.mc_config(spec)
    estimates = run_replications(cfg, workers=ctx.workers, progress=ctx.progress)
    report = {**compare_precision(estimates), "truth_kg": ground_truth(spec).tce_kg}
    write_json(ctx.out / PRECISION_FILE, report)
    ctx.show(_key_value_table("Precision under randomized exposure", report))


COMMANDS: Dict[str, Callable[[RunContext], None]] = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "reproduce-table1": cmd_reproduce_table1,
    "figure3": cmd_figure3,
    "rtm-report": cmd_rtm_report,
    "did-demo": cmd_did_demo,
    "power": cmd_power,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or "INFO")
    try:
        settings = load_settings(args.config)
        configure_logging(args.log_level or settings.logging.get("level", "INFO"))
        ctx = RunContext(args, settings)
        COMMANDS[args.command](ctx)
    except (ModelValidationError, ValidationError) as e:
        logger.error(f"Validation error: {e}", exc_info=logger.isEnabledFor(logging.DEBUG))
        return EXIT_VALIDATION
    except EstimatorError as e:
        logger.error(f"Estimator error: {e}", exc_info=logger.isEnabledFor(logging.DEBUG))
        return EXIT_ESTIMATOR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
