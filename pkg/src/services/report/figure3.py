"""
Figure 3 Geometry Module

Builds the data behind the scatter of follow-up against baseline weight:
per-group coverage ellipses (bivariate-normal, chi-square radius), marginal
Gaussian kernel densities with a rule-of-thumb bandwidth, and per-group
regression lines of Y1 on Y0. Rendering lives in svg.py.
"""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy import integrate, stats

from src.estimators.ols import ols
from src.scm.lords_dgp import BASELINE, EXPOSURE, FOLLOW_UP
from src.scm.schema import Dataset
from src.utils.errors import DegenerateDataError, EmptyGroupError, MissingColumnError

logger = logging.getLogger(__name__)

Group = Literal["girl", "boy"]
Axis = Literal["y0", "y1"]
GROUPS: Tuple[Group, ...] = ("girl", "boy")
MIN_GROUP_SIZE = 3


class GroupEllipse(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: Group
    center: Tuple[float, float]
    covariance: Tuple[Tuple[float, float], Tuple[float, float]]
    coverage_level: float
    boundary: List[Tuple[float, float]]


class GroupDensity(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: Group
    axis: Axis
    bandwidth: float
    grid: List[float]
    density: List[float]


class RegressionLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: Group
    slope: float
    intercept: float


class Figure3Bundle(BaseModel):
    """Everything needed to draw the figure, in kg."""
    model_config = ConfigDict(frozen=True)

    points: List[Tuple[float, float, Group]]
    ellipses: List[GroupEllipse]
    densities: List[GroupDensity]
    reglines: List[RegressionLine]
    identity_line: bool = True


def rule_of_thumb_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR / 1.34) * n^(-1/5), falling back to sd when the IQR is zero."""
    sd = float(np.std(values, ddof=1))
    if sd == 0.0:
        raise DegenerateDataError("Cannot estimate a density for a constant variable")
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    return 0.9 * spread * len(values) ** (-0.2)


def kernel_density(values: np.ndarray, grid_points: int = 512) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Gaussian kernel density on a grid spanning the data range +/- 3 bandwidths.

    Returns:
        (bandwidth, grid, density)
    """
    bandwidth = rule_of_thumb_bandwidth(values)
    # gaussian_kde scales its factor by the sample sd
    kde = stats.gaussian_kde(values, bw_method=bandwidth / np.std(values, ddof=1))
    grid = np.linspace(values.min() - 3 * bandwidth, values.max() + 3 * bandwidth, grid_points)
    return bandwidth, grid, kde(grid)


def ellipse_radius_squared(coverage: float) -> float:
    """Chi-square(2) quantile: squared Mahalanobis radius enclosing `coverage` of a bivariate normal."""
    return float(stats.chi2.ppf(coverage, df=2))


def ellipse_boundary(center: np.ndarray, cov: np.ndarray, coverage: float, vertices: int = 256) -> np.ndarray:
    """Closed polyline (first vertex repeated at the end) of the coverage ellipse."""
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    transform = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
    angles = np.linspace(0.0, 2.0 * np.pi, vertices + 1)
    circle = np.sqrt(ellipse_radius_squared(coverage)) * np.vstack([np.cos(angles), np.sin(angles)])
    boundary = (transform @ circle).T + center
    boundary[-1] = boundary[0]
    return boundary


def _group_masks(ds: Dataset) -> Dict[str, np.ndarray]:
    boy = ds.column(EXPOSURE) > 0
    masks = {"girl": ~boy, "boy": boy}
    for group, rows in masks.items():
        if rows.sum() < MIN_GROUP_SIZE:
            raise EmptyGroupError(f"Group {group!r} has {int(rows.sum())} point(s); need at least {MIN_GROUP_SIZE}")
    return masks


def figure3_data(
    ds: Dataset,
    coverage: float = 0.995,
    vertices: int = 256,
    grid_points: int = 512,
) -> Figure3Bundle:
    """
    Build the Figure 3 bundle from a natural-unit dataset.

    Args:
        ds: Dataset with X, Y0 and Y1
        coverage: Probability mass each ellipse should enclose
        vertices: Distinct vertices per ellipse boundary
        grid_points: Density grid size

    Returns:
        Figure3Bundle with points, ellipses, densities and regression lines
    """
    missing = [c for c in (EXPOSURE, BASELINE, FOLLOW_UP) if c not in ds.names]
    if missing:
        raise MissingColumnError(missing)
    masks = _group_masks(ds)
    y0 = ds.column(BASELINE)
    y1 = ds.column(FOLLOW_UP)

    points = [(float(a), float(b), "boy" if is_boy else "girl") for a, b, is_boy in zip(y0, y1, masks["boy"])]
    ellipses, densities, reglines = [], [], []
    for group in GROUPS:
        rows = masks[group]
        xy = np.column_stack([y0[rows], y1[rows]])
        center = xy.mean(axis=0)
        cov = np.cov(xy, rowvar=False, ddof=1)
        boundary = ellipse_boundary(center, cov, coverage, vertices)
        ellipses.append(GroupEllipse(
            group=group,
            center=(float(center[0]), float(center[1])),
            covariance=((float(cov[0, 0]), float(cov[0, 1])), (float(cov[1, 0]), float(cov[1, 1]))),
            coverage_level=coverage,
            boundary=[(float(a), float(b)) for a, b in boundary],
        ))

        fit = ols(y1[rows], {BASELINE: y0[rows]})
        reglines.append(RegressionLine(
            group=group, slope=fit.coefficients[BASELINE], intercept=fit.coefficients["intercept"]
        ))

        for axis, values in (("y0", y0[rows]), ("y1", y1[rows])):
            bandwidth, grid, density = kernel_density(values, grid_points)
            densities.append(GroupDensity(
                group=group, axis=axis, bandwidth=bandwidth, grid=grid.tolist(), density=density.tolist()
            ))

    logger.info(
        "Figure 3 bundle: "
        + ", ".join(f"{line.group} slope {line.slope:.3f}" for line in reglines)
    )
    return Figure3Bundle(points=points, ellipses=ellipses, densities=densities, reglines=reglines)


def ellipse_coverage(bundle: Figure3Bundle) -> Dict[str, float]:
    """Fraction of each group's own points inside its ellipse."""
    coverage = {}
    for ellipse in bundle.ellipses:
        xy = np.array([(a, b) for a, b, g in bundle.points if g == ellipse.group])
        if len(xy) == 0:
            coverage[ellipse.group] = float("nan")
            continue
        offset = xy - np.array(ellipse.center)
        precision = np.linalg.inv(np.array(ellipse.covariance))
        distance = np.einsum("ij,jk,ik->i", offset, precision, offset)
        coverage[ellipse.group] = float(np.mean(distance <= ellipse_radius_squared(ellipse.coverage_level)))
    return coverage


def density_integral(density: GroupDensity) -> float:
    return float(integrate.trapezoid(density.density, density.grid))


def write_bundle_csvs(bundle: Figure3Bundle, directory: Union[str, Path]) -> List[Path]:
    """Write points, ellipses, densities and regression lines as CSV files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    def _write(frame: pd.DataFrame, name: str) -> None:
        path = directory / name
        frame.to_csv(path, index=False, float_format="%.6g")
        written.append(path)

    _write(pd.DataFrame(bundle.points, columns=["y0", "y1", "group"]), "figure3_points.csv")
    _write(pd.DataFrame(
        [(e.group, i, a, b) for e in bundle.ellipses for i, (a, b) in enumerate(e.boundary)],
        columns=["group", "vertex_index", "y0", "y1"],
    ), "figure3_ellipses.csv")
    for axis, suffix in (("y0", "x"), ("y1", "y")):
        _write(pd.DataFrame(
            [(d.group, g, v) for d in bundle.densities if d.axis == axis for g, v in zip(d.grid, d.density)],
            columns=["group", "grid_kg", "density"],
        ), f"figure3_density_{suffix}.csv")
    _write(pd.DataFrame(
        [(line.group, line.slope, line.intercept) for line in bundle.reglines],
        columns=["group", "slope", "intercept_kg"],
    ), "figure3_reglines.csv")

    logger.info(f"Wrote {len(written)} Figure 3 CSV files to {directory}")
    return written
