"""
SVG rendering of the Figure 3 bundle.

Geometry is projected to pixel space here; layout and styling live in the
jinja2 template src/templates/figure3.svg.j2. Every plotted element (each
scatter point, ellipse, density curve, regression line and the identity line)
is one <path>; axes, ticks and legend use other elements. Coordinates are
printed with fixed precision so identical bundles give identical documents.
"""

import math
from typing import Dict, Iterable, List, Sequence, Tuple

from src.services.report.figure3 import Figure3Bundle
from src.utils.template_utils import format_coord, render_template

WIDTH = 720
HEIGHT = 720
PLOT_LEFT = 130.0
PLOT_RIGHT = 690.0
PLOT_TOP = 30.0
PLOT_BOTTOM = 590.0
BOTTOM_GUTTER_BASE = 700.0
LEFT_GUTTER_BASE = 20.0
GUTTER_SIZE = 75.0
POINT_RADIUS = 1.2
TICK_STEP_KG = 10.0


class _Projection:
    def __init__(self, lo: float, hi: float):
        self.lo = lo
        self.hi = hi
        self.span = hi - lo

    def x(self, value: float) -> float:
        return PLOT_LEFT + (value - self.lo) / self.span * (PLOT_RIGHT - PLOT_LEFT)

    def y(self, value: float) -> float:
        return PLOT_BOTTOM - (value - self.lo) / self.span * (PLOT_BOTTOM - PLOT_TOP)


def _data_range(bundle: Figure3Bundle) -> Tuple[float, float]:
    values: List[float] = []
    for y0, y1, _ in bundle.points:
        values.extend((y0, y1))
    for ellipse in bundle.ellipses:
        for y0, y1 in ellipse.boundary:
            values.extend((y0, y1))
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if hi - lo <= 0:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.02 * (hi - lo)
    return lo - pad, hi + pad


def _polyline(points: Iterable[Tuple[float, float]], closed: bool = False) -> str:
    parts = []
    for i, (x, y) in enumerate(points):
        parts.append(f"{'M' if i == 0 else 'L'}{format_coord(x)},{format_coord(y)}")
    return "".join(parts) + ("Z" if closed else "")


def _point_path(x: float, y: float) -> str:
    r = POINT_RADIUS
    return (
        f"M{format_coord(x - r)},{format_coord(y)}"
        f"a{r},{r} 0 1,0 {2 * r},0a{r},{r} 0 1,0 {-2 * r},0"
    )


def _ticks(lo: float, hi: float) -> List[float]:
    first = math.ceil(lo / TICK_STEP_KG) * TICK_STEP_KG
    ticks = []
    value = first
    while value <= hi:
        ticks.append(value)
        value += TICK_STEP_KG
    return ticks


def _density_paths(bundle: Figure3Bundle, proj: _Projection) -> List[Dict[str, str]]:
    paths = []
    peaks = {
        axis: max((max(d.density) for d in bundle.densities if d.axis == axis and d.density), default=1.0)
        for axis in ("y0", "y1")
    }
    for density in bundle.densities:
        peak = peaks[density.axis] or 1.0
        pairs: Sequence[Tuple[float, float]]
        kept = [(g, v) for g, v in zip(density.grid, density.density) if proj.lo <= g <= proj.hi]
        if density.axis == "y0":
            pairs = [(proj.x(g), BOTTOM_GUTTER_BASE - v / peak * GUTTER_SIZE) for g, v in kept]
        else:
            pairs = [(LEFT_GUTTER_BASE + v / peak * GUTTER_SIZE, proj.y(g)) for g, v in kept]
        paths.append({"d": _polyline(pairs), "group": density.group, "axis": density.axis})
    return paths


def render_svg(bundle: Figure3Bundle) -> str:
    """
    Render the bundle as one self-contained SVG document.

    Args:
        bundle: Figure 3 geometry in kg

    Returns:
        SVG document text
    """
    lo, hi = _data_range(bundle)
    proj = _Projection(lo, hi)

    points = [{"d": _point_path(proj.x(y0), proj.y(y1)), "group": group} for y0, y1, group in bundle.points]
    ellipses = [
        {"d": _polyline(((proj.x(a), proj.y(b)) for a, b in e.boundary), closed=True), "group": e.group}
        for e in bundle.ellipses
    ]
    reglines = [
        {
            "d": _polyline([
                (proj.x(lo), proj.y(line.intercept + line.slope * lo)),
                (proj.x(hi), proj.y(line.intercept + line.slope * hi)),
            ]),
            "group": line.group,
        }
        for line in bundle.reglines
    ]
    identity = _polyline([(proj.x(lo), proj.y(lo)), (proj.x(hi), proj.y(hi))]) if bundle.identity_line else None
    ticks = [{"label": f"{t:.0f}", "x": proj.x(t), "y": proj.y(t)} for t in _ticks(lo, hi)]

    return render_template(
        "figure3.svg.j2",
        width=WIDTH,
        height=HEIGHT,
        plot={"left": PLOT_LEFT, "right": PLOT_RIGHT, "top": PLOT_TOP, "bottom": PLOT_BOTTOM},
        points=points,
        ellipses=ellipses,
        densities=_density_paths(bundle, proj),
        reglines=reglines,
        identity=identity,
        ticks=ticks,
    )
