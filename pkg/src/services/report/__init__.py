"""
Report emitters: Table 1, the Figure 3 bundle and its SVG rendering.
"""

from .figure3 import (
    Figure3Bundle,
    GroupDensity,
    GroupEllipse,
    RegressionLine,
    density_integral,
    ellipse_boundary,
    ellipse_coverage,
    ellipse_radius_squared,
    figure3_data,
    kernel_density,
    rule_of_thumb_bandwidth,
    write_bundle_csvs,
)
from .svg import render_svg
from .table1 import TABLE_FORMATS, emit_table1, table1_rows
from .artifacts import json_text, write_figure3, write_json, write_table1, write_text

__all__ = [
    'Figure3Bundle', 'GroupDensity', 'GroupEllipse', 'RegressionLine',
    'density_integral', 'ellipse_boundary', 'ellipse_coverage', 'ellipse_radius_squared',
    'figure3_data', 'kernel_density', 'rule_of_thumb_bandwidth', 'write_bundle_csvs',
    'render_svg', 'TABLE_FORMATS', 'emit_table1', 'table1_rows',
    'json_text', 'write_figure3', 'write_json', 'write_table1', 'write_text',
]
