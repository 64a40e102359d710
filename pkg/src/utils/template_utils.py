"""
Template utilities for the report emitters.

This module provides functions for loading and rendering the jinja2 templates
under src/templates (the Figure 3 SVG and the markdown Table 1).
"""

import os
import math
from typing import Any, Dict

from jinja2 import Environment, FileSystemLoader, StrictUndefined, Template

# Initialize Jinja2 environment
template_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), "templates")
env = Environment(
    loader=FileSystemLoader(template_dir),
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=StrictUndefined,
    keep_trailing_newline=True,
)


def format_kg(value: float, decimals: int = 1) -> str:
    """
    Format a kilogram value for human-readable output.

    Negative zero is printed as zero so that "-0.0" never appears in a table.
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "N/A"
    text = f"{value:.{decimals}f}"
    if float(text) == 0.0:
        text = f"{0.0:.{decimals}f}"
    return text


def format_coord(value: float) -> str:
    """Fixed-precision SVG coordinate."""
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


env.filters["kg"] = format_kg
env.filters["coord"] = format_coord


def load_template(template_name: str) -> Template:
    """
    Load a Jinja2 template from the templates directory.

    Args:
        template_name: Name of the template file

    Returns:
        Jinja2 Template object
    """
    return env.get_template(template_name)


def render_template(template_name: str, **context: Dict[str, Any]) -> str:
    """
    Load and render a Jinja2 template with the given context.

    Args:
        template_name: Name of the template file
        **context: Variables to pass to the template

    Returns:
        Rendered template as a string
    """
    template = load_template(template_name)
    return template.render(**context)
