"""
Utility functions for the Lord's Paradox Laboratory.
"""

from .template_utils import load_template, render_template, format_kg
from .rng import child_seed, node_rng

__all__ = ['load_template', 'render_template', 'format_kg', 'child_seed', 'node_rng']
