"""Render tracker CSV outputs to figures.

Consumes only the documented CSV contract (ospa.csv, cardinality.csv,
tracks.csv, truth.csv); never imports the tracker itself.
"""

from plots.figures import FIGURE_KINDS, KIND_INPUTS, FigureSpec, SchemaError, build, render

__all__ = [
    "FIGURE_KINDS",
    "KIND_INPUTS",
    "FigureSpec",
    "SchemaError",
    "build",
    "render",
]
