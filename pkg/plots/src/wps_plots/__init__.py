"""Figure rendering for wps benchmark artifacts."""

from .figures import FIGURE_IDS, FigureSpec, SchemaError, build_figure, default_spec, render

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "default_spec",
    "render",
]

__version__ = "0.1.0"
