"""Run-directory panel regeneration."""

from .render import Curve, PlotSpec, engine_curve, main, read_series, render_figure

__all__ = ["Curve", "PlotSpec", "engine_curve", "main", "read_series", "render_figure"]
