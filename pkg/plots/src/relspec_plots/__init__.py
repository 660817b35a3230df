"""Stateless figure scripts for relspec CLI artifacts."""

from .render import PlotJob, SchemaError, main, render

__all__ = ["PlotJob", "SchemaError", "main", "render"]
__version__ = "0.1.0"
