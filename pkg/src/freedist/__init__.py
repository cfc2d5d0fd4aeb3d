"""Exact verification engine for free n-distributions and their parabolic geometry."""

__version__ = "0.1.0"
