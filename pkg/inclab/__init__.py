"""Discretized incidence geometry laboratory."""
__version__ = "1.0.0"
