"""Numerical laboratory for GRW-type spontaneous collapse dynamics."""

__version__ = "0.1.0"
