"""Exact-arithmetic workbench for 2-colored homotopy algebraic structures."""

__version__ = "0.1.0"
