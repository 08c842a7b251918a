"""Exact-arithmetic toolkit for algebraic multivariate series."""

__version__ = "0.1.0"
