"""Exact scalars, multi-index orders, polynomial/series arithmetic and determinants."""

from .multiindex import (
    DimensionMismatch,
    MultiIndex,
    alex_key,
    grlex_cmp,
    grlex_key,
    grlex_le,
    grlex_lt,
    grlex_predecessor,
    grlex_successor,
    lex_cmp,
    product_le,
)
from .scalar import (
    NotDivisible,
    RingMismatch,
    Scalar,
    SymPoly,
    divide,
    indexed_symbol,
    is_zero,
    render_scalar,
    scalar_mode,
    sym,
)
from .polynomial import XYPolynomial, render_xy
from .series import InsufficientTruncation, TruncatedSeries, series_power_coeff, xy_substitute
from .linalg import ff_det, laplace_det

__all__ = [
    "DimensionMismatch", "MultiIndex", "alex_key", "grlex_cmp", "grlex_key", "grlex_le", "grlex_lt",
    "grlex_predecessor", "grlex_successor", "lex_cmp", "product_le",
    "NotDivisible", "RingMismatch", "Scalar", "SymPoly", "divide", "indexed_symbol", "is_zero",
    "render_scalar", "scalar_mode", "sym",
    "XYPolynomial", "render_xy",
    "InsufficientTruncation", "TruncatedSeries", "series_power_coeff", "xy_substitute",
    "ff_det", "laplace_det",
]
