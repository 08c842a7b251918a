"""Truncated multivariate series with an explicit grlex horizon.

A :class:`TruncatedSeries` stores the coefficients known so far together with
an inclusive grlex ``bound``: every coefficient of an index ``<=grlex bound``
is known (absent means zero); beyond the bound nothing is known.  A bound of
``None`` marks an exact finite sum (a polynomial).
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from . import multiindex as mi
from .multiindex import MultiIndex
from .polynomial import XPoly, XYPolynomial
from .scalar import Scalar, check_scalar, is_zero, normalize, render_scalar


class InsufficientTruncation(ValueError):
    """A requested quantity depends on coefficients beyond the known horizon."""


class TruncatedSeries:
    """Immutable truncated series ``sum c_n x^n`` with a grlex horizon."""

    __slots__ = ("r", "_coeffs", "bound", "_pow_cache")

    def __init__(self, r: int, coeffs: Mapping[Sequence[int], Scalar] | None = None,
                 bound: Sequence[int] | None = None):
        self.r = r
        clean: dict[MultiIndex, Scalar] = {}
        for n, c in (coeffs or {}).items():
            n = tuple(int(t) for t in n)
            if len(n) != r:
                raise mi.DimensionMismatch(f"index {n} has length != {r}")
            c = normalize(check_scalar(c))
            if not is_zero(c):
                clean[n] = c
        if bound is not None:
            bound = tuple(bound)
            if len(bound) != r:
                raise mi.DimensionMismatch("bound has wrong length")
            for n in clean:
                if mi.grlex_lt(bound, n):
                    raise ValueError(f"coefficient at {n} lies beyond the bound {bound}")
        self._coeffs = clean
        self.bound = bound
        self._pow_cache: dict[tuple[int, MultiIndex], Scalar] = {}

    # -- basic access -------------------------------------------------------
    @property
    def coeffs(self) -> dict[MultiIndex, Scalar]:
        return dict(self._coeffs)

    def is_exact(self) -> bool:
        return self.bound is None

    def knows(self, n: Sequence[int]) -> bool:
        return self.bound is None or mi.grlex_le(tuple(n), self.bound)

    def coeff(self, n: Sequence[int]) -> Scalar:
        n = tuple(n)
        if not self.knows(n):
            raise InsufficientTruncation(f"coefficient {n} lies beyond the horizon {self.bound}")
        return self._coeffs.get(n, 0)

    def __getitem__(self, n: Sequence[int]) -> Scalar:
        return self.coeff(n)

    def support(self) -> list[MultiIndex]:
        return sorted(self._coeffs, key=mi.grlex_key)

    def items(self) -> list[tuple[MultiIndex, Scalar]]:
        return [(n, self._coeffs[n]) for n in self.support()]

    def is_natural(self) -> bool:
        return all(mi.is_natural(n) for n in self._coeffs)

    def truncate(self, bound: Sequence[int]) -> "TruncatedSeries":
        """Restrict to indices ``<=grlex bound`` (which must be known)."""
        bound = tuple(bound)
        if self.bound is not None and mi.grlex_lt(self.bound, bound):
            raise InsufficientTruncation(f"cannot truncate at {bound}: horizon is {self.bound}")
        return TruncatedSeries(self.r, {n: c for n, c in self._coeffs.items() if mi.grlex_le(n, bound)}, bound)

    def prefix(self, k: Sequence[int]) -> XPoly:
        """The polynomial ``z_k = sum_{n <=grlex k} c_n x^n`` (exact)."""
        k = tuple(k)
        if not self.knows(k):
            raise InsufficientTruncation(f"prefix through {k} needs the horizon to reach it")
        return {n: c for n, c in self._coeffs.items() if mi.grlex_le(n, k)}

    def map_coeffs(self, f) -> "TruncatedSeries":
        return TruncatedSeries(self.r, {n: f(c) for n, c in self._coeffs.items()}, self.bound)

    def extend(self, extra: Mapping[Sequence[int], Scalar], bound: Sequence[int]) -> "TruncatedSeries":
        """A new series with additional coefficients and a larger horizon."""
        merged = dict(self._coeffs)
        for n, c in extra.items():
            merged[tuple(n)] = c
        return TruncatedSeries(self.r, merged, bound)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.r == other.r and self._coeffs == other._coeffs and self.bound == other.bound

    def __hash__(self) -> int:
        return hash((self.r, frozenset(self._coeffs.items()), self.bound))

    def __repr__(self) -> str:
        return f"TruncatedSeries(r={self.r}, bound={self.bound}, {render_series(self)!r})"

    # -- powers ---------------------------------------------------------------
    def _power_determined(self, j: int, n: MultiIndex) -> None:
        if self.bound is None or j == 0:
            return
        if any(x < 0 for x in n):
            return
        if not is_zero(self._coeffs.get(mi.zero(self.r), 0)):
            if not self.knows(n):
                raise InsufficientTruncation(f"C^({j}) at {n} needs coefficients beyond {self.bound}")
            return
        # every factor has degree >= 1, so factors have degree <= |n| - (j - 1)
        dmax = sum(n) - (j - 1)
        if dmax < 1:
            return
        # grlex-largest m <= n (product order) with |m| = dmax: greedy in lex
        rest = dmax
        m = []
        for x in n:
            t = min(x, rest)
            m.append(t)
            rest -= t
        if not self.knows(tuple(m)):
            raise InsufficientTruncation(f"C^({j}) at {n} needs coefficients beyond {self.bound}")

    def power_coeff(self, j: int, n: Sequence[int]) -> Scalar:
        """Coefficient of ``x^n`` in ``y^j`` (for series supported in ``N^r``)."""
        n = tuple(n)
        if len(n) != self.r:
            raise mi.DimensionMismatch("index length mismatch")
        if j < 0:
            raise ValueError("power must be natural")
        if j == 0:
            return 1 if all(x == 0 for x in n) else 0
        if not self.is_natural():
            raise ValueError("power coefficients are implemented for series in N^r")
        if any(x < 0 for x in n):
            return 0
        self._power_determined(j, n)
        return self._pc(j, n)

    def _pc(self, j: int, n: MultiIndex) -> Scalar:
        if j == 0:
            return 1 if not any(n) else 0
        if any(x < 0 for x in n):
            return 0
        if j == 1:
            return self._coeffs.get(n, 0)
        key = (j, n)
        hit = self._pow_cache.get(key)
        if hit is not None:
            return hit
        total: Scalar = 0
        for m, c in self._coeffs.items():
            if mi.product_le(m, n):
                rest = tuple(a - b for a, b in zip(n, m))
                v = self._pc(j - 1, rest)
                if not is_zero(v):
                    total = total + c * v
        total = normalize(total)
        self._pow_cache[key] = total
        return total


def series_power_coeff(y: TruncatedSeries, j: int, n: Sequence[int]) -> Scalar:
    """``C_n^{(j)}``: the coefficient of ``x^n`` in ``y^j``."""
    return y.power_coeff(j, n)


def ord_lower_bound(z: TruncatedSeries) -> MultiIndex:
    """A grlex lower bound for the exponents of the (full) series."""
    known = z.support()
    r = z.r
    if known:
        return known[0]
    if z.bound is None:
        return mi.zero(r)
    return mi.grlex_successor(z.bound) if mi.is_natural(z.bound) else z.bound


def xy_substitute(P: XYPolynomial, z: TruncatedSeries, s: Sequence[int]) -> XYPolynomial:
    """``P(x, z + x^s y)`` with an honest exactness window.

    For an exact ``z`` (``bound is None``) the result is exact.  Otherwise the
    unknown tail of ``z`` starts strictly above ``z.bound``; a coefficient
    ``x^t y^m`` is kept only when no term involving that tail can reach it, and
    the exclusive grlex threshold is recorded as ``window`` on the result.
    """
    s = tuple(s)
    r = P.r
    if z.r != r:
        raise mi.DimensionMismatch("series and polynomial dimensions differ")
    base = dict(z.coeffs)
    full = P.substitute_y(base, s)
    if z.bound is None:
        return full
    if not mi.is_natural(z.bound):
        raise ValueError("truncated series must have a natural horizon")
    tail = mi.grlex_successor(z.bound)
    v = ord_lower_bound(z)
    threshold: MultiIndex | None = None
    for (i, j), _ in P.items():
        for m in range(j):
            q = j - m
            # error terms of (z + x^s y)^j at y^m come from z^q's tail
            cand = mi.add(mi.add(i, mi.scale(m, s)), mi.add(tail, mi.scale(q - 1, v)))
            if threshold is None or mi.grlex_lt(cand, threshold):
                threshold = cand
    if threshold is None:
        return full
    return XYPolynomial(r, full.terms, window=threshold)


def evaluate_on_series(P: XYPolynomial, z: TruncatedSeries) -> tuple[XPoly, MultiIndex | None]:
    """``P(x, z)`` restricted to its exact part; returns ``(coeffs, exclusive window)``."""
    res = xy_substitute(P, z, mi.zero(P.r))
    return res.at_y_zero(), res.window


def render_series(z: TruncatedSeries) -> str:
    parts = []
    for n, c in z.items():
        parts.append(f"{mi.render_index(n)}: {render_scalar(c)}")
    head = "{" + ", ".join(parts) + "}"
    return head + ("" if z.bound is None else f" + O(>{mi.render_index(z.bound)})")


def series_from_items(r: int, items: Iterable[tuple[Sequence[int], Scalar]], bound) -> TruncatedSeries:
    return TruncatedSeries(r, {tuple(n): c for n, c in items}, bound)


