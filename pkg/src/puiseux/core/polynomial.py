"""Polynomials in ``y`` whose coefficients are Laurent polynomials in ``x``.

``XYPolynomial`` stores a finite map ``(x-exponent, y-degree) -> Scalar``.
The x-exponents may be negative (needed for Henselian equations obtained by
division by a monomial); y-degrees are natural numbers.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import multiindex as mi
from .multiindex import MultiIndex
from .scalar import (
    Scalar,
    check_scalar,
    divide,
    is_zero,
    needs_parens,
    normalize,
    render_scalar,
    scalar_mode,
)

Key = tuple[MultiIndex, int]
# A Laurent polynomial in x alone: exponent -> Scalar.
XPoly = dict[MultiIndex, Scalar]


def xpoly_add_into(acc: XPoly, other: Mapping[MultiIndex, Scalar], factor: Scalar = 1) -> None:
    for e, c in other.items():
        v = acc.get(e, 0) + c * factor
        if is_zero(v):
            acc.pop(e, None)
        else:
            acc[e] = normalize(v)


def xpoly_mul(a: Mapping[MultiIndex, Scalar], b: Mapping[MultiIndex, Scalar]) -> XPoly:
    out: XPoly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if is_zero(v):
                out.pop(e, None)
            else:
                out[e] = v
    return {e: normalize(c) for e, c in out.items()}


def xpoly_pow(a: Mapping[MultiIndex, Scalar], k: int, r: int) -> XPoly:
    out: XPoly = {mi.zero(r): 1}
    for _ in range(k):
        out = xpoly_mul(out, a)
    return out


class XYPolynomial:
    """Immutable sparse polynomial ``sum a_{i,j} x^i y^j``.

    ``window`` optionally records an exclusive grlex threshold: only the
    x-coefficients of exponents ``<grlex window`` are known to be exact (the
    untrusted part is not stored).  ``None`` means the polynomial is exact.
    """

    __slots__ = ("r", "_terms", "window")

    def __init__(self, r: int, terms: Mapping[Key, Scalar] | Iterable[tuple[Key, Scalar]] = (),
                 window: MultiIndex | None = None):
        if r < 1:
            raise ValueError("r must be at least 1")
        self.r = r
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, Scalar] = {}
        for (i, j), c in items:
            i = tuple(int(t) for t in i)
            if len(i) != r:
                raise mi.DimensionMismatch(f"x-exponent {i} has length != {r}")
            if j < 0:
                raise ValueError("y-degree must be natural")
            c = check_scalar(c)
            v = acc.get((i, j), 0) + c
            acc[(i, j)] = v
        self._terms = {k: normalize(v) for k, v in acc.items() if not is_zero(v)}
        if window is not None:
            window = tuple(window)
            self._terms = {k: v for k, v in self._terms.items() if mi.grlex_lt(k[0], window)}
        self.window = window

    # -- construction helpers -------------------------------------------
    @classmethod
    def _raw(cls, r: int, terms: dict[Key, Scalar], window=None) -> "XYPolynomial":
        obj = cls.__new__(cls)
        obj.r = r
        obj._terms = terms
        obj.window = window
        return obj

    @classmethod
    def zero(cls, r: int) -> "XYPolynomial":
        return cls._raw(r, {})

    @classmethod
    def y(cls, r: int) -> "XYPolynomial":
        return cls._raw(r, {(mi.zero(r), 1): 1})

    @classmethod
    def from_xpoly(cls, r: int, xp: Mapping[MultiIndex, Scalar], ydeg: int = 0) -> "XYPolynomial":
        return cls(r, {(e, ydeg): c for e, c in xp.items()})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Key, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Key]:
        return iter(self._terms)

    def coeff(self, i: Sequence[int], j: int) -> Scalar:
        return self._terms.get((tuple(i), j), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_items(self) -> list[tuple[Key, Scalar]]:
        """Terms ordered by (grlex x-exponent, y-degree) -- the canonical order."""
        return sorted(self._terms.items(), key=lambda kv: (mi.grlex_key(kv[0][0]), kv[0][1]))

    def support(self) -> list[Key]:
        return [k for k, _ in self.sorted_items()]

    def y_degree(self) -> int:
        return max((j for _, j in self._terms), default=0)

    def x_degree(self) -> int:
        """Maximum total degree ``|i|`` of an x-exponent."""
        return max((sum(i) for i, _ in self._terms), default=0)

    def x_exponents(self) -> list[MultiIndex]:
        return sorted({i for i, _ in self._terms}, key=mi.grlex_key)

    def w(self) -> MultiIndex | None:
        """grlex-minimal x-exponent over all terms (``None`` for zero)."""
        if not self._terms:
            return None
        return mi.grlex_min(i for i, _ in self._terms)

    def pi(self, i: Sequence[int]) -> dict[int, Scalar]:
        """The polynomial in ``y`` multiplying ``x^i`` (as ``{degree: coeff}``)."""
        i = tuple(i)
        return {j: c for (e, j), c in self._terms.items() if e == i}

    def y_coefficient(self, j: int) -> XPoly:
        """The Laurent polynomial in x multiplying ``y^j``."""
        return {e: c for (e, d), c in self._terms.items() if d == j}

    def at_y_zero(self) -> XPoly:
        return self.y_coefficient(0)

    def scalars(self) -> list[Scalar]:
        return list(self._terms.values())

    def mode(self) -> str:
        return scalar_mode(self._terms.values())

    def is_polynomial_in_x(self) -> bool:
        return all(mi.is_natural(i) for i, _ in self._terms)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "XYPolynomial") -> None:
        if not isinstance(other, XYPolynomial):
            raise TypeError("expected XYPolynomial")
        if other.r != self.r:
            raise mi.DimensionMismatch(f"r mismatch: {self.r} vs {other.r}")

    def _merged_window(self, other: "XYPolynomial"):
        ws = [w for w in (self.window, other.window) if w is not None]
        return mi.grlex_min(ws) if ws else None

    def __add__(self, other: "XYPolynomial") -> "XYPolynomial":
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if is_zero(v):
                out.pop(k, None)
            else:
                out[k] = normalize(v)
        return XYPolynomial(self.r, out, self._merged_window(other))

    def __neg__(self) -> "XYPolynomial":
        return XYPolynomial._raw(self.r, {k: normalize(-c) for k, c in self._terms.items()}, self.window)

    def __sub__(self, other: "XYPolynomial") -> "XYPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "XYPolynomial":
        if not isinstance(other, XYPolynomial):
            other = check_scalar(other)
            if is_zero(other):
                return XYPolynomial.zero(self.r)
            return XYPolynomial._raw(self.r, {k: normalize(c * other) for k, c in self._terms.items()},
                                     self.window)
        self._check(other)
        if self.window is not None or other.window is not None:
            raise ValueError("product of truncated polynomials is not supported")
        out: dict[Key, Scalar] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (tuple(a + b for a, b in zip(i1, i2)), j1 + j2)
                v = out.get(k, 0) + c1 * c2
                if is_zero(v):
                    out.pop(k, None)
                else:
                    out[k] = v
        return XYPolynomial._raw(self.r, {k: normalize(v) for k, v in out.items()})

    __rmul__ = __mul__

    def shift_x(self, e: Sequence[int]) -> "XYPolynomial":
        """Multiply by the monomial ``x^e`` (``e`` may be negative)."""
        e = tuple(e)
        w = None if self.window is None else mi.add(self.window, e)
        return XYPolynomial._raw(self.r, {(mi.add(i, e), j): c for (i, j), c in self._terms.items()}, w)

    def divide_scalar(self, s: Scalar) -> "XYPolynomial":
        return XYPolynomial._raw(self.r, {k: divide(c, s) for k, c in self._terms.items()}, self.window)

    def map_coeffs(self, f: Callable[[Scalar], Scalar]) -> "XYPolynomial":
        return XYPolynomial(self.r, {k: f(c) for k, c in self._terms.items()}, self.window)

    def derivative_y(self) -> "XYPolynomial":
        return XYPolynomial._raw(self.r, {(i, j - 1): normalize(c * j) for (i, j), c in self._terms.items() if j > 0},
                                 self.window)

    def eval_y(self, value: Scalar) -> XPoly:
        """Evaluate at a scalar value of ``y``; returns a Laurent polynomial in x."""
        out: XPoly = {}
        for (i, j), c in self._terms.items():
            xpoly_add_into(out, {i: c * value ** j})
        return out

    def substitute_y(self, base: Mapping[MultiIndex, Scalar], e: Sequence[int]) -> "XYPolynomial":
        """Exact ``P(x, base(x) + x^e y)`` for a Laurent polynomial ``base``."""
        if self.window is not None:
            raise ValueError("exact substitution into a truncated polynomial")
        e = tuple(e)
        r = self.r
        dy = self.y_degree()
        powers: list[XPoly] = [{mi.zero(r): 1}]
        for _ in range(dy):
            powers.append(xpoly_mul(powers[-1], base))
        out: dict[Key, Scalar] = {}
        for (i, j), c in self._terms.items():
            for m in range(j + 1):
                factor = c * comb(j, m)
                shift = tuple(a + m * b for a, b in zip(i, e))
                for t, v in powers[j - m].items():
                    k = (tuple(a + b for a, b in zip(shift, t)), m)
                    val = out.get(k, 0) + factor * v
                    if is_zero(val):
                        out.pop(k, None)
                    else:
                        out[k] = val
        return XYPolynomial._raw(r, {k: normalize(v) for k, v in out.items()})

    def evaluate_xpoly(self, z: Mapping[MultiIndex, Scalar]) -> XPoly:
        """Exact ``P(x, z(x))`` for a Laurent polynomial ``z``."""
        return self.substitute_y(z, mi.zero(self.r)).at_y_zero()

    # -- equality / rendering ---------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, XYPolynomial):
            return NotImplemented
        return self.r == other.r and self._terms == other._terms and self.window == other.window

    def __hash__(self) -> int:
        return hash((self.r, frozenset(self._terms.items()), self.window))

    def __repr__(self) -> str:
        return f"XYPolynomial(r={self.r}, {render_xy(self)!r})"

    def __str__(self) -> str:
        return render_xy(self)


def x_monomial_text(i: Sequence[int]) -> str:
    parts = []
    for k, e in enumerate(i, start=1):
        if e == 0:
            continue
        if e == 1:
            parts.append(f"x[{k}]")
        elif e > 0:
            parts.append(f"x[{k}]^{e}")
        else:
            parts.append(f"x[{k}]^({e})")
    return "*".join(parts)


def term_text(c: Scalar, i: Sequence[int], j: int) -> tuple[bool, str]:
    """Render ``c x^i y^j``; returns ``(negative, text without leading sign)``."""
    mono = x_monomial_text(i)
    if j == 1:
        mono = (mono + "*" if mono else "") + "y"
    elif j > 1:
        mono = (mono + "*" if mono else "") + f"y^{j}"
    if needs_parens(c):
        cs = render_scalar(c)
        return False, f"({cs})" + (f"*{mono}" if mono else "")
    cs = render_scalar(c)
    neg = cs.startswith("-")
    if neg:
        cs = cs[1:]
    if not mono:
        return neg, cs
    if cs == "1":
        return neg, mono
    return neg, f"{cs}*{mono}"


def render_terms(items: Iterable[tuple[Scalar, Sequence[int], int]]) -> str:
    out = []
    for t, (c, i, j) in enumerate(items):
        neg, text = term_text(c, i, j)
        if t == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out) if out else "0"


def render_xy(p: XYPolynomial) -> str:
    """Canonical text; terms in (grlex x-exponent, y-degree) order."""
    return render_terms((c, i, j) for (i, j), c in p.sorted_items())


def render_xpoly(p: Mapping[MultiIndex, Scalar]) -> str:
    items = sorted(p.items(), key=lambda kv: mi.grlex_key(kv[0]))
    return render_terms((c, i, 0) for i, c in items)
