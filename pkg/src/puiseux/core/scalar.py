"""Exact scalars.

Two realisations of the coefficient ring are supported:

* rational numbers, realised by :class:`fractions.Fraction` (plain ``int`` is
  accepted and treated as a rational with denominator one);
* :class:`SymPoly`, sparse polynomials in named symbols with rational
  coefficients.  Symbols may carry negative exponents, so that division by a
  monomial (a unit of the Laurent ring) is exact; division by any other
  polynomial is performed only when it is exact.

Every value is kept in normal form, so ``==`` is the zero test.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]
Scalar = Union[int, Fraction, "SymPoly"]

# A monomial in the symbols: sorted tuple of (name, exponent), exponent != 0.
Mono = tuple[tuple[str, int], ...]

_INDEXED = re.compile(r"^(?P<base>.*?)_\{(?P<idx>-?\d+(?:,-?\d+)*)\}$")


class RingMismatch(TypeError):
    """An operand is not an exact scalar of a supported ring."""


class NotDivisible(ArithmeticError):
    """Exact division was requested but the divisor does not divide."""


def symbol_key(name: str) -> tuple:
    """Natural sort key for symbol names: ``c_{0,10}`` sorts after ``c_{0,2}``."""
    m = _INDEXED.match(name)
    if m:
        return (m.group("base"), 1, tuple(int(t) for t in m.group("idx").split(",")), name)
    return (name, 0, (), name)


def _norm_number(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _check_number(c) -> Number:
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise RingMismatch(f"not an exact scalar: {c!r} ({type(c).__name__})")
    return _norm_number(c)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        v = d.get(name, 0) + e
        if v:
            d[name] = v
        else:
            d.pop(name, None)
    return tuple(sorted(d.items(), key=lambda t: symbol_key(t[0])))


def _mono_pow(a: Mono, k: int) -> Mono:
    if k == 0:
        return ()
    return tuple((n, e * k) for n, e in a)


def _mono_degree(a: Mono) -> int:
    return sum(e for _, e in a)


class SymPoly:
    """Sparse Laurent polynomial in named symbols with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Mono, Number] | None = None):
        clean: dict[Mono, Number] = {}
        if terms:
            for mono, c in terms.items():
                c = _check_number(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict[Mono, Number]) -> "SymPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def symbol(cls, name: str) -> "SymPoly":
        if not name:
            raise ValueError("empty symbol name")
        return cls._raw({((name, 1),): 1})

    @classmethod
    def const(cls, c: Number) -> "SymPoly":
        c = _check_number(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def monomial(cls, coeff: Number, exps: Mapping[str, int]) -> "SymPoly":
        mono = tuple(sorted(((n, e) for n, e in exps.items() if e), key=lambda t: symbol_key(t[0])))
        return cls({mono: coeff})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[Mono, Number]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((), 0)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def symbols(self) -> set[str]:
        return {n for mono in self._terms for n, _ in mono}

    def degrees(self) -> set[int]:
        return {_mono_degree(m) for m in self._terms}

    def total_degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of zero polynomial")
        return max(self.degrees())

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def has_negative_exponents(self) -> bool:
        return any(e < 0 for mono in self._terms for _, e in mono)

    # -- arithmetic ---------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._terms)

    def __neg__(self) -> "SymPoly":
        return SymPoly._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "SymPoly":
        return self

    def __add__(self, other) -> "SymPoly":
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = _norm_number(v)
            else:
                out.pop(m, None)
        return SymPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "SymPoly":
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SymPoly":
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "SymPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = _norm_number(other)
            if not other:
                return SymPoly._raw({})
            if other == 1:
                return self
            return SymPoly._raw({m: _norm_number(c * other) for m, c in self._terms.items()})
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        if len(other._terms) < len(self._terms):
            a, b = other, self
        else:
            a, b = self, other
        out: dict[Mono, Number] = {}
        for m1, c1 in a._terms.items():
            for m2, c2 in b._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return SymPoly._raw({m: _norm_number(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SymPoly":
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            return self.inverse() ** (-k)
        result = SymPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "SymPoly":
        """Inverse of a unit (a nonzero monomial)."""
        if len(self._terms) != 1:
            raise NotDivisible(f"{self} is not a unit of the Laurent ring")
        (mono, c), = self._terms.items()
        return SymPoly._raw({_mono_pow(mono, -1): _norm_number(Fraction(1) / c)})

    def __truediv__(self, other) -> "SymPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / other)
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if len(other._terms) == 1:
            return self * other.inverse()
        return exact_divide(self, other)

    def __rtruediv__(self, other) -> "SymPoly":
        other = as_sympoly(other)
        if other is None:
            return NotImplemented
        return other / self

    # -- equality / hashing --------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, SymPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return not self._terms
            return self._terms == {(): _norm_number(other)}
        return NotImplemented

    def __ne__(self, other) -> bool:
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation ----------------------------------------------------
    def subs(self, mapping: Mapping[str, "Scalar"]) -> "Scalar":
        """Substitute symbols by scalars; the result is normalised."""
        if not mapping:
            return self
        total: Scalar = 0
        for mono, c in self._terms.items():
            term: Scalar = c
            rest: dict[str, int] = {}
            for name, e in mono:
                if name in mapping:
                    val = mapping[name]
                    if e < 0:
                        if isinstance(val, SymPoly):
                            term = term * val.inverse() ** (-e)
                        else:
                            term = term * Fraction(1, 1) / Fraction(val) ** (-e)
                    else:
                        term = term * val ** e
                else:
                    rest[name] = e
            if rest:
                term = term * SymPoly.monomial(1, rest)
            total = total + term
        return normalize(total)

    def __repr__(self) -> str:
        return f"SymPoly({render_scalar(self)!r})"

    def __str__(self) -> str:
        return render_scalar(self)


# ---------------------------------------------------------------------------
# helpers shared by both realisations


def as_sympoly(x) -> SymPoly | None:
    if isinstance(x, SymPoly):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return SymPoly.const(x)
    return None


def check_scalar(x) -> Scalar:
    """Validate that ``x`` is an exact scalar; raise :class:`RingMismatch` otherwise."""
    if isinstance(x, SymPoly):
        return x
    return _check_number(x)


def normalize(x: Scalar) -> Scalar:
    """Collapse constant :class:`SymPoly` values to plain rationals."""
    if isinstance(x, SymPoly):
        return x.constant_value() if x.is_constant() else x
    return _check_number(x)


def is_zero(x: Scalar) -> bool:
    if isinstance(x, SymPoly):
        return x.is_zero()
    return x == 0


def is_symbolic(x: Scalar) -> bool:
    return isinstance(x, SymPoly) and not x.is_constant()


def scalar_mode(values: Iterable[Scalar]) -> str:
    """``'symbolic'`` if any value involves a symbol, else ``'rational'``."""
    for v in values:
        check_scalar(v)
        if is_symbolic(v):
            return "symbolic"
    return "rational"


def sym(name: str) -> SymPoly:
    return SymPoly.symbol(name)


def indexed_symbol(base: str, index: Iterable[int]) -> SymPoly:
    """The symbol ``base_{i1,...,ir}``."""
    return SymPoly.symbol(f"{base}_{{{','.join(str(i) for i in index)}}}")


def divide(a: Scalar, b: Scalar) -> Scalar:
    """Exact quotient ``a / b``; rationals divide freely, polynomials only exactly."""
    if is_zero(b):
        raise ZeroDivisionError("division by zero")
    if isinstance(a, SymPoly) or isinstance(b, SymPoly):
        return normalize(as_sympoly(a) / b)
    return _norm_number(Fraction(a) / b)


def _lex_order(symbols: Iterable[str]) -> list[str]:
    return sorted(symbols, key=symbol_key)


def _mono_vector(mono: Mono, order: Mapping[str, int]) -> tuple[int, ...]:
    v = [0] * len(order)
    for n, e in mono:
        v[order[n]] = e
    return tuple(v)


def exact_divide(a: SymPoly, b: SymPoly) -> SymPoly:
    """Exact division in the Laurent polynomial ring; raise :class:`NotDivisible`.

    Leading terms are taken for the lex order on exponent vectors (a group
    order, so it is compatible with multiplication by Laurent monomials).  The
    quotient of an exact division has per-variable exponents inside the box
    ``[min_v a - min_v b, max_v a - max_v b]``; leaving that box proves
    non-divisibility, which also guarantees termination.
    """
    a = as_sympoly(a)
    b = as_sympoly(b)
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero():
        return a
    if len(b._terms) == 1:
        return a * b.inverse()
    names = _lex_order(a.symbols() | b.symbols())
    order = {n: t for t, n in enumerate(names)}
    nv = len(names)

    def vec(mono: Mono) -> tuple[int, ...]:
        return _mono_vector(mono, order)

    avecs = [vec(m) for m in a._terms]
    bvecs = {vec(m): c for m, c in b._terms.items()}
    lo = [min(v[t] for v in avecs) - min(v[t] for v in bvecs) for t in range(nv)]
    hi = [max(v[t] for v in avecs) - max(v[t] for v in bvecs) for t in range(nv)]
    lead_b = max(bvecs)
    lead_bc = bvecs[lead_b]

    def tomono(v: tuple[int, ...]) -> Mono:
        return tuple((names[t], e) for t, e in enumerate(v) if e)

    rem: dict[tuple[int, ...], Number] = {vec(m): c for m, c in a._terms.items()}
    quot: dict[tuple[int, ...], Number] = {}
    while rem:
        lead_r = max(rem)
        qv = tuple(x - y for x, y in zip(lead_r, lead_b))
        if any(qv[t] < lo[t] or qv[t] > hi[t] for t in range(nv)):
            raise NotDivisible("polynomial division is not exact")
        qc = Fraction(rem[lead_r]) / lead_bc
        quot[qv] = _norm_number(qc)
        for bv, bc in bvecs.items():
            key = tuple(x + y for x, y in zip(qv, bv))
            val = rem.get(key, 0) - qc * bc
            if val:
                rem[key] = _norm_number(val)
            else:
                rem.pop(key, None)
    return SymPoly({tomono(v): c for v, c in quot.items()})


def rational_content(x: Scalar) -> Fraction:
    """Positive rational ``c`` with ``x / c`` having coprime integer coefficients."""
    from math import gcd

    coeffs = [c for _, c in x.items()] if isinstance(x, SymPoly) else [x]
    coeffs = [Fraction(c) for c in coeffs if c]
    if not coeffs:
        return Fraction(1)
    den = reduce(lcm, (c.denominator for c in coeffs), 1)
    num = reduce(gcd, (abs(c.numerator) * (den // c.denominator) for c in coeffs), 0)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# canonical rendering


def render_number(c: Number) -> str:
    c = _norm_number(c)
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _render_mono(mono: Mono) -> str:
    parts = []
    for name, e in mono:
        if e == 1:
            parts.append(name)
        elif e > 0:
            parts.append(f"{name}^{e}")
        else:
            parts.append(f"{name}^({e})")
    return "*".join(parts)


def sorted_terms(p: SymPoly) -> list[tuple[Mono, Number]]:
    """Terms in canonical order: decreasing total degree, then decreasing lex."""
    names = _lex_order(p.symbols())
    order = {n: t for t, n in enumerate(names)}
    return sorted(
        p.items(),
        key=lambda mc: (-_mono_degree(mc[0]), [-x for x in _mono_vector(mc[0], order)]),
    )


def render_scalar(x: Scalar) -> str:
    """Canonical text of a scalar (stable across runs)."""
    if not isinstance(x, SymPoly):
        return render_number(_check_number(x))
    if x.is_zero():
        return "0"
    out = []
    for t, (mono, c) in enumerate(sorted_terms(x)):
        neg = c < 0
        a = -c if neg else c
        body = _render_mono(mono)
        if not body:
            text = render_number(a)
        elif a == 1:
            text = body
        else:
            text = f"{render_number(a)}*{body}"
        if t == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)


def needs_parens(x: Scalar) -> bool:
    """Whether ``x`` must be parenthesised when used as a factor."""
    if isinstance(x, SymPoly):
        return len(x._terms) > 1
    return False
