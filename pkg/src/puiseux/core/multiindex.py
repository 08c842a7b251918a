"""Multi-indices and the monomial orders used throughout the toolkit.

A multi-index is represented as a plain ``tuple[int, ...]`` of length ``r``.
Entries may be negative (Laurent exponents); series indices live in a
bounded-below cone, usually ``N^r``.

Orders implemented here:

* ``lex``   -- lexicographic comparison of the entries;
* ``grlex`` -- compare the total degree ``|a|`` first, then ``lex``;
* product  -- the partial order ``a <= b`` iff ``a_k <= b_k`` for all ``k``;
* ``alex``  -- order on pairs ``(i, j)``: compare ``j`` first, then ``grlex`` on ``i``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator, Sequence

MultiIndex = tuple[int, ...]
Pair = tuple[MultiIndex, int]


class DimensionMismatch(ValueError):
    """Raised when two multi-indices of different length are combined."""


def _check_same(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise DimensionMismatch(f"dimension mismatch: {tuple(a)} vs {tuple(b)}")


def degree(a: Sequence[int]) -> int:
    """Total degree ``|a|``."""
    return sum(a)


def zero(r: int) -> MultiIndex:
    return (0,) * r


def unit(r: int, k: int) -> MultiIndex:
    """The ``k``-th unit vector (``k`` is 1-based, as in ``x_1, ..., x_r``)."""
    if not 1 <= k <= r:
        raise ValueError(f"unit index {k} out of range for r={r}")
    return tuple(1 if t == k - 1 else 0 for t in range(r))


def last_unit(r: int) -> MultiIndex:
    """``(0, ..., 0, 1)``: the smallest element of ``N^r`` above ``0`` in grlex."""
    return unit(r, r)


def add(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    _check_same(a, b)
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    _check_same(a, b)
    return tuple(x - y for x, y in zip(a, b))


def scale(c: int, a: Sequence[int]) -> MultiIndex:
    return tuple(c * x for x in a)


def _cmp(x, y) -> int:
    return (x > y) - (x < y)


def lex_cmp(a: Sequence[int], b: Sequence[int]) -> int:
    """Return -1, 0 or 1 comparing ``a`` and ``b`` lexicographically."""
    _check_same(a, b)
    return _cmp(tuple(a), tuple(b))


def grlex_key(a: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sort key realising the grlex order."""
    return (sum(a), tuple(a))


def grlex_cmp(a: Sequence[int], b: Sequence[int]) -> int:
    """Return -1, 0 or 1 comparing ``a`` and ``b`` in grlex order."""
    _check_same(a, b)
    return _cmp(grlex_key(a), grlex_key(b))


def grlex_lt(a: Sequence[int], b: Sequence[int]) -> bool:
    return grlex_cmp(a, b) < 0


def grlex_le(a: Sequence[int], b: Sequence[int]) -> bool:
    return grlex_cmp(a, b) <= 0


def grlex_min(items: Iterable[Sequence[int]]) -> MultiIndex:
    return tuple(min(items, key=grlex_key))


def grlex_max(items: Iterable[Sequence[int]]) -> MultiIndex:
    return tuple(max(items, key=grlex_key))


def grlex_positive(a: Sequence[int]) -> bool:
    """``a >grlex 0``."""
    return grlex_key(a) > (0, (0,) * len(a))


def product_le(a: Sequence[int], b: Sequence[int]) -> bool:
    """Product (partial) order: ``a_k <= b_k`` for every ``k``."""
    _check_same(a, b)
    return all(x <= y for x, y in zip(a, b))


def is_natural(a: Sequence[int]) -> bool:
    return all(x >= 0 for x in a)


def alex_key(pair: Pair) -> tuple[int, tuple[int, MultiIndex]]:
    """Sort key for pairs ``(i, j)``: ``j`` first, then grlex on ``i``."""
    i, j = pair
    return (j, grlex_key(i))


def alex_cmp(p: Pair, q: Pair) -> int:
    _check_same(p[0], q[0])
    return _cmp(alex_key(p), alex_key(q))


def compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    """All ``parts``-tuples of naturals with sum ``total``, in decreasing lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def monomials_of_degree(r: int, d: int) -> list[MultiIndex]:
    """Elements of ``N^r`` of total degree ``d`` in increasing lex order."""
    if d < 0:
        return []
    return sorted(compositions(d, r))


def grlex_upto(r: int, bound: Sequence[int]) -> list[MultiIndex]:
    """All ``n`` in ``N^r`` with ``n <=grlex bound``, in increasing grlex order."""
    key = grlex_key(bound)
    out: list[MultiIndex] = []
    for d in range(0, max(sum(bound), -1) + 1):
        for m in monomials_of_degree(r, d):
            if grlex_key(m) <= key:
                out.append(m)
    return out


def upto_degree(r: int, d: int) -> list[MultiIndex]:
    """All ``n`` in ``N^r`` with ``|n| <= d`` in increasing grlex order."""
    out: list[MultiIndex] = []
    for t in range(d + 1):
        out.extend(monomials_of_degree(r, t))
    return out


def grlex_successor(k: Sequence[int]) -> MultiIndex:
    """Immediate successor of ``k`` in ``(N^r, <=grlex)``.

    Within a degree class this is the next element in lex order; the last
    element ``(d, 0, ..., 0)`` of a class is followed by ``(0, ..., 0, d + 1)``.
    """
    k = tuple(k)
    if not is_natural(k):
        raise ValueError(f"grlex_successor needs a natural multi-index, got {k}")
    r = len(k)
    if r == 0:
        raise DimensionMismatch("empty multi-index")
    # next lex element with the same degree: find the rightmost position t < r-1
    # whose entry can be increased by moving one unit from the tail.
    tail = 0
    for t in range(r - 1, 0, -1):
        tail += k[t]
        if tail > 0:
            # increase k[t-1] by one, put the rest (tail-1) in the last slot
            out = list(k[: t - 1]) + [k[t - 1] + 1] + [0] * (r - t)
            out[-1] += tail - 1
            return tuple(out)
    d = sum(k)
    return (0,) * (r - 1) + (d + 1,)


def grlex_predecessor(k: Sequence[int]) -> MultiIndex | None:
    """Immediate predecessor of ``k`` in ``(N^r, <=grlex)``; ``None`` for ``0``."""
    k = tuple(k)
    if not is_natural(k):
        raise ValueError(f"grlex_predecessor needs a natural multi-index, got {k}")
    r = len(k)
    d = sum(k)
    if d == 0:
        return None
    cls = monomials_of_degree(r, d)
    pos = cls.index(k)
    if pos > 0:
        return cls[pos - 1]
    return (d - 1,) + (0,) * (r - 1)


def grlex_range(start: Sequence[int], stop: Sequence[int]) -> Iterator[MultiIndex]:
    """Elements ``n`` of ``N^r`` with ``start <=grlex n <=grlex stop``."""
    cur = tuple(start)
    stop_key = grlex_key(stop)
    while grlex_key(cur) <= stop_key:
        yield cur
        cur = grlex_successor(cur)


def subsets_in_order(items: Sequence, size: int) -> Iterator[tuple]:
    """``size``-subsets of ``items`` as sorted subsequences, lexicographically by position."""
    return combinations(items, size)


def render_index(a: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in a) + ")"
