"""Exact determinants and rank profiles over the scalar rings."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .scalar import Scalar, SymPoly, check_scalar, divide, is_zero, normalize, scalar_mode

Matrix = Sequence[Sequence[Scalar]]


def _validate(M: Matrix) -> list[list[Scalar]]:
    rows = [list(row) for row in M]
    n = len(rows)
    for row in rows:
        if len(row) != n:
            raise ValueError("determinant of a non-square matrix")
        for c in row:
            check_scalar(c)
    return rows


def ff_det(M: Matrix) -> Scalar:
    """Exact determinant.

    Rational matrices use Gaussian elimination over ``Fraction``; as soon as
    a symbolic entry is present the fraction-free Bareiss recurrence is used,
    whose divisions are exact by construction.
    """
    rows = _validate(M)
    n = len(rows)
    if n == 0:
        return 1
    if scalar_mode(c for row in rows for c in row) == "rational":
        return _det_rational(rows)
    return _det_bareiss(rows)


def _det_rational(rows: list[list[Scalar]]) -> Scalar:
    a = [[Fraction(c) for c in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        p = a[k][k]
        det *= p
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                row_i, row_k = a[i], a[k]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return normalize(det)


def _det_bareiss(rows: list[list[Scalar]]) -> Scalar:
    a = [[c for c in row] for row in rows]
    n = len(a)
    sign = 1
    prev: Scalar = 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if not is_zero(a[i][k])), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        p = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * p - a[i][k] * a[k][j]
                a[i][j] = divide(num, prev) if not (isinstance(prev, int) and prev == 1) else normalize(num)
            a[i][k] = 0
        prev = p
    res = a[n - 1][n - 1]
    return normalize(res if sign == 1 else -res)


def laplace_det(M: Matrix) -> Scalar:
    """Cofactor expansion along the first row (reference oracle, exponential)."""
    rows = [list(r) for r in M]
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total: Scalar = 0
    for j in range(n):
        c = rows[0][j]
        if is_zero(c):
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = c * laplace_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return normalize(total)


class IncrementalBasis:
    """Row-echelon basis that answers "is this vector independent?" exactly.

    Rational vectors are reduced over ``Fraction``; symbolic vectors by
    cross-multiplication, which never divides.
    """

    def __init__(self, width: int):
        self.width = width
        self._rows: list[tuple[int, list[Scalar]]] = []  # (pivot column, reduced row)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: list[Scalar]) -> list[Scalar]:
        symbolic = any(isinstance(c, SymPoly) for c in v)
        for pc, row in self._rows:
            c = v[pc]
            if is_zero(c):
                continue
            p = row[pc]
            if symbolic or isinstance(p, SymPoly):
                v = [normalize(p * x - c * y) for x, y in zip(v, row)]
                symbolic = True
            else:
                f = Fraction(c) / p
                v = [normalize(x - f * y) for x, y in zip(v, row)]
        return v

    def add(self, v: Iterable[Scalar]) -> bool:
        """Reduce ``v``; if it is independent keep it and return ``True``."""
        v = self._reduce([check_scalar(c) for c in v])
        for pc, c in enumerate(v):
            if not is_zero(c):
                self._rows.append((pc, v))
                return True
        return False


def greedy_independent(vectors: Iterable[Sequence[Scalar]], width: int, limit: int | None = None) -> list[int]:
    """Positions of the lexicographically first maximal independent subfamily."""
    basis = IncrementalBasis(width)
    chosen: list[int] = []
    for pos, v in enumerate(vectors):
        if basis.add(v):
            chosen.append(pos)
            if limit is not None and len(chosen) >= limit:
                break
    return chosen


def rank(M: Matrix) -> int:
    rows = [list(r) for r in M]
    if not rows:
        return 0
    return len(greedy_independent(rows, len(rows[0])))
