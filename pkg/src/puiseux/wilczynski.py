"""Wilczynski matrices: algebraicity tests and annihilator reconstruction.

Given a support shape ``(F, G)`` and a series ``y0 = sum c_n x^n`` the
Wilczynski vector of the pair ``(i, j)`` has entry ``C^{(j)}_{n-i}`` at row
``n`` when ``n >= i`` in the product order (and ``0`` otherwise); for ``j = 0``
it is the indicator of row ``i``.  A polynomial with support in ``F u G``
annihilates ``y0`` exactly when its coefficient vector is in the kernel of
this infinite matrix.  The reduced matrix drops the ``G`` columns and their
indicator rows; the ``G`` coefficients are then recovered from the rows that
were removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .core import multiindex as mi
from .core.linalg import IncrementalBasis, ff_det, greedy_independent
from .core.multiindex import MultiIndex, Pair
from .core.polynomial import XYPolynomial
from .core.scalar import Scalar, is_zero, normalize, render_scalar
from .core.series import InsufficientTruncation, TruncatedSeries, evaluate_on_series


class NoValidReconstruction(ValueError):
    """The series is not algebraic relative to the shape at the probed depth."""


# ---------------------------------------------------------------------------
# support shapes


@dataclass(frozen=True)
class SupportShape:
    """Two strictly alex-increasing sequences of pairs ``(i, j)``."""

    r: int
    F: tuple[Pair, ...]
    G: tuple[Pair, ...] = ()

    def __post_init__(self):
        F = tuple((tuple(int(t) for t in i), int(j)) for i, j in self.F)
        G = tuple((tuple(int(t) for t in i), int(j)) for i, j in self.G)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)
        if not F:
            raise ValueError("F must be nonempty")
        for i, j in F + G:
            if len(i) != self.r:
                raise mi.DimensionMismatch(f"pair {(i, j)} does not have r={self.r} exponents")
            if not mi.is_natural(i):
                raise ValueError(f"pair {(i, j)} has a negative exponent")
        for i, j in F:
            if j < 1:
                raise ValueError(f"F pair {(i, j)} must have y-degree >= 1")
        for i, j in G:
            if j != 0 or sum(i) == 0:
                raise ValueError(f"G pair {(i, j)} must have y-degree 0 and |i| > 0")
        for seq, name in ((F, "F"), (G, "G")):
            keys = [mi.alex_key(p) for p in seq]
            if any(a >= b for a, b in zip(keys, keys[1:])):
                raise ValueError(f"{name} is not strictly increasing in alex order")

    @classmethod
    def from_pairs(cls, r: int, pairs: Iterable[Pair]) -> "SupportShape":
        """Split a set of pairs into ``F`` (``j >= 1``) and ``G`` (``j = 0``), sorted."""
        pairs = sorted({(tuple(i), j) for i, j in pairs}, key=mi.alex_key)
        return cls(r, tuple(p for p in pairs if p[1] >= 1), tuple(p for p in pairs if p[1] == 0))

    @classmethod
    def of_polynomial(cls, P: XYPolynomial) -> "SupportShape":
        return cls.from_pairs(P.r, P.support())

    @classmethod
    def full(cls, r: int, dx: int, dy: int) -> "SupportShape":
        """All pairs with ``|i| <= dx`` and ``j <= dy`` except ``(0, 0)``."""
        pairs = [(i, j) for j in range(dy + 1) for i in mi.upto_degree(r, dx) if (j, sum(i)) != (0, 0)]
        return cls.from_pairs(r, pairs)

    @property
    def dx(self) -> int:
        return max(sum(i) for i, _ in self.F + self.G)

    @property
    def dy(self) -> int:
        return max(j for _, j in self.F)

    @property
    def depth(self) -> int:
        """``N = 2 dx dy``."""
        return 2 * self.dx * self.dy

    def columns(self, reduced: bool = True) -> tuple[Pair, ...]:
        return self.F if reduced else self.G + self.F

    def g_rows(self) -> set[MultiIndex]:
        return {i for i, _ in self.G}


# ---------------------------------------------------------------------------
# matrix view


@dataclass(frozen=True)
class WilczynskiView:
    """Lazily evaluated window of the (reduced) Wilczynski matrix."""

    shape: SupportShape
    series: TruncatedSeries
    row_limit: MultiIndex
    reduced: bool = True

    def __post_init__(self):
        if self.series.r != self.shape.r:
            raise mi.DimensionMismatch("series and shape dimensions differ")
        object.__setattr__(self, "row_limit", tuple(self.row_limit))

    def rows(self) -> list[MultiIndex]:
        skip = self.shape.g_rows() if self.reduced else set()
        return [n for n in mi.grlex_upto(self.shape.r, self.row_limit) if n not in skip]

    def columns(self) -> tuple[Pair, ...]:
        return self.shape.columns(self.reduced)

    def entry(self, row: Sequence[int], col: Pair) -> Scalar:
        return wilczynski_entry(self, row, col)

    def row_vector(self, row: Sequence[int], cols: Sequence[Pair] | None = None) -> list[Scalar]:
        return [self.entry(row, c) for c in (cols if cols is not None else self.columns())]

    def submatrix(self, rows: Sequence[MultiIndex], cols: Sequence[Pair]) -> list[list[Scalar]]:
        return [[self.entry(n, c) for c in cols] for n in rows]


def wilczynski_entry(view: WilczynskiView, row: Sequence[int], col: Pair) -> Scalar:
    """Entry ``C^{(j)}_{n-i}`` of column ``(i, j)`` at row ``n`` (indicator for ``j = 0``)."""
    n = tuple(row)
    i, j = tuple(col[0]), col[1]
    if mi.grlex_lt(view.row_limit, n):
        raise InsufficientTruncation(f"row {n} lies beyond the view limit {view.row_limit}")
    if j == 0:
        return 1 if n == i else 0
    if not mi.product_le(i, n):
        return 0
    return view.series.power_coeff(j, mi.sub(n, i))


def _check_minor_args(view: WilczynskiView, rows: Sequence[MultiIndex], cols: Sequence[Pair]) -> None:
    if len(rows) != len(cols):
        raise ValueError(f"minor needs as many rows as columns ({len(rows)} vs {len(cols)})")
    keys = [mi.grlex_key(n) for n in rows]
    if any(a >= b for a, b in zip(keys, keys[1:])):
        raise ValueError("minor rows must be strictly grlex-increasing")
    g = view.shape.g_rows()
    if any(n in g for n in rows):
        raise ValueError("minor rows must avoid the G indicator rows")
    F = view.shape.F
    pos = []
    for c in cols:
        if c not in F:
            raise ValueError(f"minor column {c} is not in F")
        pos.append(F.index(c))
    if any(a >= b for a, b in zip(pos, pos[1:])):
        raise ValueError("minor columns must be a subsequence of F")


def wilczynski_minor(view: WilczynskiView, rows: Sequence[Sequence[int]], cols: Sequence[Pair]) -> Scalar:
    """The Wilczynski polynomial ``Q_{K,I}`` evaluated on the view's series."""
    rows = [tuple(n) for n in rows]
    cols = [(tuple(i), j) for i, j in cols]
    _check_minor_args(view, rows, cols)
    return ff_det(view.submatrix(rows, cols))


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class ReconstructionResult:
    """An annihilating polynomial built from one canonical nonzero minor."""

    shape: SupportShape
    coefficients: dict[Pair, Scalar]
    used_minor: tuple[tuple[MultiIndex, ...], tuple[Pair, ...]]
    rank: int
    verified_to_order: int | None = None

    def polynomial(self) -> XYPolynomial:
        return XYPolynomial(self.shape.r, {(i, j): c for (i, j), c in self.coefficients.items()})

    def coefficient(self, i: Sequence[int], j: int) -> Scalar:
        return self.coefficients.get((tuple(i), j), 0)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "minor": {
                "rows": [list(n) for n in self.used_minor[0]],
                "cols": [list(i) + [j] for i, j in self.used_minor[1]],
            },
            "coefficients": [
                {"pair": list(i) + [j], "coeff": render_scalar(self.coefficients[(i, j)])}
                for i, j in self.shape.G + self.shape.F
            ],
            "polynomial": str(self.polynomial()),
            "verified_to_order": self.verified_to_order,
        }


def g_coefficients(series: TruncatedSeries, shape: SupportShape, f_coeffs: dict[Pair, Scalar]) -> dict[Pair, Scalar]:
    """``a_{k,0} = - sum_{(i,j) in F, i <= k} a_{i,j} C^{(j)}_{k-i}`` for ``(k, 0)`` in ``G``."""
    out: dict[Pair, Scalar] = {}
    for k, _ in shape.G:
        total: Scalar = 0
        for (i, j), a in f_coeffs.items():
            if is_zero(a) or not mi.product_le(i, k):
                continue
            total = total + a * series.power_coeff(j, mi.sub(k, i))
        out[(k, 0)] = normalize(-total)
    return out


def cramer_coefficients(view: WilczynskiView, rows: Sequence[MultiIndex], cols: Sequence[Pair],
                        extra: Pair | None = None) -> dict[Pair, Scalar]:
    """Kernel vector of ``M[rows, cols + extra]`` by signed maximal minors.

    ``F' = cols u {extra}`` in alex order; the coefficient at position ``p``
    (1-based) of ``F'`` is ``(-1)^p`` times the minor with that column removed.
    Columns of ``F`` outside ``F'`` get coefficient zero.
    """
    F = view.shape.F
    cols = [(tuple(i), j) for i, j in cols]
    if extra is None:
        extra = next((c for c in F if c not in cols), None)
        if extra is None:
            raise NoValidReconstruction("the minor already uses every column of F")
    extra = (tuple(extra[0]), extra[1])
    fprime = sorted(set(cols) | {extra}, key=mi.alex_key)
    rows = [tuple(n) for n in rows]
    block = view.submatrix(rows, fprime)
    coeffs: dict[Pair, Scalar] = {c: 0 for c in F}
    for p, c in enumerate(fprime, start=1):
        sub = [[row[t] for t in range(len(fprime)) if t != p - 1] for row in block]
        d = ff_det(sub)
        coeffs[c] = normalize(d if p % 2 == 0 else -d)
    return coeffs


def reconstruct_from_minor(series: TruncatedSeries, shape: SupportShape, rows: Sequence[Sequence[int]],
                           cols: Sequence[Pair], extra: Pair | None = None,
                           rank: int | None = None) -> ReconstructionResult:
    """Reconstruction formulas attached to the nonzero minor ``(rows, cols)``.

    No verification is performed here; :func:`reconstruct` adds the
    depth check.
    """
    rows = tuple(tuple(n) for n in rows)
    cols = tuple((tuple(i), j) for i, j in cols)
    limit = mi.grlex_max(rows) if rows else mi.zero(shape.r)
    view = WilczynskiView(shape, series, limit)
    _check_minor_args(view, list(rows), list(cols))
    if rows:
        fc = cramer_coefficients(view, rows, cols, extra)
    else:
        fc = {c: 0 for c in shape.F}
        fc[shape.F[0] if extra is None else extra] = 1
    gc = g_coefficients(series, shape, fc)
    coeffs = {**gc, **fc}
    if all(is_zero(v) for v in coeffs.values()):
        raise NoValidReconstruction("the chosen minor vanishes: all coefficients are zero")
    return ReconstructionResult(shape, coeffs, (rows, cols), len(rows) if rank is None else rank)


def _require_depth(series: TruncatedSeries, shape: SupportShape, depth: int) -> None:
    r = shape.r
    need = (depth,) + (0,) * (r - 1)
    if not series.knows(need):
        raise InsufficientTruncation(f"the series must be known through {need} (depth {depth})")
    if not series.is_natural():
        raise ValueError("Wilczynski matrices need a series supported in N^r")
    if not is_zero(series.coeff(mi.zero(r))):
        raise ValueError("the series must have zero constant term")
    if is_zero(series.coeff(mi.last_unit(r))):
        raise ValueError("the series must have a nonzero coefficient at (0,...,0,1)")


@dataclass(frozen=True)
class RankProfile:
    depth: int
    rank: int
    rows: tuple[MultiIndex, ...]
    cols: tuple[Pair, ...]


def rank_profile(series: TruncatedSeries, shape: SupportShape, depth: int | None = None) -> RankProfile:
    """Rank of ``M_N`` and its canonical nonzero maximal minor.

    Rows are scanned in grlex order and kept greedily when independent, which
    yields the lexicographically smallest row set; the columns are then
    chosen greedily (alex order) inside those rows.
    """
    N = shape.depth if depth is None else depth
    _require_depth(series, shape, N)
    view = WilczynskiView(shape, series, (N,) + (0,) * (shape.r - 1))
    F = shape.F
    basis = IncrementalBasis(len(F))
    chosen: list[MultiIndex] = []
    for n in view.rows():
        if sum(n) > N:
            break
        if basis.add(view.row_vector(n)):
            chosen.append(n)
            if len(chosen) == len(F):
                break
    sub = view.submatrix(chosen, F)
    col_vectors = [[row[t] for row in sub] for t in range(len(F))]
    cpos = greedy_independent(col_vectors, len(chosen)) if chosen else []
    return RankProfile(N, len(chosen), tuple(chosen), tuple(F[t] for t in cpos))


def verify_annihilation(P: XYPolynomial, series: TruncatedSeries, order: int) -> bool:
    """Whether ``ord_x P(x, z_order) > order`` for the truncation ``z_order``."""
    r = series.r
    z = series.truncate((order,) + (0,) * (r - 1))
    exact = TruncatedSeries(r, z.coeffs, None)
    values, _ = evaluate_on_series(P, exact)
    return all(sum(e) > order for e, c in values.items() if not is_zero(c))


def reconstruct(series: TruncatedSeries, shape: SupportShape, *, exhaustive: bool = False,
                depth: int | None = None) -> ReconstructionResult:
    """Annihilating polynomial with support in ``F u G`` from the truncation at ``N = 2 dx dy``."""
    prof = rank_profile(series, shape, depth)
    N = prof.depth
    if prof.rank == len(shape.F):
        raise NoValidReconstruction(
            f"M_N has full column rank {prof.rank} at depth {N}: not algebraic relative to the shape")
    res = reconstruct_from_minor(series, shape, prof.rows, prof.cols, rank=prof.rank)
    if verify_annihilation(res.polynomial(), series, N):
        return ReconstructionResult(res.shape, res.coefficients, res.used_minor, res.rank, N)
    if exhaustive:
        for alt in _other_minors(series, shape, prof):
            if verify_annihilation(alt.polynomial(), series, N):
                return ReconstructionResult(alt.shape, alt.coefficients, alt.used_minor, alt.rank, N)
    raise NoValidReconstruction(f"reconstructed polynomial does not vanish to order > {N}")


def _other_minors(series: TruncatedSeries, shape: SupportShape, prof: RankProfile):
    N = prof.depth
    view = WilczynskiView(shape, series, (N,) + (0,) * (shape.r - 1))
    rows = view.rows()
    rho = prof.rank
    for K in combinations(rows, rho):
        for I in combinations(shape.F, rho):
            if (K, I) == (prof.rows, prof.cols):
                continue
            if is_zero(ff_det(view.submatrix(list(K), list(I)))):
                continue
            for extra in shape.F:
                if extra in I:
                    continue
                try:
                    yield reconstruct_from_minor(series, shape, K, I, extra, rho)
                except NoValidReconstruction:
                    continue


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class NotAlgebraicAtDepth:
    depth: int
    rows: tuple[MultiIndex, ...]
    cols: tuple[Pair, ...]
    witness: Scalar

    def to_json(self) -> dict:
        return {
            "verdict": "NotAlgebraicAtDepth",
            "depth": self.depth,
            "witness": {
                "rows": [list(n) for n in self.rows],
                "cols": [list(i) + [j] for i, j in self.cols],
                "minor": render_scalar(self.witness),
            },
        }


@dataclass(frozen=True)
class ConsistentWithReconstruction:
    result: ReconstructionResult

    def to_json(self) -> dict:
        return {"verdict": "ConsistentWithReconstruction", **self.result.to_json()}


def check_algebraic(series: TruncatedSeries, shape: SupportShape, depth: int | None = None):
    """Certify non-algebraicity by a nonzero maximal minor, or reconstruct."""
    prof = rank_profile(series, shape, depth)
    if prof.rank == len(shape.F):
        view = WilczynskiView(shape, series, (prof.depth,) + (0,) * (shape.r - 1))
        witness = wilczynski_minor(view, prof.rows, prof.cols)
        return NotAlgebraicAtDepth(prof.depth, prof.rows, prof.cols, witness)
    res = reconstruct(series, shape, depth=prof.depth)
    return ConsistentWithReconstruction(res)


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class ReconstructionBounds:
    N: int
    D: int
    f_degree_bound: int
    g_degree_bounds: dict[Pair, int] = field(default_factory=dict)
    lambda_bound: int = 0

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "D": self.D,
            "F_degree_bound": self.f_degree_bound,
            "G_degree_bounds": [{"pair": list(i) + [j], "bound": b} for (i, j), b in self.g_degree_bounds.items()],
            "Lambda_bound": self.lambda_bound,
        }


def reconstruction_bounds(dx: int, dy: int, r: int, shape: SupportShape | None = None) -> ReconstructionBounds:
    """Depth, row count, coefficient degree bounds and the bound on the number of formulas."""
    if dx < 1 or dy < 1 or r < 1:
        raise ValueError("dx, dy and r must be positive")
    N = 2 * dx * dy
    g_len = len(shape.G) if shape is not None else 0
    D = comb(N + r, r) - g_len
    fdeg = dy * (dy + 1) * comb(dx + r, r) // 2 - 1
    gdeg = {(i, j): fdeg + sum(i) for i, j in (shape.G if shape is not None else ())}
    f = len(shape.F) if shape is not None else comb(dx + r, r) * dy
    g = min(D, f - 1)
    lam = f + sum(comb(f - 1, t) * comb(D, t) for t in range(1, g + 1))
    return ReconstructionBounds(N, D, fdeg, gdeg, lam)
