"""Strongly reduced Henselian equations ``y = Q(x, y)``.

``Q`` is a Laurent polynomial in ``x`` with every exponent ``>grlex 0`` and
``Q(x, 0) != 0``.  The unique solution is computed two independent ways:

* :func:`hensel_solve` iterates over the support monoid in grlex order and
  reads each ``c_n`` off the ``x^n`` slice of ``Q(x, z~_n)``;
* :func:`fs_coefficient` evaluates the multivariate Flajolet-Soria sum
  ``c_n = sum_m (1/m) sum_M (m!/M!) A^M`` over the vectors ``M`` with
  ``|M| = m``, ``||M|| = m - 1`` and ``G(M) = n``.

Both use the linear functional ``L(n) = sum_k lambda_k n_k``: every exponent
of ``Q`` has ``L >= 1`` and every admissible ``M`` has ``|M| <= L(n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Iterator, Mapping, Sequence

from .core import multiindex as mi
from .core.multiindex import MultiIndex, Pair
from .core.polynomial import XYPolynomial
from .core.scalar import Scalar, is_zero, normalize, render_scalar
from .core.series import TruncatedSeries


class NotStronglyReduced(ValueError):
    """The equation fails one of the two defining conditions."""


# ---------------------------------------------------------------------------
# recognition


@dataclass(frozen=True)
class Diagnosis:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_strongly_reduced(Q: XYPolynomial) -> Diagnosis:
    """``w(Q) >grlex 0`` and ``Q(x, 0) != 0``, with the violated condition named."""
    if Q.is_zero():
        return Diagnosis(False, "Q is zero")
    w = Q.w()
    if not mi.grlex_positive(w):
        return Diagnosis(False, f"w(Q) = {mi.render_index(w)} is not >grlex 0")
    if not Q.at_y_zero():
        return Diagnosis(False, "Q(x,0) is identically zero")
    return Diagnosis(True, "strongly reduced")


@dataclass(frozen=True)
class HenselianEquation:
    """The equation ``y = Q(x, y)``; construction validates strong reduction."""

    Q: XYPolynomial

    def __post_init__(self):
        d = is_strongly_reduced(self.Q)
        if not d:
            raise NotStronglyReduced(d.reason)

    @property
    def r(self) -> int:
        return self.Q.r

    def terms(self) -> list[tuple[Pair, Scalar]]:
        """Terms in the deterministic order (grlex x-exponent, then y-degree)."""
        return self.Q.sorted_items()

    def generators(self) -> list[MultiIndex]:
        """Distinct x-exponents of ``Q`` in grlex order (generators of the support monoid)."""
        return sorted({i for (i, _), _ in self.Q.items()}, key=mi.grlex_key)

    def __str__(self) -> str:
        return f"y = {self.Q}"


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class FSBounds:
    iota0: MultiIndex
    lam: tuple[int, ...]

    def functional(self, n: Sequence[int]) -> int:
        """``sum_k lambda_k n_k``."""
        return sum(l * x for l, x in zip(self.lam, n))

    def mu(self, n: Sequence[int]) -> int:
        """The operational bound on ``m`` (clamped below by 1)."""
        return max(1, self.functional(n))

    def to_json(self) -> dict:
        return {"iota0": list(self.iota0), "lambda": list(self.lam)}


def lambda_weights(iota0: Sequence[int]) -> tuple[int, ...]:
    """The weights ``lambda_1, ..., lambda_r`` attached to ``iota_0``."""
    r = len(iota0)
    P = prod(1 + iota0[j] for j in range(r - 1))  # prod_{j=1}^{r-1}
    lam = []
    for k in range(1, r + 1):
        if k == r:
            lam.append(P)
        elif k == r - 1:
            lam.append(1 + P)
        else:
            lam.append(prod(1 + iota0[j - 1] for j in range(k + 1, r)) + P)
    return tuple(lam)


def fs_bounds(eq: HenselianEquation) -> FSBounds:
    r = eq.r
    iota = tuple(max(0, -min(i[k] for (i, _), _ in eq.Q.items())) for k in range(r))
    return FSBounds(iota, lambda_weights(iota))


# ---------------------------------------------------------------------------
# M vectors


@dataclass(frozen=True)
class MVector:
    """Multiplicities ``m_{i,j}`` over the terms of ``Q`` (zero entries omitted)."""

    m: tuple[tuple[Pair, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[Pair, int]) -> "MVector":
        items = [((tuple(i), j), int(k)) for (i, j), k in mapping.items() if k]
        if any(k < 0 for _, k in items):
            raise ValueError("multiplicities must be natural")
        return cls(tuple(sorted(items, key=lambda t: (mi.grlex_key(t[0][0]), t[0][1]))))

    def as_dict(self) -> dict[Pair, int]:
        return dict(self.m)

    @property
    def size(self) -> int:
        """``|M|``."""
        return sum(k for _, k in self.m)

    @property
    def weight(self) -> int:
        """``||M||``."""
        return sum(k * j for (_, j), k in self.m)

    def G(self, r: int) -> MultiIndex:
        out = [0] * r
        for (i, _), k in self.m:
            for t in range(r):
                out[t] += k * i[t]
        return tuple(out)

    def factorial(self) -> int:
        """``M! = prod m_{i,j}!``."""
        return prod(factorial(k) for _, k in self.m)

    def monomial(self, coeffs: Mapping[Pair, Scalar]) -> Scalar:
        """``A^M = prod a_{i,j}^{m_{i,j}}``."""
        out: Scalar = 1
        for p, k in self.m:
            out = out * coeffs[p] ** k
        return normalize(out)

    def to_json(self) -> list:
        return [{"pair": list(i) + [j], "m": k} for (i, j), k in self.m]


def multinomial_weight(m: int, M: MVector) -> int:
    """The natural number ``(1/m) m!/M!`` (exact division asserted)."""
    if m < 1 or M.size != m:
        raise ValueError("multinomial_weight needs |M| = m >= 1")
    if M.weight != m - 1:
        raise ValueError("multinomial_weight needs ||M|| = m - 1")
    num = factorial(m - 1)
    den = M.factorial()
    q, rem = divmod(num, den)
    assert rem == 0, f"(1/m)*m!/M! is not an integer for m={m}, M={M}"
    return q


# ---------------------------------------------------------------------------
# enumeration with fixed m


def _ratio_bounds(vals: Sequence[int]) -> tuple[int, int]:
    return (min(vals), max(vals)) if vals else (0, 0)


def _enumerate_fixed_m(keys: Sequence[Pair], r: int, n: MultiIndex, m: int) -> Iterator[dict[Pair, int]]:
    """All multiplicity vectors over ``keys`` with ``|M| = m``, ``||M|| = m-1``, ``G(M) = n``.

    Depth-first over ``keys`` in order, with interval pruning on the
    remaining count, y-weight and each coordinate of ``G``.
    """
    T = len(keys)
    # suffix minima/maxima of j and of each coordinate of i
    suf = []
    for t in range(T + 1):
        rest = keys[t:]
        js = [j for _, j in rest]
        coords = [[i[k] for i, _ in rest] for k in range(r)]
        suf.append((_ratio_bounds(js), [_ratio_bounds(c) for c in coords]))

    choice = [0] * T

    def feasible(t: int, cnt: int, wt: int, R: Sequence[int]) -> bool:
        if cnt == 0:
            return wt == 0 and not any(R)
        if t == T:
            return False
        (jlo, jhi), cb = suf[t]
        if not (cnt * jlo <= wt <= cnt * jhi):
            return False
        for k in range(r):
            lo, hi = cb[k]
            if not (cnt * lo <= R[k] <= cnt * hi):
                return False
        return True

    def rec(t: int, cnt: int, wt: int, R: list[int]) -> Iterator[dict[Pair, int]]:
        if not feasible(t, cnt, wt, R):
            return
        if cnt == 0:
            yield {keys[s]: choice[s] for s in range(T) if choice[s]}
            return
        i, j = keys[t]
        top = cnt if j == 0 else min(cnt, wt // j)
        for k in range(top, -1, -1):
            choice[t] = k
            R2 = [R[q] - k * i[q] for q in range(r)]
            yield from rec(t + 1, cnt - k, wt - k * j, R2)
        choice[t] = 0

    yield from rec(0, m, m - 1, list(n))


def enumerate_M(eq: HenselianEquation, n: Sequence[int], m: int) -> Iterator[MVector]:
    """Every admissible ``M`` for ``(n, m)``, each once, in a deterministic order."""
    if m < 1:
        raise ValueError("m must be >= 1")
    keys = [p for p, _ in eq.terms()]
    for d in _enumerate_fixed_m(keys, eq.r, tuple(n), m):
        yield MVector.of(d)


# ---------------------------------------------------------------------------
# the Flajolet-Soria coefficient


def _enumerate_all_m(keys: Sequence[Pair], lam_vals: Sequence[int], r: int, n: MultiIndex,
                     lam: Sequence[int]) -> Iterator[dict[Pair, int]]:
    """All ``M`` with ``G(M) = n`` and ``||M|| = |M| - 1`` (any ``m``).

    Every key has ``L(i) >= 1``, so the remaining budget ``L(R)`` bounds the
    remaining count.  Writing ``e = 1 - j`` the constraint is
    ``sum m_t e_t = 1``; the coordinates of ``G`` and ``e`` are pruned by
    ratio bounds relative to ``L``.
    """
    T = len(keys)
    suf = []
    for t in range(T + 1):
        rest = list(range(t, T))
        if not rest:
            suf.append(None)
            continue
        e_r = [Fraction(1 - keys[s][1], lam_vals[s]) for s in rest]
        c_r = [[Fraction(keys[s][0][k], lam_vals[s]) for s in rest] for k in range(r)]
        suf.append(((min(e_r), max(e_r)), [(min(c), max(c)) for c in c_r]))

    choice = [0] * T

    def rec(t: int, R: list[int], E: int) -> Iterator[dict[Pair, int]]:
        Lrem = sum(a * b for a, b in zip(lam, R))
        if Lrem == 0:
            if E == 0 and not any(R):
                yield {keys[s]: choice[s] for s in range(T) if choice[s]}
            return
        if Lrem < 0 or t == T:
            return
        (elo, ehi), cb = suf[t]
        if not (Lrem * elo <= E <= Lrem * ehi):
            return
        for k in range(r):
            lo, hi = cb[k]
            if not (Lrem * lo <= R[k] <= Lrem * hi):
                return
        i, j = keys[t]
        top = Lrem // lam_vals[t]
        for k in range(top, -1, -1):
            choice[t] = k
            yield from rec(t + 1, [R[q] - k * i[q] for q in range(r)], E - k * (1 - j))
        choice[t] = 0

    yield from rec(0, list(n), 1)


def fs_terms(eq: HenselianEquation, n: Sequence[int]) -> Iterator[tuple[int, MVector, int]]:
    """``(m, M, (1/m) m!/M!)`` for every admissible ``M`` contributing to ``c_n``."""
    n = tuple(n)
    if len(n) != eq.r:
        raise mi.DimensionMismatch("index length mismatch")
    b = fs_bounds(eq)
    keys = [p for p, _ in eq.terms()]
    lam_vals = [b.functional(i) for i, _ in keys]
    assert all(v >= 1 for v in lam_vals), "every exponent of Q must have positive weight"
    for d in _enumerate_all_m(keys, lam_vals, eq.r, n, b.lam):
        M = MVector.of(d)
        m = M.size
        yield m, M, multinomial_weight(m, M)


def fs_coefficient(eq: HenselianEquation, n: Sequence[int]) -> Scalar:
    """``c_n`` of the unique solution by the generalized Flajolet-Soria formula."""
    n = tuple(n)
    if not mi.grlex_positive(n):
        raise ValueError("fs_coefficient needs n >grlex 0")
    coeffs = eq.Q.terms
    total: Scalar = 0
    for _, M, w in fs_terms(eq, n):
        total = total + w * M.monomial(coeffs)
    return normalize(total)


# ---------------------------------------------------------------------------
# the classical univariate formula


def check_univariate(Q: XYPolynomial) -> None:
    """Raise unless ``y = Q(x, y)`` is a classical univariate Henselian equation."""
    if Q.r != 1:
        raise ValueError("fs_univariate needs r = 1")
    if not Q.is_polynomial_in_x():
        raise ValueError("fs_univariate needs a polynomial Q")
    if not is_zero(Q.coeff((0,), 0)):
        raise ValueError("Q(0,0) must be 0")
    if not is_zero(Q.coeff((0,), 1)):
        raise ValueError("dQ/dy(0,0) must be 0")
    if not Q.at_y_zero():
        raise ValueError("Q(x,0) must be nonzero")


def fs_univariate_bound(Q: XYPolynomial, n: int) -> int:
    """``2n - 1``, or ``n`` when every ``a_{0,j}`` vanishes."""
    check_univariate(Q)
    if all(i[0] > 0 for (i, _), _ in Q.items()):
        return n
    return 2 * n - 1


def fs_univariate(Q: XYPolynomial, n: int) -> Scalar:
    """Classical Flajolet-Soria coefficient ``c_n`` for ``y = Q(x, y)``, ``r = 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    top = fs_univariate_bound(Q, n)
    keys = [p for p, _ in Q.sorted_items()]
    coeffs = Q.terms
    total: Scalar = 0
    for m in range(1, top + 1):
        for d in _enumerate_fixed_m(keys, 1, (n,), m):
            M = MVector.of(d)
            total = total + multinomial_weight(m, M) * M.monomial(coeffs)
    return normalize(total)


# ---------------------------------------------------------------------------
# Hensel iteration


class _Monoid:
    """Membership in the monoid generated by vectors of positive ``L``-weight."""

    def __init__(self, gens: Sequence[MultiIndex], lam: Sequence[int]):
        self.gens = list(gens)
        self.lam = tuple(lam)
        self.weights = [self.L(g) for g in self.gens]
        assert all(w >= 1 for w in self.weights)
        self._memo: dict[MultiIndex, bool] = {}

    def L(self, p: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.lam, p))

    def contains(self, p: MultiIndex) -> bool:
        if not any(p):
            return True
        hit = self._memo.get(p)
        if hit is not None:
            return hit
        Lp = self.L(p)
        res = False
        if Lp >= 1:
            for g, w in zip(self.gens, self.weights):
                if w <= Lp and self.contains(mi.sub(p, g)):
                    res = True
                    break
        self._memo[p] = res
        return res


@dataclass(frozen=True)
class HenselSolution:
    """Coefficients of the unique solution at every computed index.

    ``targets`` are the monoid elements ``<=grlex horizon`` covered by the
    run; ``exhaustive`` says whether that is every such element (always the
    case when no exponent of ``Q`` has degree 0).
    """

    r: int
    horizon: MultiIndex
    coefficients: dict[MultiIndex, Scalar]
    targets: tuple[MultiIndex, ...]
    exhaustive: bool
    computed: tuple[MultiIndex, ...] = field(default=(), repr=False)

    def coeff(self, n: Sequence[int]) -> Scalar:
        n = tuple(n)
        if n in self.coefficients or n in self.computed:
            return self.coefficients.get(n, 0)
        if self.exhaustive and mi.grlex_le(n, self.horizon):
            return 0
        raise KeyError(f"coefficient {n} was not computed")

    def __getitem__(self, n: Sequence[int]) -> Scalar:
        return self.coeff(n)

    def series(self) -> TruncatedSeries:
        """The solution as a truncated series (only for exhaustive runs)."""
        if not self.exhaustive:
            raise ValueError("the run did not cover every index up to the horizon")
        return TruncatedSeries(self.r, {n: c for n, c in self.coefficients.items()
                                        if mi.grlex_le(n, self.horizon)}, self.horizon)

    def items(self) -> list[tuple[MultiIndex, Scalar]]:
        return [(n, self.coefficients[n]) for n in sorted(self.coefficients, key=mi.grlex_key)]

    def to_json(self) -> dict:
        return {
            "horizon": list(self.horizon),
            "exhaustive": self.exhaustive,
            "coefficients": [{"n": list(n), "c": render_scalar(c)} for n, c in self.items()
                             if n in set(self.targets)],
        }


def monoid_targets(eq: HenselianEquation, horizon: Sequence[int], max_generators: int | None = None
                   ) -> tuple[list[MultiIndex], bool]:
    """Monoid elements ``<=grlex horizon`` reachable with at most ``max_generators`` generators.

    Generator sums are grlex-increasing, so the search never needs to pass
    the horizon.  Without degree-0 generators the set is finite and complete
    for any cap ``>= |horizon|``; returns ``(targets, exhaustive)``.
    """
    horizon = tuple(horizon)
    gens = eq.generators()
    has_flat = any(sum(g) == 0 for g in gens)
    if max_generators is None:
        max_generators = max(sum(horizon), 1) if not has_flat else max(sum(horizon), 1) + 4
    need = max(sum(horizon), 0)
    exhaustive = not has_flat and max_generators >= need
    seen = {mi.zero(eq.r)}
    frontier = [mi.zero(eq.r)]
    for _ in range(max_generators):
        nxt = []
        for p in frontier:
            for g in gens:
                q = mi.add(p, g)
                if q not in seen and mi.grlex_le(q, horizon):
                    seen.add(q)
                    nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    seen.discard(mi.zero(eq.r))
    return sorted(seen, key=mi.grlex_key), exhaustive


def _downward_closure(mon: _Monoid, targets: Sequence[MultiIndex]) -> list[MultiIndex]:
    """Every nonzero ``q`` in the monoid with ``p - q`` in the monoid for some target ``p``."""
    out = set()
    stack = list(targets)
    while stack:
        p = stack.pop()
        if p in out:
            continue
        out.add(p)
        for g in mon.gens:
            q = mi.sub(p, g)
            if any(q) and q not in out and mon.L(q) >= 1 and mon.contains(q):
                stack.append(q)
    return sorted(out, key=mi.grlex_key)


def hensel_solve(eq: HenselianEquation, horizon: Sequence[int], max_generators: int | None = None
                 ) -> HenselSolution:
    """Solve ``y = Q(x, y)`` at the monoid elements up to ``horizon`` by Hensel iteration.

    ``c_n`` is the coefficient of ``x^n`` in ``Q(x, z~_n)``.  Only that slice
    is materialized: ``c_n = sum a_{i,j} [x^{n-i}] z~_n^j``, with the power
    coefficients memoized over the computed indices.
    """
    horizon = tuple(horizon)
    if len(horizon) != eq.r:
        raise mi.DimensionMismatch("horizon has the wrong length")
    b = fs_bounds(eq)
    mon = _Monoid(eq.generators(), b.lam)
    targets, exhaustive = monoid_targets(eq, horizon, max_generators)
    order = _downward_closure(mon, targets)
    terms = eq.terms()
    known: dict[MultiIndex, Scalar] = {}
    nonzero: list[tuple[MultiIndex, int, Scalar]] = []  # (index, L, coeff)
    memo: dict[tuple[int, MultiIndex], Scalar] = {}

    def pc(j: int, t: MultiIndex) -> Scalar:
        if j == 0:
            return 1 if not any(t) else 0
        Lt = mon.L(t)
        if Lt < j:
            return 0
        if j == 1:
            return known.get(t, 0)
        key = (j, t)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total: Scalar = 0
        for q, Lq, c in nonzero:
            if Lq > Lt - (j - 1):
                continue
            v = pc(j - 1, mi.sub(t, q))
            if not is_zero(v):
                total = total + c * v
        total = normalize(total)
        memo[key] = total
        return total

    for n in order:
        total: Scalar = 0
        for (i, j), a in terms:
            if mon.L(i) > mon.L(n):
                continue
            v = pc(j, mi.sub(n, i))
            if not is_zero(v):
                total = total + a * v
        c = normalize(total)
        if not is_zero(c):
            known[n] = c
            nonzero.append((n, mon.L(n), c))
    return HenselSolution(eq.r, horizon, known, tuple(targets), exhaustive, tuple(order))


def hensel_residual_valuation(eq: HenselianEquation, coeffs: Mapping[MultiIndex, Scalar],
                              n: Sequence[int]) -> MultiIndex | None:
    """``w(z~_n - Q(x, z~_n))`` by full resubstitution (``None`` when it vanishes)."""
    n = tuple(n)
    z = {m: c for m, c in coeffs.items() if mi.grlex_lt(m, n) and not is_zero(c)}
    val = eq.Q.evaluate_xpoly(z)
    diff = dict(z)
    for e, c in val.items():
        diff[e] = normalize(diff.get(e, 0) - c)
    live = [e for e, c in diff.items() if not is_zero(c)]
    return mi.grlex_min(live) if live else None


def fixed_point_univariate(Q: XYPolynomial, order: int) -> list[Scalar]:
    """Coefficients ``c_1..c_order`` by the truncated iteration ``y <- Q(x, y)`` (reference oracle)."""
    if Q.r != 1:
        raise ValueError("univariate only")
    z: dict[MultiIndex, Scalar] = {}
    for _ in range(order + 1):
        val = Q.evaluate_xpoly(z)
        z = {e: c for e, c in val.items() if 1 <= e[0] <= order and not is_zero(c)}
    return [z.get((k,), 0) for k in range(1, order + 1)]
