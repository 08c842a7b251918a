"""Two-stage Newton-Puiseux reduction of a simple root.

Stage one scans the shifted polynomials ``P_k = P(x, z_k + x^{S(k)} y)`` in
grlex order until the valuation increments stabilize at the separation
index ``k0`` (with ``omega0`` the initial coefficient of ``dP/dy`` at the
root).  Stage two divides ``P_k(x, y + c_{S(k)})`` by ``-omega0 x^{i_k}``,
which yields a strongly reduced Henselian equation for the tail of the
root; its coefficients then follow from the Flajolet-Soria formula.

Also here: the ramified change of variables, its ``r = 2`` support
congruences, and the Eisenstein denominators witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, lcm, prod
from typing import Callable, Sequence

from .core import multiindex as mi
from .core.multiindex import MultiIndex, Pair
from .core.polynomial import XYPolynomial
from .core.scalar import Scalar, SymPoly, divide, is_zero, normalize, render_scalar
from .core.series import InsufficientTruncation, TruncatedSeries
from .henselian import HenselianEquation, NotStronglyReduced, fs_coefficient, is_strongly_reduced


def degree_bounds(P: XYPolynomial) -> tuple[int, int]:
    """``(dx, dy)``: total x-degree and y-degree of ``P``."""
    return P.x_degree(), P.y_degree()


def _eval_univariate(coeffs: dict[int, Scalar], c: Scalar) -> Scalar:
    total: Scalar = 0
    for j, a in coeffs.items():
        total = total + a * (c ** j if j else 1)
    return normalize(total)


def _derivative(coeffs: dict[int, Scalar]) -> dict[int, Scalar]:
    return {j - 1: normalize(j * a) for j, a in coeffs.items() if j >= 1}


# ---------------------------------------------------------------------------
# shifted polynomials


@dataclass(frozen=True)
class ShiftedPolynomial:
    """``P_k`` together with its valuation ``i_k`` and initial part ``pi_{k, i_k}``."""

    P: XYPolynomial
    k: MultiIndex
    Pk: XYPolynomial
    ik: MultiIndex
    pi: dict[int, Scalar]

    def pi_at(self, i: Sequence[int]) -> dict[int, Scalar]:
        return self.Pk.pi(tuple(i))


def _make_shifted(P: XYPolynomial, k: MultiIndex, Pk: XYPolynomial) -> ShiftedPolynomial:
    if Pk.is_zero():
        raise ValueError("P_k vanishes identically: P is zero")
    ik = Pk.w()
    return ShiftedPolynomial(P, k, Pk, ik, Pk.pi(ik))


def shift(P: XYPolynomial, prefix: TruncatedSeries, k: Sequence[int]) -> ShiftedPolynomial:
    """``P_k = P(x, z_k + x^{S(k)} y)`` computed by direct substitution of ``z_k``."""
    k = tuple(k)
    if len(k) != P.r or prefix.r != P.r:
        raise mi.DimensionMismatch("dimension mismatch")
    zk = {n: c for n, c in prefix.prefix(k).items() if any(n)}
    Pk = P.substitute_y(zk, mi.grlex_successor(k))
    return _make_shifted(P, k, Pk)


def advance(sp: ShiftedPolynomial, c_next: Scalar) -> ShiftedPolynomial:
    """``P_{S(k)} = P_k(x, c_{S(k)} + x^{S^2(k) - S(k)} y)``."""
    s = mi.grlex_successor(sp.k)
    e = mi.sub(mi.grlex_successor(s), s)
    Pk = sp.Pk.substitute_y({mi.zero(sp.P.r): c_next} if not is_zero(c_next) else {}, e)
    return _make_shifted(sp.P, s, Pk)


# ---------------------------------------------------------------------------
# separation


@dataclass(frozen=True)
class SeparationResult:
    k0: MultiIndex
    omega0: Scalar
    i_k0: MultiIndex
    verified_through: MultiIndex

    def to_json(self) -> dict:
        return {
            "result": "Separation",
            "k0": list(self.k0),
            "omega0": render_scalar(self.omega0),
            "i_k0": list(self.i_k0),
            "verified_through": list(self.verified_through),
        }


@dataclass(frozen=True)
class NotASimpleRoot:
    reason: str
    k: MultiIndex

    def to_json(self) -> dict:
        return {"result": "NotASimpleRoot", "reason": self.reason, "k": list(self.k)}


@dataclass(frozen=True)
class RootIsPolynomial:
    root: dict[MultiIndex, Scalar]

    def to_json(self) -> dict:
        return {"result": "RootIsPolynomial",
                "root": [{"n": list(n), "c": render_scalar(c)}
                         for n, c in sorted(self.root.items(), key=lambda t: mi.grlex_key(t[0]))]}


def i_sequence(P: XYPolynomial, series: TruncatedSeries, upto: Sequence[int]) -> list[tuple[MultiIndex, MultiIndex]]:
    """``(k, i_k)`` for ``0 <=grlex k <=grlex upto`` (incremental shifts)."""
    upto = tuple(upto)
    r = P.r
    sp = shift(P, series, mi.zero(r))
    out = [(sp.k, sp.ik)]
    while mi.grlex_lt(sp.k, upto):
        sp = advance(sp, series.coeff(mi.grlex_successor(sp.k)))
        out.append((sp.k, sp.ik))
    return out


def find_separation(P: XYPolynomial, series: TruncatedSeries, *, verify_steps: int | None = 16):
    """Locate ``k0`` and ``omega0`` for the root ``series`` of ``P``.

    At each ``k`` the initial part must vanish at ``c_{S(k)}`` (otherwise the
    valuations stall and the series is not a root); ``k0`` is the first ``k``
    where its derivative does not.  Beyond ``k0`` the increment rule
    ``i_{S(k)} = i_k - S(k) + S^2(k)`` is checked for up to ``verify_steps``
    further indices within the series horizon.
    """
    if series.r != P.r:
        raise mi.DimensionMismatch("dimension mismatch")
    if not series.is_natural() or not is_zero(series._coeffs.get(mi.zero(P.r), 0)):
        raise ValueError("the series must lie in N^r with zero constant term")
    dx, dy = degree_bounds(P)
    bound = 2 * dx * dy
    r = P.r
    sp = shift(P, series, mi.zero(r))
    exact_last = None
    if series.is_exact():
        sup = series.support()
        exact_last = sup[-1] if sup else mi.zero(r)
    while True:
        s = mi.grlex_successor(sp.k)
        if not series.knows(s):
            raise InsufficientTruncation(f"no verdict before the horizon: c_{mi.render_index(s)} is unknown")
        c = series.coeff(s)
        if not is_zero(_eval_univariate(sp.pi, c)):
            return NotASimpleRoot(f"the valuation of P_k stalls at k={mi.render_index(sp.k)}", sp.k)
        om = _eval_univariate(_derivative(sp.pi), c)
        if not is_zero(om):
            break
        if exact_last is not None and mi.grlex_le(exact_last, sp.k) and not P.evaluate_xpoly(series.coeffs):
            return RootIsPolynomial(series.coeffs)
        if sum(s) > bound:
            return NotASimpleRoot(f"no separation index with |k0| <= {bound}", sp.k)
        sp = advance(sp, c)
    k0, ik0, omega0 = sp.k, sp.ik, om
    verified = k0
    steps = 0
    cur = sp
    while verify_steps is None or steps < verify_steps:
        s = mi.grlex_successor(cur.k)
        if not series.knows(s):
            break
        if exact_last is not None and mi.grlex_lt(exact_last, s) and mi.grlex_lt(exact_last, cur.k):
            break
        c = series.coeff(s)
        nxt = advance(cur, c)
        expect = mi.add(mi.sub(cur.ik, s), mi.grlex_successor(s))
        if nxt.ik != expect:
            return NotASimpleRoot(
                f"increment rule fails at k={mi.render_index(cur.k)}: i_S(k)={mi.render_index(nxt.ik)}, "
                f"expected {mi.render_index(expect)}", cur.k)
        cur = nxt
        verified = cur.k
        steps += 1
    return SeparationResult(k0, omega0, ik0, verified)


# ---------------------------------------------------------------------------
# Henselian transform


@dataclass(frozen=True)
class PolynomialRootDetected:
    """``z_{S(k)}`` is itself an exact root of ``P``."""

    root: dict[MultiIndex, Scalar]

    def to_json(self) -> dict:
        return {"result": "PolynomialRootDetected",
                "root": [{"n": list(n), "c": render_scalar(c)}
                         for n, c in sorted(self.root.items(), key=lambda t: mi.grlex_key(t[0]))]}


def _check_k(series: TruncatedSeries, k: MultiIndex, sep: SeparationResult) -> MultiIndex:
    if not isinstance(sep, SeparationResult):
        raise TypeError("a SeparationResult is required")
    if not mi.grlex_lt(sep.k0, k):
        raise ValueError(f"k={mi.render_index(k)} must be >grlex k0={mi.render_index(sep.k0)}")
    s = mi.grlex_successor(k)
    if not series.knows(s):
        raise InsufficientTruncation(f"the series must be known through S(k)={mi.render_index(s)}")
    return s


def henselian_R(P: XYPolynomial, series: TruncatedSeries, k: Sequence[int], sep: SeparationResult
                ) -> tuple[XYPolynomial, MultiIndex]:
    """``_kR = P_k(x, y + c_{S(k)}) / (-omega0 x^{i_k})`` and ``i_k``."""
    k = tuple(k)
    s = _check_k(series, k, sep)
    sp = shift(P, series, k)
    c = series.coeff(s)
    moved = sp.Pk.substitute_y({mi.zero(P.r): c} if not is_zero(c) else {}, mi.zero(P.r))
    R = moved.shift_x(mi.scale(-1, sp.ik)).divide_scalar(normalize(-sep.omega0))
    return R, sp.ik


def to_henselian(P: XYPolynomial, series: TruncatedSeries, k: Sequence[int], sep: SeparationResult):
    """The strongly reduced Henselian equation ``y = _kQ(x, y)`` satisfied by ``t_{S(k)}``."""
    k = tuple(k)
    R, _ = henselian_R(P, series, k, sep)
    Q = R + XYPolynomial.y(P.r)
    if not Q.at_y_zero():
        s = mi.grlex_successor(k)
        return PolynomialRootDetected({n: c for n, c in series.prefix(s).items() if not is_zero(c)})
    d = is_strongly_reduced(Q)
    if not d:
        raise ValueError(f"the separation data is inconsistent with P: {d.reason}")
    return HenselianEquation(Q)


def blm_coefficients(P: XYPolynomial, series: TruncatedSeries, k: Sequence[int], sep: SeparationResult
                     ) -> dict[Pair, Scalar]:
    """Coefficients ``b_{l,m}`` of ``_kQ`` by the closed multinomial formula.

    ``b_{l,m} = (-1/omega0) sum a_{i,j} sum_{|L| = j-m} (j!/(m! L!)) C^L`` over
    ``i + m S(k) + G(L) - i_k = l``, plus ``1`` at ``(0, 1)``.
    """
    k = tuple(k)
    s = _check_k(series, k, sep)
    r = P.r
    ik = shift(P, series, k).ik
    prefix = [(n, c) for n, c in sorted(series.prefix(s).items(), key=lambda t: mi.grlex_key(t[0]))
              if any(n) and not is_zero(c)]
    out: dict[Pair, Scalar] = {}
    for (i, j), a in P.sorted_items():
        for m in range(j + 1):
            rest = j - m
            for combo in combinations_with_replacement(range(len(prefix)), rest):
                counts: dict[int, int] = {}
                for t in combo:
                    counts[t] = counts.get(t, 0) + 1
                w = factorial(j) // (factorial(m) * prod(factorial(v) for v in counts.values()))
                val: Scalar = w * a
                G = mi.zero(r)
                for t, v in counts.items():
                    val = val * prefix[t][1] ** v
                    G = mi.add(G, mi.scale(v, prefix[t][0]))
                l = mi.sub(mi.add(mi.add(i, mi.scale(m, s)), G), ik)
                out[(l, m)] = out.get((l, m), 0) + val
    res: dict[Pair, Scalar] = {}
    minus_w = normalize(-sep.omega0)
    for key, v in out.items():
        v = divide(normalize(v), minus_w)
        if key == (mi.zero(r), 1):
            v = normalize(v + 1)
        if not is_zero(v):
            res[key] = v
    return res


@dataclass(frozen=True)
class Continuation:
    k: MultiIndex
    coefficients: tuple[tuple[MultiIndex, Scalar], ...]
    guarantee: str

    def series(self, prefix: TruncatedSeries) -> TruncatedSeries:
        """The prefix through ``S(k)`` extended by the continued coefficients."""
        s = mi.grlex_successor(self.k)
        base = {n: c for n, c in prefix.prefix(s).items()}
        last = self.coefficients[-1][0] if self.coefficients else s
        return TruncatedSeries(prefix.r, {**base, **dict(self.coefficients)}, last)

    def to_json(self) -> dict:
        return {"k": list(self.k), "guarantee": self.guarantee,
                "coefficients": [{"n": list(n), "c": render_scalar(c)} for n, c in self.coefficients]}


def continue_coefficients(P: XYPolynomial, series: TruncatedSeries, k: Sequence[int], sep: SeparationResult,
                          count: int, *, best_effort: bool = False):
    """The next ``count`` coefficients after ``S(k)`` via the Flajolet-Soria formula on ``_kQ``.

    By default ``|k| >= 2 dx dy + 1`` is required, which rules out another
    root sharing the prefix; ``best_effort=True`` only requires
    ``k >grlex k0`` and reports the weaker guarantee.
    """
    k = tuple(k)
    dx, dy = degree_bounds(P)
    strong = sum(k) >= 2 * dx * dy + 1
    if not strong and not best_effort:
        raise ValueError(f"|k| = {sum(k)} is below 2*dx*dy+1 = {2 * dx * dy + 1}; pass best_effort=True")
    eq = to_henselian(P, series, k, sep)
    if isinstance(eq, PolynomialRootDetected):
        return eq
    s = mi.grlex_successor(k)
    out = []
    p = s
    for _ in range(count):
        p = mi.grlex_successor(p)
        out.append((p, fs_coefficient(eq, mi.sub(p, s))))
    return Continuation(k, tuple(out), "coincidence-bound" if strong else "separation-only")


# ---------------------------------------------------------------------------
# ramified change of variables


@dataclass(frozen=True)
class RamifiedChart:
    """``u_k = (x_k / x_{k+1}^{q_k})^{1/p}``, ``u_r = x_r^{1/p}`` and the root scaling ``u^{n0} u_r^{-1}``."""

    p: int
    q: tuple[int, ...]
    n0: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(t) for t in self.q))
        object.__setattr__(self, "n0", tuple(int(t) for t in self.n0))
        if self.p < 1:
            raise ValueError("p must be a positive integer")
        if len(self.q) != len(self.n0) - 1:
            raise mi.DimensionMismatch("q must have r-1 entries")
        if any(t < 0 for t in self.q):
            raise ValueError("q must be natural")

    @property
    def r(self) -> int:
        return len(self.n0)

    def m(self, dy: int) -> MultiIndex:
        r = self.r
        return tuple(max(0, -self.n0[k] * dy) for k in range(r - 1)) + (max(0, (1 - self.n0[r - 1]) * dy),)

    def x_exponent_in_u(self, i: Sequence[int]) -> MultiIndex:
        """Exponent vector of ``x^i`` in the ``u`` variables."""
        r = self.r
        out = []
        for l in range(r):
            out.append(sum(i[k] * self.p * prod(self.q[k:l]) for k in range(l + 1)))
        return tuple(out)

    def to_json(self) -> dict:
        return {"p": self.p, "q": list(self.q), "n0": list(self.n0)}


def ramified_substitute(Pt: XYPolynomial, chart: RamifiedChart) -> XYPolynomial:
    """``u^m Pt(x(u), u^{n0} u_r^{-1} y)`` as a genuine polynomial in ``u`` and ``y``."""
    r = chart.r
    if Pt.r != r:
        raise mi.DimensionMismatch("chart and polynomial dimensions differ")
    dy = Pt.y_degree()
    m = chart.m(dy)
    ys = tuple(chart.n0[l] - (1 if l == r - 1 else 0) for l in range(r))
    out: dict[Pair, Scalar] = {}
    for (i, j), a in Pt.items():
        e = mi.add(mi.add(chart.x_exponent_in_u(i), mi.scale(j, ys)), m)
        if any(t < 0 for t in e):
            raise ValueError(f"term {(i, j)} maps to the negative exponent {e}: invalid chart")
        out[(e, j)] = normalize(out.get((e, j), 0) + a)
    return XYPolynomial(r, out)


def support_constraints_r2(chart: RamifiedChart, dy: int) -> Callable[[int, int, int], bool]:
    """Necessary congruences on ``(k1, k2, j)`` in the support after the chart (``r = 2``)."""
    if chart.r != 2:
        raise ValueError("the congruence table is only available for r = 2")
    p, q1 = chart.p, chart.q[0]
    n1, n2 = chart.n0

    def pred(k1: int, k2: int, j: int) -> bool:
        if n1 >= 0 and n2 >= 1:
            a, b = j * n1, q1 * k1 + j * (n2 - 1 - q1 * n1)
        elif n1 >= 0:
            a, b = j * n1, q1 * k1 + j * (n2 - 1 - q1 * n1) - dy * (n2 - 1)
        elif n2 >= 1:
            a, b = (j - dy) * n1, q1 * k1 + j * (n2 - 1) - (j - dy) * q1 * n1
        else:
            a, b = (j - dy) * n1, q1 * k1 + (j - dy) * (n2 - 1 - q1 * n1)
        return (k1 - a) % p == 0 and (k2 - b) % p == 0

    return pred


# ---------------------------------------------------------------------------
# bounds and the Eisenstein witness


@dataclass(frozen=True)
class ParamRatioBounds:
    M1: int
    M2: int
    k: MultiIndex

    def to_json(self) -> dict:
        return {"M1": self.M1, "M2": self.M2, "k": list(self.k)}


def eisenstein_index(dx: int, dy: int, r: int) -> MultiIndex:
    """``(0,...,0,1,2 dx dy)``: the grlex-largest index of degree ``2 dx dy + 1``."""
    if r == 1:
        return (2 * dx * dy + 1,)
    return (0,) * (r - 2) + (1, 2 * dx * dy)


def param_ratio_bounds(dx: int, dy: int, r: int) -> ParamRatioBounds:
    if dx < 1 or dy < 1 or r < 1:
        raise ValueError("dx, dy and r must be positive")
    M1 = dy * (dy + 1) * comb(dx + r, r) // 2 + dy - 2
    M2 = 2 * (dy * (2 * dy * dx + 1) + dx + 1) ** (r - 1)
    return ParamRatioBounds(M1, M2, eisenstein_index(dx, dy, r))


@dataclass(frozen=True)
class EisensteinWitness:
    delta0: int
    delta: int
    verified_horizon: MultiIndex

    def to_json(self) -> dict:
        return {"delta0": self.delta0, "delta": self.delta, "verified_horizon": list(self.verified_horizon)}


class IntegralityViolation(ValueError):
    """``delta0 * delta^|n| * c_n`` is not an integer for some known ``n``."""


def _rational(c: Scalar) -> Fraction:
    if isinstance(c, SymPoly):
        raise TypeError("the Eisenstein witness needs rational coefficients")
    return Fraction(c)


def eisenstein_check(series: TruncatedSeries, delta0: int, delta: int, horizon: Sequence[int]) -> MultiIndex | None:
    """First ``n <=grlex horizon`` violating integrality, or ``None``."""
    horizon = tuple(horizon)
    for n in mi.grlex_upto(series.r, horizon):
        c = _rational(series.coeff(n))
        if (delta0 * delta ** sum(n) * c).denominator != 1:
            return n
    return None


def _primitive(P: XYPolynomial) -> XYPolynomial:
    """Scale a rational polynomial to coprime integer coefficients."""
    vals = [_rational(c) for _, c in P.items()]
    den = lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    from math import gcd
    g = 0
    for v in ints:
        g = gcd(g, v)
    return XYPolynomial(P.r, {key: Fraction(int(_rational(c) * den), g) for key, c in P.items()})


def eisenstein_witness(series: TruncatedSeries, dx: int, dy: int, horizon: Sequence[int], *,
                       P: XYPolynomial | None = None, omega: Scalar | None = None) -> EisensteinWitness:
    """Integers ``(delta0, delta)`` with ``delta0 * delta^|n| * c_n`` integral through ``horizon``.

    ``delta0`` clears the denominators through ``k = (0,...,0,1,2 dx dy)``.
    ``delta = |omega0|^{M2}`` where ``omega0`` comes from the reduction of
    the rescaled series ``delta0 * y0`` against a primitive integer
    annihilator (reconstructed from the series unless ``P`` is supplied;
    a supplied ``omega`` is used as is).
    """
    from .wilczynski import SupportShape, reconstruct

    r = series.r
    horizon = tuple(horizon)
    b = param_ratio_bounds(dx, dy, r)
    k = b.k
    delta0 = 1
    for n in mi.grlex_upto(r, k):
        delta0 = lcm(delta0, _rational(series.coeff(n)).denominator)
    if omega is None:
        scaled = series.map_coeffs(lambda c: normalize(delta0 * c))
        if P is None:
            P1 = reconstruct(scaled, SupportShape.full(r, dx, dy)).polynomial()
        else:
            # P(x, y/delta0) annihilates delta0 * y0
            P1 = XYPolynomial(r, {(i, j): Fraction(_rational(c)) / delta0 ** j for (i, j), c in P.items()})
        P1 = _primitive(P1)
        sep = find_separation(P1, scaled)
        if not isinstance(sep, SeparationResult):
            raise ValueError(f"cannot take omega0 from the reduction: {sep.reason if hasattr(sep, 'reason') else sep}")
        omega = sep.omega0
    om = _rational(omega)
    if om.denominator != 1 or om == 0:
        raise ValueError(f"omega0 = {om} is not a nonzero integer")
    delta = abs(int(om)) ** b.M2
    bad = eisenstein_check(series, delta0, delta, horizon)
    if bad is not None:
        raise IntegralityViolation(f"delta0*delta^|n|*c_n is not integral at n={mi.render_index(bad)}")
    return EisensteinWitness(delta0, delta, horizon)


def verify_witness(series: TruncatedSeries, delta0: int, delta: int, horizon: Sequence[int]) -> EisensteinWitness:
    """Certify user-supplied ``(delta0, delta)`` through ``horizon``."""
    if delta0 < 1 or delta < 1:
        raise ValueError("delta0 and delta must be positive integers")
    horizon = tuple(horizon)
    bad = eisenstein_check(series, delta0, delta, horizon)
    if bad is not None:
        raise IntegralityViolation(f"delta0*delta^|n|*c_n is not integral at n={mi.render_index(bad)}")
    return EisensteinWitness(delta0, delta, horizon)
