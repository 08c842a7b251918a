from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puiseux.core import multiindex as mi
from puiseux.core.polynomial import XYPolynomial
from puiseux.core.scalar import SymPoly, divide, is_zero, normalize
from puiseux.core.series import TruncatedSeries, evaluate_on_series
from puiseux.henselian import HenselianEquation, hensel_solve
from puiseux.parsing import parse_polynomial, parse_scalar
from puiseux.reduction import (EisensteinWitness, IntegralityViolation, NotASimpleRoot, PolynomialRootDetected,
                               RamifiedChart, RootIsPolynomial, SeparationResult, blm_coefficients,
                               continue_coefficients, eisenstein_check, eisenstein_index, eisenstein_witness,
                               find_separation, i_sequence, param_ratio_bounds, ramified_substitute, shift,
                               support_constraints_r2, to_henselian, verify_witness)

from conftest import a, c, ex_fs_polynomial, rand_root_polynomial

a002, c01 = a(0, 0, 2), c(0, 1)
omega0 = 2 * a002 * c01


def _b_table() -> dict:
    w = omega0
    # b_{1,3,0} carries c01^2, in agreement with the x1*x2^3 term of -omega0 * R
    raw = {
        ((1, -1), 2): -a002, ((-1, 2), 0): -a(0, 2, 1) * c01, ((0, 1), 1): -a(0, 2, 1),
        ((-1, 3), 0): -a(0, 2, 2) * c01 ** 2, ((0, 2), 1): -2 * a(0, 2, 2) * c01, ((1, 1), 0): -a(2, 2, 0),
        ((1, 1), 2): -a(0, 2, 2), ((1, 2), 0): -a(2, 2, 1) * c01, ((2, 1), 1): -a(2, 2, 1),
        ((1, 3), 0): -a(2, 2, 2) * c01 ** 2, ((2, 2), 1): -2 * a(2, 2, 2) * c01, ((3, 1), 2): -a(2, 2, 2),
    }
    return {k: divide(v, w) for k, v in raw.items()}


@pytest.fixture
def fs_setup():
    P = ex_fs_polynomial()
    y = TruncatedSeries(2, {(0, 1): c01}, (1, 0))
    return P, y, find_separation(P, y)


# -- separation --------------------------------------------------------------------


def test_ex_fs_i_sequence_and_separation(fs_setup):
    P, y, sep = fs_setup
    assert shift(P, y, (0, 0)).ik == (0, 2)
    assert shift(P, y, (0, 1)).ik == (1, 1)
    assert [ik for _, ik in i_sequence(P, y, (0, 1))] == [(0, 2), (1, 1)]
    assert isinstance(sep, SeparationResult)
    assert sep.k0 == (0, 0) and sep.i_k0 == (0, 2)
    assert sep.omega0 == omega0


def test_shift_at_zero_scales_y():
    P = parse_polynomial("x[1]*y^2 + y - x[2]", 2)
    sp = shift(P, TruncatedSeries(2, {}, (3, 0)), (0, 0))
    assert sp.Pk == parse_polynomial("x[1]*x[2]^2*y^2 + x[2]*y - x[2]", 2)


def test_linear_polynomial_root():
    P = parse_polynomial("y - x[1] - 3*x[2]^2", 2)
    z = TruncatedSeries(2, {(1, 0): 1, (0, 2): 3}, (4, 0))
    sep = find_separation(P, z)
    assert sep.k0 == (0, 0) and sep.omega0 == 1


def test_exact_polynomial_root_is_reported():
    P = parse_polynomial("y - x[2]", 2)
    z = TruncatedSeries(2, {(0, 1): 1}, None)
    sep = find_separation(P, z)
    assert isinstance(sep, SeparationResult)
    out = to_henselian(P, z, (0, 1), sep)
    assert isinstance(out, PolynomialRootDetected) and out.root == {(0, 1): 1}
    squared = P * P
    assert isinstance(find_separation(squared, z), RootIsPolynomial)


def test_non_root_stalls():
    P = parse_polynomial("y - x[1] - x[1]*y^2", 1)
    z = TruncatedSeries(1, {(1,): 1, (2,): 7}, (6,))
    v = find_separation(P, z)
    assert isinstance(v, NotASimpleRoot)
    assert "increment rule" in v.reason or "stalls" in v.reason


def test_double_root_is_rejected():
    # (y - x)^2 has the double root x: no separation within |k| <= 2 dx dy
    P = parse_polynomial("(y - x[1])^2", 1)
    z = TruncatedSeries(1, {(1,): 1}, (10,))
    assert isinstance(find_separation(P, z), NotASimpleRoot)


def _omega_invariant(P, y, sep):
    dP = P.derivative_y()
    vals, _ = evaluate_on_series(dP, y)
    live = sorted((e for e, v in vals.items() if not is_zero(v)), key=mi.grlex_key)
    lead = live[0]
    assert lead == mi.sub(sep.i_k0, mi.grlex_successor(sep.k0))
    assert vals[lead] == sep.omega0


def test_omega_is_initial_coefficient_of_derivative(fs_setup):
    P, _, sep = fs_setup
    _omega_invariant(P, TruncatedSeries(2, {(0, 1): c01}, None), sep)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_separation_properties_on_random_roots(seed):
    rng = random.Random(seed)
    P0, Q = rand_root_polynomial(rng)
    r = P0.r
    dx, dy = P0.x_degree(), P0.y_degree()
    y = hensel_solve(HenselianEquation(Q), (2 * dx * dy + 4,) + (0,) * (r - 1)).series()
    sep = find_separation(P0, y)
    assert isinstance(sep, SeparationResult)
    assert sum(sep.k0) <= 2 * dx * dy
    _omega_invariant(P0, y, sep)


def test_corrupted_root_is_flagged():
    rng = random.Random(3)
    P0, Q = rand_root_polynomial(rng)
    r = P0.r
    top = (10,) + (0,) * (r - 1)
    y = hensel_solve(HenselianEquation(Q), top).series()
    deep = [n for n in mi.grlex_upto(r, top) if sum(n) == 5][0]
    bad = TruncatedSeries(r, {**y.coeffs, deep: normalize(y.coeff(deep) + 1)}, top)
    assert isinstance(find_separation(P0, bad), NotASimpleRoot)


# -- Henselian transform ---------------------------------------------------------------


def test_ex_fs_b_table(fs_setup):
    P, y, sep = fs_setup
    eq = to_henselian(P, y, (0, 1), sep)
    assert isinstance(eq, HenselianEquation)
    assert dict(eq.terms()) == _b_table()
    assert len(_b_table()) == 12
    assert blm_coefficients(P, y, (0, 1), sep) == _b_table()


def test_ex_fs_spot_b_values(fs_setup):
    b = blm_coefficients(*fs_setup[:2], (0, 1), fs_setup[2])
    assert b[((1, -1), 2)] == divide(-a002, omega0)
    assert b[((0, 2), 1)] == divide(-2 * a(0, 2, 2) * c01, omega0)


def test_ex_fs_continuation(fs_setup):
    P, y, sep = fs_setup
    with pytest.raises(ValueError):
        continue_coefficients(P, y, (0, 1), sep, 8)
    cont = continue_coefficients(P, y, (0, 1), sep, 8, best_effort=True)
    assert cont.guarantee == "separation-only"
    got = dict(cont.coefficients)
    assert got[(0, 2)] == parse_scalar("-1/2*a_{0,2,1}*a_{0,0,2}^(-1)")
    assert got[(0, 3)] == parse_scalar(
        "-1/2*a_{0,2,2}*c_{0,1}*a_{0,0,2}^(-1) + 1/8*a_{0,2,1}^2*a_{0,0,2}^(-2)*c_{0,1}^(-1)")
    assert got[(2, 1)] == parse_scalar("-1/2*a_{2,2,0}*a_{0,0,2}^(-1)*c_{0,1}^(-1)")
    assert got[(0, 4)] == parse_scalar("1/2*a_{0,2,1}*a_{0,2,2}*a_{0,0,2}^(-2)")
    assert got[(1, 1)] == got[(2, 0)] == got[(1, 2)] == 0
    check = normalize(got[(0, 3)] * omega0 ** 3)
    assert isinstance(check, SymPoly) and not check.has_negative_exponents()


def test_relations_from_reconstructed_coefficients():
    C = lambda *n: SymPoly.symbol(f"C_{{{','.join(map(str, n))}}}")
    C01, C02, C03, C21 = C(0, 1), C(0, 2), C(0, 3), C(2, 1)
    vals = {
        ((0, 0), 2): C01 ** 6, ((0, 2), 0): -C01 ** 8, ((0, 2), 1): -2 * C01 ** 6 * C02,
        ((0, 2), 2): -C01 ** 4 * (2 * C01 * C03 - C02 ** 2), ((2, 2), 0): -2 * C01 ** 7 * C21,
        ((2, 2), 1): SymPoly.symbol("A"), ((2, 2), 2): SymPoly.symbol("B"),
    }
    P = XYPolynomial(2, vals)
    y = TruncatedSeries(2, {(0, 1): C01}, (1, 0))
    sep = find_separation(P, y)
    got = dict(continue_coefficients(P, y, (0, 1), sep, 8, best_effort=True).coefficients)
    assert got[(0, 2)] == C02
    assert got[(0, 3)] == C03
    assert got[(2, 1)] == C21
    assert got[(0, 4)] == normalize(divide(C02 * (2 * C01 * C03 - C02 ** 2), C01 ** 2))


def test_y_minus_x_gives_polynomial_root():
    P = parse_polynomial("y - x[2]", 2)
    z = TruncatedSeries(2, {(0, 1): 1}, (6, 0))
    sep = find_separation(P, z)
    for k in [(0, 1), (1, 0), (0, 3)]:
        assert isinstance(to_henselian(P, z, k, sep), PolynomialRootDetected)


def test_k_must_exceed_k0(fs_setup):
    P, y, sep = fs_setup
    with pytest.raises(ValueError):
        to_henselian(P, y, (0, 0), sep)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_blm_matches_direct_transform(seed):
    rng = random.Random(seed)
    P0, Q = rand_root_polynomial(rng)
    r = P0.r
    y = hensel_solve(HenselianEquation(Q), (8,) + (0,) * (r - 1)).series()
    sep = find_separation(P0, y)
    k = mi.grlex_successor(sep.k0)
    for _ in range(rng.randint(0, 3)):
        k = mi.grlex_successor(k)
    eq = to_henselian(P0, y, k, sep)
    if isinstance(eq, PolynomialRootDetected):
        return
    assert blm_coefficients(P0, y, k, sep) == dict(eq.terms())
    w = mi.grlex_successor(k)
    sol = hensel_solve(eq, (4,) + (0,) * (r - 1))
    for n in sol.targets:
        p = mi.add(w, n)
        if y.knows(p):
            assert sol[n] == y.coeff(p)


def test_coincidence_bound_continuation():
    P = parse_polynomial("y - x[1] - x[1]*y^2", 1)
    Q = XYPolynomial.y(1) - P
    y = hensel_solve(HenselianEquation(Q), (20,)).series()
    sep = find_separation(P, y)
    k = (5,)  # |k| >= 2*dx*dy + 1
    cont = continue_coefficients(P, y.truncate(mi.grlex_successor(k)), k, sep, 10)
    assert cont.guarantee == "coincidence-bound"
    assert all(y.coeff(n) == v for n, v in cont.coefficients)


# -- ramified charts ------------------------------------------------------------------


def _eclt_tilde():
    t = lambda *k: SymPoly.symbol(f"t_{{{','.join(map(str, k))}}}")
    return XYPolynomial(2, {((0, 1), 0): t(0, 1, 0), ((1, 0), 0): t(1, 0, 0), ((0, 1), 1): t(0, 1, 1),
                            ((1, 0), 1): t(1, 0, 1), ((0, 0), 2): t(0, 0, 2), ((0, 1), 2): t(0, 1, 2),
                            ((1, 0), 2): t(1, 0, 2)}), t


def test_ex_eclt_chart():
    Pt, t = _eclt_tilde()
    chart = RamifiedChart(2, (1,), (0, 1))
    assert chart.m(2) == (0, 0)
    P = ramified_substitute(Pt, chart)
    expected = XYPolynomial(2, {((0, 2), 0): t(0, 1, 0), ((2, 2), 0): t(1, 0, 0), ((0, 2), 1): t(0, 1, 1),
                                ((2, 2), 1): t(1, 0, 1), ((0, 0), 2): t(0, 0, 2), ((0, 2), 2): t(0, 1, 2),
                                ((2, 2), 2): t(1, 0, 2)})
    assert P == expected
    F = {((0, 2), 1), ((2, 2), 1), ((0, 0), 2), ((0, 2), 2), ((2, 2), 2)}
    G = {((0, 2), 0), ((2, 2), 0)}
    assert set(P.support()) == F | G
    pred = support_constraints_r2(chart, 2)
    assert all(pred(i[0], i[1], j) for i, j in P.support())


def test_unit_chart_is_identity_like():
    P = parse_polynomial("x[1]*y + x[2] + y^2", 2)
    chart = RamifiedChart(1, (0,), (0, 1))
    assert chart.m(P.y_degree()) == (0, 0)
    assert ramified_substitute(P, chart) == P
    pred = support_constraints_r2(chart, 2)
    assert all(pred(k1, k2, j) for k1 in range(-3, 4) for k2 in range(-3, 4) for j in range(3))


def test_constraint_first_case_row():
    chart = RamifiedChart(3, (1,), (1, 2))
    pred = support_constraints_r2(chart, 2)
    # n1 >= 0, n2 >= 1: k1 = j*n1 (mod p)
    assert pred(2, 2, 2) == ((2 - 2) % 3 == 0 and (1 * 2 + 2 * (2 - 1 - 1)) % 3 == 2 % 3)
    assert not pred(1, 0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 3), st.integers(-2, 2), st.integers(-1, 3), st.integers(0, 10 ** 6))
def test_every_chart_output_satisfies_constraints(p, q1, n1, n2, seed):
    rng = random.Random(seed)
    terms = {}
    for _ in range(5):
        terms[((rng.randint(0, 2), rng.randint(0, 2)), rng.randint(0, 2))] = rng.choice([-1, 1, 2])
    Pt = XYPolynomial(2, terms)
    chart = RamifiedChart(p, (q1,), (n1, n2))
    P = ramified_substitute(Pt, chart)
    pred = support_constraints_r2(chart, Pt.y_degree())
    assert all(pred(i[0], i[1], j) for i, j in P.support())
    assert all(e >= 0 for (i, _) in P.support() for e in i)


def test_constraints_need_r2():
    with pytest.raises(ValueError):
        support_constraints_r2(RamifiedChart(2, (1, 1), (0, 0, 1)), 2)


# -- bounds and Eisenstein ---------------------------------------------------------------


def test_param_ratio_bounds():
    b = param_ratio_bounds(2, 2, 2)
    assert b.k == (1, 8) and mi.grlex_successor(b.k) == (2, 7)
    assert param_ratio_bounds(1, 2, 2).M1 == 9
    for dx, dy, r in [(1, 1, 1), (2, 3, 2), (1, 2, 3)]:
        b = param_ratio_bounds(dx, dy, r)
        assert b.M1 == dy * (dy + 1) * comb(dx + r, r) // 2 + dy - 2
        assert b.M2 == 2 * (dy * (2 * dy * dx + 1) + dx + 1) ** (r - 1)
    assert eisenstein_index(2, 2, 3) == (0, 1, 8)


def _catalan(n):
    return TruncatedSeries(1, {(k,): comb(2 * k - 2, k - 1) // k for k in range(1, n + 1)}, (n,))


def _sqrt1px(n):
    cs, v = {}, Fraction(1)
    for k in range(1, n + 1):
        v = v * (Fraction(1, 2) - k + 1) / k
        cs[(k,)] = v
    return TruncatedSeries(1, cs, (n,))


def test_eisenstein_stated_witnesses():
    assert verify_witness(_catalan(20), 1, 1, (20,)) == EisensteinWitness(1, 1, (20,))
    assert verify_witness(_sqrt1px(10), 2, 4, (10,)).verified_horizon == (10,)
    assert eisenstein_check(_sqrt1px(10), 1, 2, (10,)) is not None
    with pytest.raises(IntegralityViolation):
        verify_witness(_sqrt1px(10), 1, 1, (10,))


def test_eisenstein_derived_witnesses():
    w = eisenstein_witness(_catalan(24), 1, 2, (20,))
    assert (w.delta0, w.delta) == (1, 1)
    w2 = eisenstein_witness(_sqrt1px(24), 1, 2, (10,))
    assert eisenstein_check(_sqrt1px(24), w2.delta0, w2.delta, (10,)) is None
    # the derived witness is a valid (if larger) certificate than the stated one
    assert w2.delta0 % 2 == 0 and w2.delta % 4 == 0


def test_integer_series_has_unit_witness():
    s = TruncatedSeries(2, {(0, 1): 3, (1, 0): -2, (1, 1): 7}, (3, 0))
    assert eisenstein_check(s, 1, 1, (3, 0)) is None
