from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puiseux.core import multiindex as mi
from puiseux.core.polynomial import XYPolynomial
from puiseux.core.scalar import SymPoly, is_zero, normalize
from puiseux.core.series import TruncatedSeries, InsufficientTruncation
from puiseux.henselian import fixed_point_univariate
from puiseux.parsing import parse_polynomial, parse_scalar
from puiseux.wilczynski import (ConsistentWithReconstruction, NoValidReconstruction, NotAlgebraicAtDepth,
                                SupportShape, WilczynskiView, check_algebraic, reconstruct,
                                reconstruct_from_minor, reconstruction_bounds, verify_annihilation,
                                wilczynski_minor)

from conftest import C, WILC_F, WILC_G

PIVOT_K = ((0, 3), (0, 4), (2, 3), (2, 4))
PIVOT_I = (((0, 2), 1), ((2, 2), 1), ((0, 2), 2), ((2, 2), 2))

# the five order-5 minors on the column set F, with their expected values
FIVE_MINORS = [
    (((1, 1), (0, 3), (0, 4), (2, 3), (2, 4)), "-2*C_{0,1}^7*C_{1,0}"),
    (((0, 3), (2, 1), (0, 4), (2, 4), (4, 2)),
     "-2*C_{0,1}^3*(C_{1,0}*C_{1,1} + C_{0,1}*C_{2,0})*(C_{0,1}^2*C_{2,0} - C_{0,2}*C_{1,0}^2)"),
    (((0, 3), (0, 4), (1, 3), (2, 3), (2, 4)),
     "-2*C_{0,1}^5*(-C_{0,1}*C_{1,0}*C_{0,3} + C_{0,2}^2*C_{1,0} + C_{0,1}^2*C_{1,2})"),
    (((1, 2), (0, 4), (1, 3), (2, 3), (2, 4)),
     "-2*C_{0,1}^4*(-C_{0,1}*C_{1,0}^2*C_{0,3} + C_{1,0}^2*C_{0,2}^2 + 2*C_{0,1}*C_{1,0}*C_{0,2}*C_{1,1}"
     " + C_{0,1}^2*C_{1,0}*C_{1,2} - C_{0,1}^2*C_{1,1}^2)"),
    (((0, 3), (0, 4), (3, 1), (2, 3), (2, 4)),
     "-2*C_{0,1}^6*(C_{1,0}*C_{2,1} + C_{1,1}*C_{2,0} + C_{0,1}*C_{3,0})"),
]

A221 = ("-2*C_{0,1}^3*(-2*C_{0,1}*C_{0,3}*C_{1,0}*C_{1,1} - C_{0,1}^2*C_{0,3}*C_{2,0} + C_{0,2}^2*C_{1,0}*C_{1,1}"
        " + C_{0,2}^2*C_{0,1}*C_{2,0} + C_{0,1}^2*C_{1,1}*C_{1,2} + C_{0,1}^2*C_{1,0}*C_{1,3} + C_{0,1}^3*C_{2,2})")
A222 = ("-C_{0,1}*(2*C_{0,1}^4*C_{2,3} + 2*C_{0,1}^3*C_{1,0}*C_{1,4} + 2*C_{0,1}^3*C_{2,0}*C_{0,4}"
        " + C_{0,1}^3*C_{1,2}^2 + 2*C_{0,1}^3*C_{1,1}*C_{1,3} - 2*C_{0,1}^3*C_{0,3}*C_{2,1}"
        " - 2*C_{0,1}^2*C_{0,3}*C_{0,2}*C_{2,0} - 2*C_{0,1}^2*C_{0,3}*C_{1,1}^2 - 4*C_{0,1}^2*C_{0,3}*C_{1,0}*C_{1,2}"
        " + C_{0,1}*C_{0,2}^2*C_{1,1}^2 + 2*C_{0,1}*C_{0,2}^2*C_{1,0}*C_{1,2} + 2*C_{0,2}^2*C_{0,1}^2*C_{2,1}"
        " + 4*C_{0,2}*C_{0,1}*C_{0,3}*C_{1,0}*C_{1,1} - 2*C_{0,2}^3*C_{1,0}*C_{1,1}"
        " - 2*C_{0,2}*C_{0,1}^2*C_{1,1}*C_{1,2} - 2*C_{0,2}*C_{0,1}^2*C_{1,0}*C_{1,3} - 2*C_{0,1}^3*C_{0,2}*C_{2,2})")
A220 = ("-C_{0,1}^4*(C_{0,1}^2*C_{1,1}^2 + 2*C_{0,1}^2*C_{1,0}*C_{1,2} + 2*C_{0,1}^3*C_{2,1}"
        " - 2*C_{0,1}*C_{1,0}^2*C_{0,3} + C_{1,0}^2*C_{0,2}^2)")


@pytest.fixture
def view(generic_series, wilc_shape):
    return WilczynskiView(wilc_shape, generic_series, (6, 0))


@pytest.mark.parametrize("rows,expected", FIVE_MINORS)
def test_five_minors(view, rows, expected):
    assert wilczynski_minor(view, rows, WILC_F) == parse_scalar(expected)


def test_reduced_matrix_entries(view):
    assert view.entry((0, 3), ((0, 2), 1)) == C(0, 1)
    # the c^{(2)}_{2,4} value sits in the column of x2^2 y^2 (row n - i = (2,2))
    assert view.entry((2, 4), ((0, 2), 2)) == parse_scalar(
        "2*C_{1,0}*C_{1,2} + C_{1,1}^2 + 2*C_{0,2}*C_{2,0} + 2*C_{0,1}*C_{2,1}")
    assert view.entry((0, 3), ((2, 2), 1)) == 0  # row not >= column index
    assert view.entry((1, 5), ((2, 2), 2)) == 0


def test_g_rows_are_removed(view):
    assert (0, 2) not in view.rows() and (2, 2) not in view.rows()
    assert (0, 1) in view.rows()


def test_pivot_minor(view):
    assert wilczynski_minor(view, PIVOT_K, PIVOT_I) == -C(0, 1) ** 6


def test_cramer_and_constant_terms(generic_series, wilc_shape):
    res = reconstruct_from_minor(generic_series, wilc_shape, PIVOT_K, PIVOT_I)
    co = res.coefficients
    assert co[((0, 0), 2)] == C(0, 1) ** 6
    assert co[((0, 2), 1)] == -2 * C(0, 1) ** 6 * C(0, 2)
    assert co[((0, 2), 2)] == -C(0, 1) ** 4 * (2 * C(0, 1) * C(0, 3) - C(0, 2) ** 2)
    assert co[((2, 2), 1)] == parse_scalar(A221)
    assert co[((2, 2), 2)] == parse_scalar(A222)
    assert co[((0, 2), 0)] == -C(0, 1) ** 8
    assert co[((2, 2), 0)] == parse_scalar(A220)


def test_annihilator_under_forced_vanishing(generic_series, wilc_shape):
    res = reconstruct_from_minor(generic_series, wilc_shape, PIVOT_K, PIVOT_I)
    zero = {f"C_{{{a},{b}}}": 0 for a, b in [(1, 0), (2, 0), (1, 2), (1, 1), (3, 0)]}
    P = res.polynomial().map_coeffs(lambda v: normalize(v.subs(zero)) if isinstance(v, SymPoly) else v)
    bracket = parse_polynomial(
        "C_{0,1}^3*(-C_{0,1}^5*x[2]^2 - 2*C_{0,1}^4*C_{2,1}*x[1]^2*x[2]^2"
        " + (-2*C_{0,1}^3*C_{0,2}*x[2]^2 - 2*C_{0,1}^3*C_{2,2}*x[1]^2*x[2]^2)*y"
        " + (C_{0,1}^3 + (C_{0,1}*C_{0,2}^2 - 2*C_{0,1}^2*C_{0,3})*x[2]^2"
        " + (2*C_{0,1}*C_{0,3}*C_{2,1} - 2*C_{0,1}^2*C_{2,3} - 2*C_{0,2}^2*C_{2,1} + 2*C_{0,1}*C_{0,2}*C_{2,2})"
        "*x[1]^2*x[2]^2)*y^2)", 2)
    assert P == bracket


def test_generic_series_is_certified_non_algebraic(generic_series, wilc_shape):
    v = check_algebraic(generic_series, wilc_shape, depth=6)
    assert isinstance(v, NotAlgebraicAtDepth)
    assert v.rows == FIVE_MINORS[0][0]
    assert v.witness == -2 * C(0, 1) ** 7 * C(1, 0)


def test_insufficient_truncation(generic_series, wilc_shape):
    with pytest.raises(InsufficientTruncation):
        check_algebraic(generic_series.truncate((3, 0)), wilc_shape, depth=6)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(FIVE_MINORS[0][0] + ((1, 2), (1, 3), (3, 1), (0, 5), (4, 2))),
                min_size=5, max_size=5, unique=True))
def test_minors_are_homogeneous(rows):
    series = TruncatedSeries(2, {n: C(*n) for n in mi.upto_degree(2, 6) if any(n)}, (6, 0))
    view = WilczynskiView(SupportShape(2, WILC_F, WILC_G), series, (6, 0))
    rows = sorted(rows, key=mi.grlex_key)
    m = wilczynski_minor(view, rows, WILC_F)
    degree = sum(j for _, j in WILC_F)
    if not is_zero(m):
        assert m.is_homogeneous() and m.total_degree() == degree


def test_minor_rejects_unsorted_rows(view):
    with pytest.raises(ValueError):
        wilczynski_minor(view, tuple(reversed(FIVE_MINORS[0][0])), WILC_F)


def test_exact_linear_series():
    s = TruncatedSeries(2, {(0, 1): 3}, (4, 0))
    shape = SupportShape(2, (((0, 0), 1),), (((0, 1), 0),))
    P = reconstruct(s, shape, depth=2).polynomial()
    # the rho = 0 choice: a_{0,1} = 1 and a_{(0,1),0} = -3
    assert P == XYPolynomial(2, {((0, 0), 1): 1, ((0, 1), 0): -3})


def _fixed_point_series(Q, n):
    cs = fixed_point_univariate(Q, n)
    return TruncatedSeries(1, {(k,): v for k, v in enumerate(cs, 1)}, (n,))


def _catalan(n):
    return _fixed_point_series(parse_polynomial("x[1] + y^2", 1), n)


def test_reconstruct_catalan_and_determinism():
    s = _catalan(4)
    shape = SupportShape.full(1, 1, 2)
    r1 = reconstruct(s, shape)
    r2 = reconstruct(s, shape)
    assert r1 == r2 and r1.to_json() == r2.to_json()
    P = r1.polynomial()
    target = parse_polynomial("y - x[1] - y^2", 1)
    lead = P.coeff((0,), 1)
    assert P.divide_scalar(lead) == target
    assert verify_annihilation(P, _catalan(12), 12)


def test_non_algebraic_prefix_rejects():
    # exp-like coefficients 1/n! do not satisfy a degree-(1,1) relation
    from fractions import Fraction
    from math import factorial
    s = TruncatedSeries(1, {(n,): Fraction(1, factorial(n)) for n in range(1, 8)}, (7,))
    v = check_algebraic(s, SupportShape.full(1, 1, 1), depth=6)
    assert isinstance(v, NotAlgebraicAtDepth) and not is_zero(v.witness)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_reconstruction_is_proportional_to_the_source(seed):
    rng = random.Random(seed)
    b, c_ = rng.choice([-2, -1, 1, 2, 3]), rng.choice([-2, -1, 1, 2])
    Q = XYPolynomial(1, {((1,), 0): b, ((0,), 2): c_})
    s = _fixed_point_series(Q, 8)
    P = reconstruct(s, SupportShape.full(1, 1, 2)).polynomial()
    source = XYPolynomial.y(1) - Q
    ratio = normalize(P.coeff((0,), 1))
    assert P == source.map_coeffs(lambda v: normalize(v * ratio))


def test_reconstruction_bounds():
    b = reconstruction_bounds(1, 2, 2)
    assert b.N == 4 and b.f_degree_bound == 8
    assert b.D == 15
    b1 = reconstruction_bounds(1, 1, 1, SupportShape(1, (((0,), 1),), (((1,), 0),)))
    assert b1.N == 2 and b1.D == 3 - 1
    assert b1.lambda_bound == 1
    with pytest.raises(ValueError):
        reconstruction_bounds(0, 1, 1)


def test_shape_validation():
    with pytest.raises(ValueError):
        SupportShape(2, (((0, 2), 2), ((0, 2), 1)), ())  # not alex-sorted
    with pytest.raises(ValueError):
        SupportShape(2, (((0, 2), 0),), ())  # F pairs need j >= 1
