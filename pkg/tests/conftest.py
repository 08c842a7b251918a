from __future__ import annotations

import random

import pytest

from puiseux.core import multiindex as mi
from puiseux.core.polynomial import XYPolynomial
from puiseux.core.scalar import indexed_symbol
from puiseux.core.series import TruncatedSeries
from puiseux.henselian import HenselianEquation, is_strongly_reduced
from puiseux.wilczynski import SupportShape


def C(*n):
    return indexed_symbol("C", n)


def a(*k):
    return indexed_symbol("a", k)


def c(*n):
    return indexed_symbol("c", n)


@pytest.fixture
def generic_series():
    """The abstract series with symbolic coefficients ``C_n`` through grlex degree 6."""
    return TruncatedSeries(2, {n: C(*n) for n in mi.upto_degree(2, 6) if any(n)}, (6, 0))


WILC_F = (((0, 2), 1), ((2, 2), 1), ((0, 0), 2), ((0, 2), 2), ((2, 2), 2))
WILC_G = (((0, 2), 0), ((2, 2), 0))


@pytest.fixture
def wilc_shape():
    return SupportShape(2, WILC_F, WILC_G)


FS_GENE_SUPPORT = [((1, -1), 2), ((-1, 2), 0), ((0, 1), 1), ((-1, 3), 0), ((0, 2), 1), ((1, 1), 0),
                   ((1, 1), 2), ((1, 2), 0), ((2, 1), 1), ((1, 3), 0), ((2, 2), 1), ((3, 1), 2)]


@pytest.fixture
def fs_gene():
    return HenselianEquation(XYPolynomial(2, {(i, j): a(*i, j) for i, j in FS_GENE_SUPPORT}))


def ex_fs_polynomial() -> XYPolynomial:
    """The degree-(2, 2) polynomial of the reduction example, with ``a_{0,2,0} = -a_{0,0,2} c_{0,1}^2``."""
    a002 = a(0, 0, 2)
    return XYPolynomial(2, {
        ((0, 0), 2): a002,
        ((0, 2), 0): -a002 * c(0, 1) ** 2, ((0, 2), 1): a(0, 2, 1), ((0, 2), 2): a(0, 2, 2),
        ((2, 2), 0): a(2, 2, 0), ((2, 2), 1): a(2, 2, 1), ((2, 2), 2): a(2, 2, 2),
    })


def rand_strongly_reduced(rng: random.Random, rs=(1, 2, 3), max_terms=6, lo=-2, hi=3, max_y=3):
    """A random strongly reduced equation with small Laurent exponents and coefficients in +-{1,2,3}."""
    r = rng.choice(list(rs))
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            i = tuple(rng.randint(lo, hi) for _ in range(r))
            j = rng.randint(0, max_y)
            if not mi.grlex_positive(i):
                continue
            terms[(i, j)] = rng.choice([-3, -2, -1, 1, 2, 3])
        Q = XYPolynomial(r, terms)
        if terms and is_strongly_reduced(Q):
            return HenselianEquation(Q)


def rand_root_polynomial(rng: random.Random):
    """``(P0, Q)`` with ``P0 = y - Q`` and ``Q`` in ``K[x, y]`` strongly reduced, nonzero ``x_r`` term."""
    r = rng.choice([1, 2])
    while True:
        dx, dy = rng.randint(1, 2), rng.randint(1, 2)
        terms = {(mi.last_unit(r), 0): rng.choice([-2, -1, 1, 2])}
        for _ in range(rng.randint(0, 3)):
            i = rng.choice([e for e in mi.upto_degree(r, rng.randint(1, dx)) if any(e)])
            terms[(i, rng.randint(0, dy))] = rng.choice([-2, -1, 1, 2])
        i = rng.choice([e for e in mi.upto_degree(r, rng.randint(1, dx)) if any(e)])
        terms[(i, rng.randint(1 if sum(i) > 1 else 2, max(dy, 2)))] = rng.choice([-1, 1, 2])
        Q = XYPolynomial(r, terms)
        if is_strongly_reduced(Q):
            return XYPolynomial.y(r) - Q, Q


# -- acceptance summary ------------------------------------------------------------------

_ACCEPTANCE: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE[name] = (verdict, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        verdict, dt = _ACCEPTANCE[name]
        label = name.removeprefix("test_criterion_").split("_", 1)
        terminalreporter.write_line(f"criterion {label[0]:>2} {verdict}  {label[1].replace('_', ' ')}  ({dt:.2f} s)")
