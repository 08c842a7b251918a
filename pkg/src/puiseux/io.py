"""JSON interchange for equations, polynomials, series, support shapes and charts.

Scalars are written as canonical text (see :mod:`puiseux.parsing`) and read
from any of: an integer, a string expression, ``{"sym": name, "pow": k}``,
or a list of such factors (their product).
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .core import multiindex as mi
from .core.polynomial import XYPolynomial
from .core.scalar import Scalar, SymPoly, normalize, render_scalar
from .core.series import TruncatedSeries
from .parsing import parse_polynomial, parse_scalar
from .reduction import RamifiedChart
from .wilczynski import SupportShape


class InputError(ValueError):
    """A JSON document does not describe a valid object."""


def scalar_from_json(v: Any) -> Scalar:
    if isinstance(v, bool) or isinstance(v, float):
        raise InputError(f"{v!r} is not an exact scalar")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return parse_scalar(v)
    if isinstance(v, dict) and "sym" in v:
        return normalize(SymPoly.symbol(str(v["sym"])) ** int(v.get("pow", 1)))
    if isinstance(v, list):
        out: Scalar = 1
        for f in v:
            out = normalize(out * scalar_from_json(f))
        return out
    raise InputError(f"cannot read a scalar from {v!r}")


def scalar_to_json(c: Scalar) -> str:
    return render_scalar(c)


def _index(v: Any, r: int | None = None, what: str = "index") -> tuple[int, ...]:
    if not isinstance(v, list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        raise InputError(f"{what} must be a list of integers, got {v!r}")
    if r is not None and len(v) != r:
        raise InputError(f"{what} {v} does not have r={r} entries")
    return tuple(v)


# -- polynomials / equations --------------------------------------------------

def polynomial_from_json(doc: Mapping) -> XYPolynomial:
    """``{"r": r, "terms": [{"x": [...], "y": j, "coeff": ...}]}`` or ``{"r": r, "poly": "text"}``."""
    if "r" not in doc:
        raise InputError("missing field 'r'")
    r = int(doc["r"])
    if "poly" in doc:
        return parse_polynomial(str(doc["poly"]), r)
    terms: dict = {}
    for t in doc.get("terms", []):
        i = _index(t.get("x", [0] * r), r, "x exponent")
        j = int(t.get("y", 0))
        if j < 0:
            raise InputError("y-degrees must be natural")
        terms[(i, j)] = normalize(terms.get((i, j), 0) + scalar_from_json(t["coeff"]))
    return XYPolynomial(r, terms)


def polynomial_to_json(P: XYPolynomial) -> dict:
    return {
        "r": P.r,
        "terms": [{"x": list(i), "y": j, "coeff": scalar_to_json(c)} for (i, j), c in P.sorted_items()],
        "text": str(P),
    }


def henselian_q_from_json(doc: Mapping) -> XYPolynomial:
    """The right-hand side ``Q`` of ``y = Q(x, y)``.

    With ``"form": "henselian"`` the document lists ``Q`` itself; otherwise it
    lists a polynomial ``E`` with ``E = 0`` equivalent to ``y = y - E``.
    """
    P = polynomial_from_json(doc)
    form = doc.get("form", "polynomial")
    if form == "henselian":
        return P
    if form != "polynomial":
        raise InputError(f"unknown equation form {form!r}")
    return XYPolynomial.y(P.r) - P


# -- series -------------------------------------------------------------------

def series_from_json(doc: Mapping) -> TruncatedSeries:
    """``{"r", "bound": [...] | null, "coeffs": [{"n", "c"}], "generic": name?}``.

    ``"generic": "C"`` fills every unlisted index ``0 <grlex n <=grlex bound``
    with the symbol ``C_{n}``.
    """
    if "r" not in doc:
        raise InputError("missing field 'r'")
    r = int(doc["r"])
    bound = doc.get("bound")
    bound = None if bound is None else _index(bound, r, "bound")
    coeffs: dict = {}
    for rec in doc.get("coeffs", []):
        coeffs[_index(rec["n"], r, "series index")] = scalar_from_json(rec["c"])
    base = doc.get("generic")
    if base is not None:
        if bound is None:
            raise InputError("a generic series needs a bound")
        for n in mi.grlex_upto(r, bound):
            if any(n) and n not in coeffs:
                coeffs[n] = SymPoly.symbol(f"{base}_{{{','.join(map(str, n))}}}")
    try:
        return TruncatedSeries(r, coeffs, bound)
    except ValueError as e:
        raise InputError(str(e)) from e


def series_to_json(s: TruncatedSeries) -> dict:
    return {
        "r": s.r,
        "bound": None if s.bound is None else list(s.bound),
        "coeffs": [{"n": list(n), "c": scalar_to_json(c)} for n, c in s.items()],
    }


# -- shapes and charts --------------------------------------------------------

def _shape_pair(p: Any, r: int, what: str) -> tuple:
    if isinstance(p, dict):
        return _index(p["x"], r, what), int(p.get("y", 0))
    v = _index(p, r + 1, what)
    return v[:r], v[r]


def shape_from_json(doc: Mapping) -> SupportShape:
    """``{"r", "F": [[i..., j]...], "G": [[i..., 0]...]}`` or ``{"r", "full": {"dx", "dy"}}``.

    Pairs may also be written as ``{"x": [...], "y": j}``.  Order is validated
    (strictly increasing in alex order), not repaired.
    """
    r = int(doc["r"])
    try:
        if "full" in doc:
            return SupportShape.full(r, int(doc["full"]["dx"]), int(doc["full"]["dy"]))
        F = tuple(_shape_pair(p, r, "F pair") for p in doc.get("F", []))
        G = tuple(_shape_pair(p, r, "G pair") for p in doc.get("G", []))
        return SupportShape(r, F, G)
    except (ValueError, KeyError) as e:
        raise InputError(f"invalid shape: {e}") from e


def shape_to_json(shape: SupportShape) -> dict:
    return {
        "r": shape.r,
        "F": [list(i) + [j] for i, j in shape.F],
        "G": [list(i) + [j] for i, j in shape.G],
    }


def chart_from_json(doc: Mapping) -> RamifiedChart:
    try:
        return RamifiedChart(int(doc["p"]), tuple(doc.get("q", [])), tuple(doc["n0"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid chart: {e}") from e


# -- files ----------------------------------------------------------------------

def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh, parse_float=_reject_float)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: {e}") from e


def _reject_float(text: str) -> Fraction:
    raise InputError(f"floating-point number {text} in input; write it as \"p/q\"")


def dumps(doc: Any) -> str:
    """Canonical, byte-deterministic JSON text."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
