"""Command-line front end.

Exit status: 0 on success, 1 on input or usage errors, 2 for mathematically
negative verdicts (which still print their certificate).
"""

from __future__ import annotations

import argparse
import io as _io
import json
import os
import re
import sys
from contextlib import redirect_stdout
from pathlib import Path
from typing import Any, Sequence

from .core import multiindex as mi
from .core.polynomial import XYPolynomial
from .core.scalar import NotDivisible, RingMismatch, render_scalar
from .core.series import InsufficientTruncation
from .henselian import (HenselianEquation, NotStronglyReduced, check_univariate, fixed_point_univariate, fs_bounds,
                        fs_coefficient, fs_univariate, hensel_solve, is_strongly_reduced)
from .io import (InputError, chart_from_json, dumps, henselian_q_from_json, load_json, polynomial_from_json,
                 polynomial_to_json, scalar_from_json, series_from_json, shape_from_json, shape_to_json)
from .parsing import ParseError, parse_polynomial
from .reduction import (IntegralityViolation, NotASimpleRoot, PolynomialRootDetected,
                        SeparationResult, blm_coefficients, continue_coefficients, eisenstein_witness,
                        find_separation, param_ratio_bounds, ramified_substitute, support_constraints_r2,
                        to_henselian, verify_witness)
from .wilczynski import (NoValidReconstruction, NotAlgebraicAtDepth, SupportShape, check_algebraic,
                         reconstruct, reconstruction_bounds)

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2


class UsageError(ValueError):
    pass


class ResourceLimit(RuntimeError):
    pass


def _pairs_json(table: dict) -> list:
    items = sorted(table.items(), key=lambda kv: (mi.grlex_key(kv[0][0]), kv[0][1]))
    return [{"pair": list(i) + [j], "coeff": render_scalar(c)} for (i, j), c in items]


def _equation_q(ns) -> "Any":
    if ns.eq is not None:
        return henselian_q_from_json(load_json(ns.eq))
    if ns.expr is not None:
        E = parse_polynomial(ns.expr, ns.r)
        return XYPolynomial.y(E.r) - E
    raise UsageError("an equation is required (--eq FILE or --expr TEXT)")


def _polynomial(ns) -> "Any":
    if ns.eq is not None:
        return polynomial_from_json(load_json(ns.eq))
    if ns.expr is not None:
        return parse_polynomial(ns.expr, ns.r)
    raise UsageError("a polynomial is required (--eq FILE or --expr TEXT)")


# -- commands ------------------------------------------------------------------

def cmd_check(ns) -> tuple[dict, int]:
    series = series_from_json(load_json(ns.series))
    shape = shape_from_json(load_json(ns.shape))
    verdict = check_algebraic(series, shape, ns.depth)
    return verdict.to_json(), EXIT_NEGATIVE if isinstance(verdict, NotAlgebraicAtDepth) else EXIT_OK


def cmd_reconstruct(ns) -> tuple[dict, int]:
    series = series_from_json(load_json(ns.series))
    shape = shape_from_json(load_json(ns.shape))
    try:
        res = reconstruct(series, shape, exhaustive=ns.exhaustive, depth=ns.depth)
    except NoValidReconstruction as e:
        return {"verdict": "NoValidReconstruction", "reason": str(e)}, EXIT_NEGATIVE
    return res.to_json(), EXIT_OK


def cmd_hensel(ns) -> tuple[dict, int]:
    Q = _equation_q(ns)
    horizon = tuple(ns.horizon)
    if not is_strongly_reduced(Q) and Q.r == 1 and len(horizon) == 1:
        # classical univariate Henselian form (Q(0,0) = dQ/dy(0,0) = 0)
        check_univariate(Q)
        cs = fixed_point_univariate(Q, horizon[0])
        return {"Q": str(Q), "method": "classical-fixed-point", "horizon": list(horizon),
                "coefficients": [{"n": [k], "c": render_scalar(c)} for k, c in enumerate(cs, 1) if c != 0]}, EXIT_OK
    eq = HenselianEquation(Q)
    if len(horizon) != eq.r:
        raise UsageError(f"--horizon needs {eq.r} entries")
    sol = hensel_solve(eq, horizon, ns.max_generators)
    return {"Q": str(eq.Q), **sol.to_json()}, EXIT_OK


def cmd_fs(ns) -> tuple[dict, int]:
    eq = HenselianEquation(_equation_q(ns))
    n = tuple(ns.coeff)
    if len(n) != eq.r:
        raise UsageError(f"--coeff needs {eq.r} entries")
    c = fs_coefficient(eq, n)
    return {"Q": str(eq.Q), "bounds": fs_bounds(eq).to_json(), "n": list(n), "c": render_scalar(c)}, EXIT_OK


def cmd_fs_uni(ns) -> tuple[dict, int]:
    Q = _equation_q(ns)
    if ns.n < 1:
        raise UsageError("--n must be positive")
    cs = [fs_univariate(Q, k) for k in range(1, ns.n + 1)]
    return {"Q": str(Q), "coefficients": [{"n": [k], "c": render_scalar(c)} for k, c in enumerate(cs, 1)]}, EXIT_OK


def cmd_reduce(ns) -> tuple[dict, int]:
    P = _polynomial(ns)
    series = series_from_json(load_json(ns.series))
    sep = find_separation(P, series)
    out: dict = {"P": str(P), "separation": sep.to_json()}
    if not isinstance(sep, SeparationResult):
        return out, EXIT_NEGATIVE if isinstance(sep, NotASimpleRoot) else EXIT_OK
    if ns.k is None:
        return out, EXIT_OK
    k = tuple(ns.k)
    if len(k) != P.r:
        raise UsageError(f"--k needs {P.r} entries")
    eq = to_henselian(P, series, k, sep)
    if isinstance(eq, PolynomialRootDetected):
        out["henselian"] = eq.to_json()
        return out, EXIT_OK
    out["henselian"] = {"k": list(k), "Q": str(eq.Q), "b": _pairs_json(blm_coefficients(P, series, k, sep))}
    if ns.count:
        cont = continue_coefficients(P, series, k, sep, ns.count, best_effort=ns.best_effort)
        out["continuation"] = cont.to_json()
    return out, EXIT_OK


def cmd_ramify(ns) -> tuple[dict, int]:
    P = _polynomial(ns)
    chart = chart_from_json(load_json(ns.chart))
    out = ramified_substitute(P, chart)
    res = {"chart": chart.to_json(), "m": list(chart.m(P.y_degree())), "P": polynomial_to_json(out)}
    if chart.r == 2:
        pred = support_constraints_r2(chart, P.y_degree())
        res["congruences_hold"] = all(pred(i[0], i[1], j) for (i, j) in out.support())
    if any(j for _, j in out.support()):
        res["shape"] = shape_to_json(SupportShape.of_polynomial(out))
    return res, EXIT_OK


def cmd_eisenstein(ns) -> tuple[dict, int]:
    series = series_from_json(load_json(ns.series))
    horizon = tuple(ns.horizon)
    if len(horizon) != series.r:
        raise UsageError(f"--horizon needs {series.r} entries")
    try:
        if ns.delta0 is not None or ns.delta is not None:
            if ns.delta0 is None or ns.delta is None:
                raise UsageError("--delta0 and --delta go together")
            w = verify_witness(series, ns.delta0, ns.delta, horizon)
        else:
            if ns.dx is None or ns.dy is None:
                raise UsageError("--dx and --dy are required to derive the witness")
            P = polynomial_from_json(load_json(ns.eq)) if ns.eq is not None else None
            omega = scalar_from_json(ns.omega) if ns.omega is not None else None
            w = eisenstein_witness(series, ns.dx, ns.dy, horizon, P=P, omega=omega)
    except IntegralityViolation as e:
        return {"verdict": "IntegralityViolation", "reason": str(e)}, EXIT_NEGATIVE
    return w.to_json(), EXIT_OK


def cmd_bounds(ns) -> tuple[dict, int]:
    shape = shape_from_json(load_json(ns.shape)) if ns.shape else None
    rb = reconstruction_bounds(ns.dx, ns.dy, ns.r, shape)
    return {"reconstruction": rb.to_json(), "param_ratio": param_ratio_bounds(ns.dx, ns.dy, ns.r).to_json()}, EXIT_OK


def cmd_run(ns) -> tuple[dict, int]:
    path = Path(ns.job)
    job = load_json(path)
    argv = job_argv(job, path.parent)
    buf = _io.StringIO()
    with redirect_stdout(buf):
        status = main(argv)
    text = buf.getvalue()
    if ns.verify:
        want_status = int(job.get("expected_exit", 0))
        if status != want_status:
            raise UsageError(f"fixture {path.name}: exit {status}, expected {want_status}")
        if "expected" in job:
            got = json.loads(text) if text.strip() else None
            if got != job["expected"]:
                raise UsageError(f"fixture {path.name}: output differs from the expected document")
    if not text.strip():
        return {"exit": status}, status
    return json.loads(text) if text.lstrip().startswith(("{", "[")) else {"text": text}, status


def job_argv(job: dict, base: Path) -> list[str]:
    """Command-line arguments for a job document ``{"command", "inputs", "options", "format"}``."""
    if "command" not in job:
        raise InputError("job needs a 'command'")
    argv = [str(job["command"])]
    for name, value in job.get("inputs", {}).items():
        argv += [f"--{name}", str((base / value).resolve())]
    for name, value in job.get("options", {}).items():
        flag = f"--{name}"
        if value is True:
            argv.append(flag)
        elif value is False or value is None:
            continue
        elif isinstance(value, list):
            argv += [flag] + [str(v) for v in value]
        else:
            argv += [flag, str(value)]
    if "format" in job:
        argv += ["--format", str(job["format"])]
    return argv


COMMANDS = {
    "check": cmd_check, "reconstruct": cmd_reconstruct, "hensel": cmd_hensel, "fs": cmd_fs,
    "fs-uni": cmd_fs_uni, "reduce": cmd_reduce, "ramify": cmd_ramify, "eisenstein": cmd_eisenstein,
    "bounds": cmd_bounds, "run": cmd_run,
}


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="puiseux", description="Exact algebraic multivariate series toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("-o", "--output", help="write the result to this file instead of stdout")
        return sp

    def equation(sp):
        sp.add_argument("--eq", help="equation JSON file")
        sp.add_argument("--expr", help="polynomial text, e.g. 'y - x[1] - y^2'")
        sp.add_argument("--r", type=int, help="number of x variables for --expr")

    sp = add("check", "certify non-algebraicity or reconstruct an annihilator")
    sp.add_argument("--series", required=True)
    sp.add_argument("--shape", required=True)
    sp.add_argument("--depth", type=int)

    sp = add("reconstruct", "annihilating polynomial from a truncated series")
    sp.add_argument("--series", required=True)
    sp.add_argument("--shape", required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--exhaustive", action="store_true")

    sp = add("hensel", "solve y = Q(x, y) by iteration through a grlex horizon")
    equation(sp)
    sp.add_argument("--horizon", type=int, nargs="+", required=True)
    sp.add_argument("--max-generators", type=int)

    sp = add("fs", "one coefficient by the Flajolet-Soria formula")
    equation(sp)
    sp.add_argument("--coeff", type=int, nargs="+", required=True)

    sp = add("fs-uni", "univariate Flajolet-Soria coefficients c_1..c_n")
    equation(sp)
    sp.add_argument("--n", type=int, required=True)

    sp = add("reduce", "separation index, Henselian equation and continuation of a root")
    equation(sp)
    sp.add_argument("--series", required=True)
    sp.add_argument("--k", type=int, nargs="+")
    sp.add_argument("--count", type=int, default=0)
    sp.add_argument("--best-effort", action="store_true")

    sp = add("ramify", "apply a ramified change of variables")
    equation(sp)
    sp.add_argument("--chart", required=True)

    sp = add("eisenstein", "integers delta0, delta with delta0*delta^|n|*c_n integral")
    sp.add_argument("--series", required=True)
    sp.add_argument("--dx", type=int)
    sp.add_argument("--dy", type=int)
    sp.add_argument("--horizon", type=int, nargs="+", required=True)
    sp.add_argument("--eq", help="annihilating polynomial (skips reconstruction)")
    sp.add_argument("--omega", help="omega0 value (skips the reduction)")
    sp.add_argument("--delta0", type=int)
    sp.add_argument("--delta", type=int)

    sp = add("bounds", "degree and depth bounds")
    sp.add_argument("--dx", type=int, required=True)
    sp.add_argument("--dy", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--shape")

    sp = add("run", "execute a job document (optionally checking its expected output)")
    sp.add_argument("job")
    sp.add_argument("--verify", action="store_true")
    return p


# -- rendering -------------------------------------------------------------------

def render_text(doc: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(doc, dict):
        lines = []
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(doc, list):
        lines = []
        for v in doc:
            if isinstance(v, dict) and set(v) == {"n", "c"}:
                lines.append(f"{pad}c_{mi.render_index(v['n'])} = {v['c']}")
            elif isinstance(v, dict) and set(v) == {"pair", "coeff"}:
                lines.append(f"{pad}{v['pair']}: {v['coeff']}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
        return "\n".join(lines)
    return f"{pad}{doc}"


_DIGITS = re.compile(r"\d+")


def check_bigint_guard(text: str) -> None:
    limit = os.environ.get("PUISEUX_MAX_BIGINT_BITS")
    if not limit:
        return
    bits = int(limit)
    for m in _DIGITS.finditer(text):
        if int(m.group()).bit_length() > bits:
            raise ResourceLimit(f"an integer in the result exceeds PUISEUX_MAX_BIGINT_BITS={bits}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        doc, status = COMMANDS[ns.command](ns)
        text = dumps(doc) if ns.format == "json" else render_text(doc) + "\n"
        check_bigint_guard(text)
    except (InputError, ParseError, UsageError, NotStronglyReduced, InsufficientTruncation, RingMismatch,
            NotDivisible, ResourceLimit, mi.DimensionMismatch, ValueError, TypeError, KeyError, OSError) as e:
        print(f"puiseux: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if ns.output:
        Path(ns.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
