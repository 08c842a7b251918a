from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from puiseux.cli import job_argv, main
from puiseux.parsing import parse_scalar

FIX = Path(__file__).resolve().parent.parent / "fixtures" / "paper"


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out = capsys.readouterr()
    return status, out.out, out.err


def test_fs_prints_coefficient(capsys):
    status, out, _ = run(capsys, "fs", "--eq", FIX / "ex_fs_gene.json", "--coeff", -1, 3)
    assert status == 0
    doc = json.loads(out)
    assert parse_scalar(doc["c"]) == parse_scalar(
        "a_{-1,3,0} + a_{0,1,1}*a_{-1,2,0} + a_{1,-1,2}*a_{-1,2,0}^2")
    assert doc["bounds"] == {"iota0": [1, 1], "lambda": [3, 2]}


def test_check_corrupted_exits_two_with_witness(capsys):
    status, out, _ = run(capsys, "check", "--series", FIX / "root_series_corrupted.json",
                         "--shape", FIX / "root_shape.json")
    assert status == 2
    doc = json.loads(out)
    assert doc["verdict"] == "NotAlgebraicAtDepth"
    assert doc["witness"]["minor"] not in ("", "0")


def test_check_true_root_reconstructs(capsys):
    status, out, _ = run(capsys, "check", "--series", FIX / "root_series.json", "--shape", FIX / "root_shape.json")
    assert status == 0 and json.loads(out)["verdict"] == "ConsistentWithReconstruction"


def test_bounds(capsys):
    status, out, _ = run(capsys, "bounds", "--dx", 1, "--dy", 2, "--r", 2)
    doc = json.loads(out)
    assert status == 0
    assert doc["reconstruction"]["N"] == 4 and doc["reconstruction"]["F_degree_bound"] == 8
    assert doc["param_ratio"]["M1"] == 9


def test_hensel_text_equation(capsys):
    status, out, _ = run(capsys, "hensel", "--expr", "y - x[1] - y^2", "--r", 1, "--horizon", 6)
    assert status == 0
    doc = json.loads(out)
    assert [int(c["c"]) for c in doc["coefficients"]] == [1, 1, 2, 5, 14, 42]


def test_fs_uni(capsys):
    status, out, _ = run(capsys, "fs-uni", "--expr", "y - x[1] - y^2", "--r", 1, "--n", 6)
    assert status == 0
    assert [int(c["c"]) for c in json.loads(out)["coefficients"]] == [1, 1, 2, 5, 14, 42]


def test_reduce_ex_fs(capsys):
    status, out, _ = run(capsys, "reduce", "--eq", FIX / "ex_fs_P.json", "--series", FIX / "ex_fs_prefix.json",
                         "--k", 0, 1, "--count", 4, "--best-effort")
    assert status == 0
    doc = json.loads(out)
    assert doc["separation"]["k0"] == [0, 0]
    assert len(doc["henselian"]["b"]) == 12
    assert doc["continuation"]["guarantee"] == "separation-only"


def test_eisenstein_stated_witness(capsys):
    status, out, _ = run(capsys, "eisenstein", "--series", FIX / "sqrt1px.json", "--horizon", 10,
                         "--delta0", 2, "--delta", 4)
    assert status == 0 and json.loads(out)["delta"] == 4
    status, out, _ = run(capsys, "eisenstein", "--series", FIX / "sqrt1px.json", "--horizon", 10,
                         "--delta0", 1, "--delta", 1)
    assert status == 2 and json.loads(out)["verdict"] == "IntegralityViolation"


def test_input_errors_exit_one(capsys, tmp_path):
    assert run(capsys, "fs", "--eq", tmp_path / "missing.json", "--coeff", 1)[0] == 1
    assert run(capsys, "fs", "--expr", "x[1] + * y", "--coeff", 1)[0] == 1
    assert run(capsys, "hensel", "--expr", "y - y^2", "--r", 1, "--horizon", 3)[0] == 1
    assert run(capsys, "fs", "--eq", FIX / "ex_fs_gene.json", "--coeff", 1)[0] == 1
    assert run(capsys, "nosuchcommand")[0] == 1
    bad = tmp_path / "float.json"
    bad.write_text('{"r": 1, "terms": [{"x": [1], "y": 0, "coeff": 0.5}]}')
    status, _, err = run(capsys, "fs", "--eq", bad, "--coeff", 1)
    assert status == 1 and "floating-point" in err


def test_output_is_deterministic(capsys, tmp_path):
    argv = ["hensel", "--eq", FIX / "ex_fs_gene.json", "--horizon", 0, 4]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    out = tmp_path / "o.json"
    run(capsys, *argv, "-o", out)
    assert out.read_text() == first


def test_text_format(capsys):
    status, out, _ = run(capsys, "fs-uni", "--expr", "y - x[1] - y^2", "--r", 1, "--n", 3, "--format", "text")
    assert status == 0 and "c_(3) = 2" in out


def test_bigint_guard(capsys, monkeypatch):
    monkeypatch.setenv("PUISEUX_MAX_BIGINT_BITS", "8")
    status, _, err = run(capsys, "fs-uni", "--expr", "y - x[1] - y^2", "--r", 1, "--n", 12)
    assert status == 1 and "PUISEUX_MAX_BIGINT_BITS" in err
    monkeypatch.setenv("PUISEUX_MAX_BIGINT_BITS", "64")
    assert run(capsys, "fs-uni", "--expr", "y - x[1] - y^2", "--r", 1, "--n", 12)[0] == 0


def test_job_argv():
    job = {"command": "fs", "inputs": {"eq": "e.json"}, "options": {"coeff": [-1, 3], "best-effort": True,
                                                                   "skip": False}, "format": "text"}
    argv = job_argv(job, Path("/base"))
    assert argv == ["fs", "--eq", "/base/e.json", "--coeff", "-1", "3", "--best-effort", "--format", "text"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "puiseux.cli", "bounds", "--dx", "1", "--dy", "2", "--r", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reconstruction"]["N"] == 4
