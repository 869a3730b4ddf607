import csv

import pytest

from ossnls.cli import main, parse_solver_tag
from ossnls.hessian import HessianMode
from ossnls.smoothing import DirectionMode


def test_solve_exit_code_and_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    rc = main(["solve", "--problem", "hs6", "--jacobian", "fd", "--hessian", "sr1", "--seed", "0",
               "--tol", "1e-5", "--max-iters", "150", "--inner-max-iters", "50", "--out", str(out)])
    assert rc == 0
    assert "CONVERGED" in capsys.readouterr().out
    assert out.read_bytes().startswith(b"fevals,merit_phi,f,cviol_inf,kkt_scaled\n")


def test_solve_budget_exit_code():
    assert main(["solve", "--problem", "hs6", "--max-fevals", "1"]) == 2


def test_unknown_problem_is_usage_error():
    assert main(["solve", "--problem", "nope"]) == 64


def test_bench_then_profile(tmp_path):
    d = tmp_path / "runs"
    assert main(["bench", "--problems", "hs6,hs27", "--solvers", "fd+sr1,oss-v1+sr1",
                 "--seeds", "2", "--out-dir", str(d)]) == 0
    with open(d / "runs.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * (1 + 2)
    assert all((d / r["trace"]).exists() for r in rows)
    for r in rows:
        [float(r[k]) for k in ("f", "cviol", "kkt", "phi0")]
    prof = tmp_path / "profile.csv"
    assert main(["profile", "--in", str(d), "--tau", "1e-5", "--out", str(prof)]) == 0
    text = prof.read_bytes()
    assert text.startswith(b"alpha,solver,pi\n") and b"\r" not in text


def test_solver_tags():
    assert parse_solver_tag("oss-v1+bfgs") == (DirectionMode.OSS_FRESH, HessianMode.BFGS)
    with pytest.raises(ValueError):
        parse_solver_tag("oss-v1")
