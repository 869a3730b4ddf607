"""Benchmark the three Jacobian modes and draw a performance profile.

Writes per-run traces, ``runs.csv``, ``profile.csv`` and (with matplotlib)
``profile.svg`` into the directory given as the first argument, default
``./profile-demo``.  The same can be done from the shell::

    ossnls bench --problems constrained --solvers fd+sr1,oss-v1+sr1,oss-v2+sr1 --seeds 5 --out-dir runs
    ossnls profile --in runs --tau 1e-5 --out profile.csv --svg profile.svg
"""
import sys

from ossnls.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "profile-demo"
main(["bench", "--problems", "constrained,unconstrained", "--solvers", "fd+sr1,oss-v1+sr1,oss-v2+sr1",
      "--seeds", "5", "--out-dir", out])
for tau in ("1e-5", "1e-7"):
    args = ["profile", "--in", out, "--tau", tau, "--out", f"{out}/profile-{tau}.csv"]
    try:
        import matplotlib  # noqa: F401

        args += ["--svg", f"{out}/profile-{tau}.svg"]
    except ImportError:
        pass
    print(f"tau = {tau}")
    main(args)
