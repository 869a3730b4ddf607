"""Solve a small constrained least-squares problem three ways.

Run with ``python3 demos/01_solve_one_problem.py``.
"""
import numpy as np

from ossnls import SolverConfig, get_problem, solve

# hs6: min 0.5 (1 - x1)^2  s.t.  10 (x2 - x1^2) = 0, start (-1.2, 1)
prob = get_problem("hs6")
print(prob.name, "n =", prob.n, "p =", prob.p, "m =", prob.m, "x0 =", prob.x0)

# coordinate differences are deterministic; the two random-direction modes get a seed
for mode in ("fd", "oss-v1", "oss-v2"):
    res = solve(prob, SolverConfig(jacobian=mode, hessian="sr1", seed=0))
    print(f"{mode:7s} {res.status.name:10s} x = {np.round(res.x, 8)}  f = {res.f:.3e}  "
          f"|c| = {res.cviol:.1e}  outer iters = {res.iters}  fevals = {res.fevals}")

# each trace row: combined evaluations so far and the best penalized merit seen
res = solve(prob, SolverConfig(jacobian="oss-v1", seed=0))
print("\nfevals  best merit")
for row in res.trace:
    print(f"{row.fevals:6d}  {row.merit_phi:.6e}")

# how each outer iteration was taken: a Newton step or a fallback inner LM run
print("\nk  kind           merit before -> after")
for t in res.transitions:
    print(f"{t.k:<2d} {t.kind:14s} {t.merit_before:.3e} -> {t.merit_after:.3e}")
