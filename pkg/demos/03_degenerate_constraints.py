"""Duplicated squared constraints make the constraint Jacobian rank deficient.

The feasible set does not change, but at every feasible point the gradients
of the squared copies vanish.  This script shows the rank drop and how each
curvature model copes.
"""
import numpy as np

from ossnls import SolverConfig, get_problem, make_degenerate, problem_names, solve
from ossnls.problems import EvalCounter
from ossnls.smoothing import jacobians_along

base = get_problem("hs28")
deg = make_degenerate(base)
J = jacobians_along(deg, base.x_opt, 1e-7, None, EvalCounter()).Jc
print("constraint Jacobian of", deg.name, "at the solution:\n", np.round(J, 6))
print("singular values:", np.round(np.linalg.svd(J, compute_uv=False), 8))

print(f"\n{'problem':18s} {'sr1':>10s} {'bfgs':>10s} {'zero':>10s}")
for name in problem_names("degenerate"):
    cells = []
    for hess in ("sr1", "bfgs", "zero"):
        res = solve(get_problem(name), SolverConfig(jacobian="fd", hessian=hess))
        cells.append(res.status.name[:10])
    print(f"{name:18s} " + " ".join(f"{c:>10s}" for c in cells))
