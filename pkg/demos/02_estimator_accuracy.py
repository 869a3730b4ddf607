"""How the random-direction Jacobian estimate behaves as the step shrinks.

For a quadratic ``0.5 x^T Q x`` the estimate along an orthonormal basis U is
``Qx + (gamma / 2) * sum_j (u_j^T Q u_j) u_j``, so the error is linear in gamma
and averages out over random bases.  Coordinate differences have the same
error magnitude but always in the same direction.
"""
import numpy as np

from ossnls.problems import EvalCounter, Problem
from ossnls.smoothing import jacobians_along, sample_orthonormal

rng = np.random.default_rng(1)
n = 5
B = rng.standard_normal((n, n))
Q = B + B.T
x = rng.standard_normal(n)
prob = Problem("quad", n, 1, 0, np.zeros(n), lambda v: np.array([0.5 * v @ Q @ v]),
               lambda v: np.zeros(0))
exact = Q @ x
kappa = np.linalg.norm(Q, 2)

print(f"kappa = {kappa:.3f}")
print("gamma    fd error   mean random error   rms random error   bound sqrt(n)*kappa*gamma/2")
for gamma in (1.0, 0.1, 0.01, 0.001):
    fd = jacobians_along(prob, x, gamma, None, EvalCounter()).Jr[0]
    draws = np.array([jacobians_along(prob, x, gamma, sample_orthonormal(n, rng), EvalCounter()).Jr[0]
                      for _ in range(2000)])
    rms = np.sqrt(np.mean(np.sum((draws - exact) ** 2, axis=1)))
    print(f"{gamma:<8g} {np.linalg.norm(fd - exact):.3e}  {np.linalg.norm(draws.mean(0) - exact):.3e}"
          f"           {rms:.3e}          {np.sqrt(n) * kappa * gamma / 2:.3e}")
