"""Jacobian estimates from forward differences along orthonormal directions.

Given an orthonormal basis ``U = [u_1, ..., u_n]`` and a step ``gamma``, each
residual gradient is estimated as::

    g_i = sum_j (r_i(x + gamma u_j) - r_i(x)) / gamma * u_j

With ``U = I`` this is plain forward differencing; with ``U`` drawn from the
Haar measure on the orthogonal group it is orthogonal spherical smoothing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import EvalCounter, Problem, evaluate_c, evaluate_r

__all__ = [
    "DirectionMode",
    "DirectionSampler",
    "JacobianPair",
    "sample_orthonormal",
    "estimate_jacobians",
    "jacobians_along",
    "POOL_SIZE",
]

POOL_SIZE = 10


class DirectionMode(enum.Enum):
    OSS_FRESH = "oss-v1"
    OSS_POOL = "oss-v2"
    COORDINATE = "fd"

    @classmethod
    def parse(cls, value) -> "DirectionMode":
        if isinstance(value, cls):
            return value
        for mode in cls:
            if value in (mode.value, mode.name):
                return mode
        raise ValueError(f"unknown jacobian mode {value!r}")


def sample_orthonormal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n orthogonal matrix.

    QR of a Gaussian matrix with the signs of R's diagonal moved into Q.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        g = rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        d = np.diag(r)
        if np.min(np.abs(d)) > 1e-10 * np.max(np.abs(d)):
            break
    return q * np.where(d < 0.0, -1.0, 1.0)


class DirectionSampler:
    """Hands out direction sets according to a :class:`DirectionMode`.

    The ``OSS_POOL`` pool is drawn lazily on first use for a given ``n`` and
    then reused for the lifetime of the sampler (one run).
    """

    def __init__(self, mode, rng: np.random.Generator):
        self.mode = DirectionMode.parse(mode)
        self.rng = rng
        self._pools: dict[int, list[np.ndarray]] = {}

    def pool(self, n: int) -> list[np.ndarray]:
        if n not in self._pools:
            self._pools[n] = [sample_orthonormal(n, self.rng) for _ in range(POOL_SIZE)]
        return self._pools[n]

    def draw(self, n: int) -> np.ndarray:
        if self.mode is DirectionMode.COORDINATE:
            return np.eye(n)
        if self.mode is DirectionMode.OSS_FRESH:
            return sample_orthonormal(n, self.rng)
        pool = self.pool(n)
        return pool[int(self.rng.integers(len(pool)))]


@dataclass(frozen=True)
class JacobianPair:
    Jr: np.ndarray
    Jc: np.ndarray
    gamma: float
    x_at: np.ndarray


def jacobians_along(
    prob: Problem,
    x: np.ndarray,
    gamma: float,
    U: Optional[np.ndarray],
    ctr: EvalCounter,
    r_x: Optional[np.ndarray] = None,
    c_x: Optional[np.ndarray] = None,
) -> JacobianPair:
    """Difference Jacobians of r and c along the columns of ``U``.

    ``U=None`` means coordinate directions; the difference quotients are then
    used as the Jacobian columns directly, without a product with ``I``.
    Base values ``r_x``/``c_x`` are evaluated only if not supplied.  For
    ``m = 0`` no constraint evaluations are made.
    """
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    n = prob.n
    constrained = prob.m > 0
    if r_x is None:
        r_x = evaluate_r(prob, x, ctr)
    if constrained and c_x is None:
        c_x = evaluate_c(prob, x, ctr)

    dr = np.empty((prob.p, n))
    dc = np.empty((prob.m, n))
    for j in range(n):
        if U is None:
            xj = x.copy()
            xj[j] += gamma
        else:
            xj = x + gamma * U[:, j]
        dr[:, j] = (evaluate_r(prob, xj, ctr) - r_x) / gamma
        if constrained:
            dc[:, j] = (evaluate_c(prob, xj, ctr) - c_x) / gamma

    if U is None:
        Jr, Jc = dr, dc
    else:
        Jr, Jc = dr @ U.T, dc @ U.T
    return JacobianPair(Jr=Jr, Jc=Jc, gamma=float(gamma), x_at=x.copy())


def estimate_jacobians(
    prob: Problem,
    x: np.ndarray,
    gamma: float,
    sampler: DirectionSampler,
    ctr: EvalCounter,
    r_x: Optional[np.ndarray] = None,
    c_x: Optional[np.ndarray] = None,
) -> JacobianPair:
    """Approximate Jacobians of r and c at ``x`` sharing one direction set."""
    U = None if sampler.mode is DirectionMode.COORDINATE else sampler.draw(prob.n)
    return jacobians_along(prob, x, gamma, U, ctr, r_x, c_x)
