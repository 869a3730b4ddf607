"""Quasi-Newton models of the constraint Hessians.

Residual Hessians are approximated by zero, so the curvature block of the
saddle system is ``-sum_i y_i * Hc[i]``.
"""
from __future__ import annotations

import enum
from typing import Optional

import numpy as np

__all__ = ["HessianMode", "HessianModel", "SR1_TOL", "BFGS_TOL", "BFGS_CURV_TOL"]

SR1_TOL = 1e-7
BFGS_TOL = 1e-7
BFGS_CURV_TOL = 1e-12


class HessianMode(enum.Enum):
    SR1 = "sr1"
    BFGS = "bfgs"
    ZERO = "zero"

    @classmethod
    def parse(cls, value) -> "HessianMode":
        if isinstance(value, cls):
            return value
        for mode in cls:
            if value in (mode.value, mode.name):
                return mode
        raise ValueError(f"unknown hessian mode {value!r}")


def sr1_update(H: np.ndarray, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    v = y - H @ t
    denom = v @ t
    if abs(denom) < SR1_TOL:
        return H
    return H + np.outer(v, v) / denom


def bfgs_update(H: np.ndarray, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    ty = t @ y
    if abs(ty) < BFGS_TOL:
        return H
    Ht = H @ t
    if not np.any(Ht):
        # limit of the second term as H t -> 0 is zero; lets the model leave H = 0
        return H + np.outer(y, y) / ty
    tHt = t @ Ht
    if abs(tHt) < BFGS_CURV_TOL:
        return H
    return H + np.outer(y, y) / ty - np.outer(Ht, Ht) / tHt


class HessianModel:
    """One symmetric ``n x n`` matrix per constraint, starting from zero.

    :meth:`update` is fed consecutive outer iterates and the constraint
    Jacobian estimates there; the first call only records the pair.
    """

    def __init__(self, mode, n: int, m: int):
        self.mode = HessianMode.parse(mode)
        self.n = n
        self.m = m
        self.Hc = [np.zeros((n, n)) for _ in range(m)]
        self.last_x: Optional[np.ndarray] = None
        self.last_Jc: Optional[np.ndarray] = None

    def update(self, x_new, Jc_new) -> "HessianModel":
        x_new = np.asarray(x_new, dtype=float)
        Jc_new = np.asarray(Jc_new, dtype=float)
        if x_new.shape != (self.n,) or Jc_new.shape != (self.m, self.n):
            raise ValueError(
                f"expected x of shape ({self.n},) and Jc of shape ({self.m}, {self.n}), "
                f"got {x_new.shape} and {Jc_new.shape}"
            )
        if self.last_x is not None and self.mode is not HessianMode.ZERO:
            t = x_new - self.last_x
            step = sr1_update if self.mode is HessianMode.SR1 else bfgs_update
            for i in range(self.m):
                yc = Jc_new[i] - self.last_Jc[i]
                H = step(self.Hc[i], t, yc)
                self.Hc[i] = 0.5 * (H + H.T)
        self.last_x = x_new.copy()
        self.last_Jc = Jc_new.copy()
        return self

    def assemble(self, z, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        H = np.zeros((self.n, self.n))
        for yi, Hi in zip(y, self.Hc):
            H -= yi * Hi
        return H
