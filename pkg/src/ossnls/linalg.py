"""Small dense kernels: least squares, the damped LM step, the saddle solve."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

__all__ = [
    "SingularSystemError",
    "SaddleSystem",
    "SaddleSolution",
    "solve_least_squares",
    "solve_lm_step",
    "solve_saddle",
    "SINGULAR_PIVOT_TOL",
]

SINGULAR_PIVOT_TOL = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    pass


def solve_least_squares(A, b) -> np.ndarray:
    """Minimum-norm minimizer of ||A y - b||."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    if A.shape[1] == 0:
        return np.zeros(0)
    y, *_ = np.linalg.lstsq(A, b, rcond=None)
    return y


def solve_lm_step(J, Phi, mu: float) -> np.ndarray:
    """Solve ``(J^T J + mu I) d = -J^T Phi``.

    The normal matrix is never formed: ``d`` is the least-squares solution of
    ``[J; sqrt(mu) I] d = -[Phi; 0]`` obtained from a QR factorization of the
    stacked matrix.
    """
    J = np.asarray(J, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    q, n = J.shape
    if not np.any(Phi):
        return np.zeros(n)
    A = np.vstack([J, np.sqrt(mu) * np.eye(n)])
    rhs = np.concatenate([-Phi, np.zeros(n)])
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if diag.size < n or diag.min() <= 1e-14 * max(diag.max(), 1.0):
        raise SingularSystemError("singular LM system")
    return scipy.linalg.solve_triangular(R, Q.T @ rhs)


@dataclass
class SaddleSystem:
    """``[[Hrho, Jr^T, Jc^T], [Jr, -I, 0], [Jc, 0, -delta I]]`` and its rhs."""

    Hrho: np.ndarray
    Jr: np.ndarray
    Jc: np.ndarray
    delta: float
    rhs: np.ndarray

    def matrix(self) -> np.ndarray:
        n = self.Hrho.shape[0]
        p = self.Jr.shape[0]
        m = self.Jc.shape[0]
        K = np.zeros((n + p + m, n + p + m))
        K[:n, :n] = 0.5 * (self.Hrho + self.Hrho.T)
        K[n:n + p, :n] = self.Jr
        K[:n, n:n + p] = self.Jr.T
        K[n + p:, :n] = self.Jc
        K[:n, n + p:] = self.Jc.T
        K[n:n + p, n:n + p] = -np.eye(p)
        K[n + p:, n + p:] = -self.delta * np.eye(m)
        return K


@dataclass
class SaddleSolution:
    dx: Optional[np.ndarray]
    dz: Optional[np.ndarray]
    dy: Optional[np.ndarray]
    singular: bool


def _ldl_solve(K: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """Bunch-Kaufman solve; ``None`` when a pivot block is numerically singular.

    K is first equilibrated as ``S K S`` with ``S = diag(1/sqrt(max_j |K_ij|))``
    so that the pivot test is relative to each row's own magnitude.
    """
    N = K.shape[0]
    row_max = np.max(np.abs(K), axis=1)
    if np.any(row_max == 0.0):
        return None
    s = 1.0 / np.sqrt(row_max)
    Ks = K * s[:, None] * s[None, :]
    lu, d, perm = scipy.linalg.ldl(Ks, lower=True)

    # d is block diagonal with 1x1 and 2x2 blocks
    i = 0
    while i < N:
        if i + 1 < N and d[i + 1, i] != 0.0:
            ev = np.linalg.eigvalsh(d[i:i + 2, i:i + 2])
            if np.min(np.abs(ev)) < SINGULAR_PIVOT_TOL:
                return None
            i += 2
        else:
            if abs(d[i, i]) < SINGULAR_PIVOT_TOL:
                return None
            i += 1

    L = lu[perm]
    u = scipy.linalg.solve_triangular(L, (s * b)[perm], lower=True, unit_diagonal=True)
    v = scipy.linalg.solve_banded((1, 1), _tridiag_bands(d), u)
    w = scipy.linalg.solve_triangular(L.T, v, lower=False, unit_diagonal=True)
    x = np.empty(N)
    x[perm] = w
    return s * x


def _tridiag_bands(d: np.ndarray) -> np.ndarray:
    N = d.shape[0]
    ab = np.zeros((3, N))
    ab[0, 1:] = np.diag(d, 1)
    ab[1] = np.diag(d)
    ab[2, :-1] = np.diag(d, -1)
    return ab


def solve_saddle(sys: SaddleSystem) -> SaddleSolution:
    """Solve the symmetric saddle system for ``(dx, dz, -dy)``.

    Returns ``dy`` with its sign restored.  If the symmetric indefinite
    factorization of the row-equilibrated matrix hits a pivot below ``1e-12``
    the solution fields are ``None`` and ``singular`` is set.
    """
    K = sys.matrix()
    b = np.asarray(sys.rhs, dtype=float)
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite saddle system")
    if not sys.delta > 0.0:
        raise ValueError("delta must be positive")
    n = sys.Hrho.shape[0]
    p = sys.Jr.shape[0]
    sol = _ldl_solve(K, b)
    if sol is None or not np.all(np.isfinite(sol)):
        return SaddleSolution(None, None, None, True)
    return SaddleSolution(sol[:n], sol[n:n + p], -sol[n + p:], False)
