"""Regularized augmented-Lagrangian outer iteration.

Each outer step solves the regularized saddle system for a Newton-like step on
the approximate KKT residual of the current subproblem.  The step is kept if
the KKT merit drops by the sufficient-decrease rule; otherwise the
derivative-free LM loop in :mod:`ossnls.lm_inner` produces the next iterate.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hessian import HessianMode, HessianModel
from .linalg import SaddleSystem, solve_least_squares, solve_saddle
from .lm_inner import (
    InnerParams,
    InnerStatus,
    OuterContext,
    gamma_floor,
    merit_star,
    run_inner,
)
from .problems import (
    BudgetExhausted,
    EvalCounter,
    EvaluationFailure,
    Problem,
    evaluate_c,
    evaluate_r,
)
from .smoothing import DirectionMode, DirectionSampler, JacobianPair, estimate_jacobians

__all__ = [
    "Status",
    "SolverConfig",
    "Iterate",
    "TraceRow",
    "Transition",
    "SolveResult",
    "kkt_residual",
    "init_multiplier",
    "scaled_kkt",
    "stopping_test",
    "update_schedules",
    "newton_step",
    "solve",
    "RHO_MAX",
    "DELTA_MIN",
]

log = logging.getLogger(__name__)

RHO_MAX = 1e12
RHO_MIN = 1e-8
DELTA_MIN = 1e-6


class Status(enum.IntEnum):
    CONVERGED = 0
    MAX_ITERS = 1
    BUDGET = 2
    FEASIBILITY_STALL = 3
    FAILED = 4
    FAILED_SINGULAR = 5


@dataclass(frozen=True)
class SolverConfig:
    delta0: float = 1.0
    rho0: float = 0.0
    eps0: float = 1e3
    gamma0: float = 1.0
    theta: float = 0.99
    p0: float = 0.001
    p1: float = 0.25
    p2: float = 0.75
    p3: float = 1e-10
    p4: float = 1e12
    lambda_min: float = 1e-8
    K1: int = 150
    K2: int = 50
    kkt_tol: float = 1e-5
    max_fevals: Optional[int] = None
    jacobian: DirectionMode = DirectionMode.COORDINATE
    hessian: HessianMode = HessianMode.SR1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "jacobian", DirectionMode.parse(self.jacobian))
        object.__setattr__(self, "hessian", HessianMode.parse(self.hessian))
        # the default p2 = 0.75 is below 1, so only the ordering is checked
        if not (0.0 < self.p0 < self.p1 < self.p2 and self.p0 < 1.0):
            raise ValueError("need 0 < p0 < p1 < p2 and p0 < 1")
        if not (0.0 < self.p3 < 1.0 < self.p4):
            raise ValueError("need 0 < p3 < 1 < p4")
        if not (0.0 < self.theta < 1.0):
            raise ValueError("need 0 < theta < 1")
        if not (self.delta0 > 0.0 and self.rho0 >= 0.0 and self.eps0 > 0.0 and self.gamma0 > 0.0):
            raise ValueError("need delta0 > 0, rho0 >= 0, eps0 > 0, gamma0 > 0")
        if self.K1 < 0 or self.K2 < 0:
            raise ValueError("iteration limits must be nonnegative")

    def budget(self, n: int) -> int:
        return self.max_fevals if self.max_fevals is not None else 500 * (n + 1)

    def inner_params(self) -> InnerParams:
        return InnerParams(theta=self.theta, p0=self.p0, p1=self.p1, p2=self.p2, p3=self.p3,
                           p4=self.p4, lambda_min=self.lambda_min, max_iters=self.K2,
                           delta_min=DELTA_MIN)


@dataclass
class Iterate:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class TraceRow:
    fevals: int
    merit_phi: float  # best so far
    f: float
    cviol_inf: float
    kkt_scaled: float


@dataclass(frozen=True)
class Transition:
    """One outer step, kept for checking the sufficient-decrease chain."""

    k: int
    kind: str  # "newton" | "inner-success" | "inner-max-iters" | "inner-stall"
    merit_before: float
    merit_after: float
    eps: float
    gamma_before: float
    gamma_after: float
    dx_norm: float
    delta: float
    rho: float


@dataclass
class SolveResult:
    status: Status
    x: np.ndarray
    f: float
    cviol: float
    kkt_res: float
    iters: int
    fevals: int
    trace: list = field(default_factory=list)
    transitions: list = field(default_factory=list)
    y: Optional[np.ndarray] = None
    message: str = ""

    def chain_violations(self, theta: float) -> list:
        return [t for t in self.transitions if t.kind in ("newton", "inner-success")
                and not t.merit_after <= theta * t.merit_before + t.eps]


def kkt_residual(jac: JacobianPair, w: Iterate, r_val, c_val):
    """The three approximate KKT blocks at ``w`` and the sum of their norms."""
    parts = (jac.Jr.T @ w.z - jac.Jc.T @ w.y, w.z - r_val, np.asarray(c_val, dtype=float))
    return parts, merit_star(jac.Jr, jac.Jc, w.z, w.y, r_val, c_val)


def init_multiplier(jac0: JacobianPair, r0) -> np.ndarray:
    """Least-squares multiplier: argmin ||Jc^T y - Jr^T r0||."""
    if jac0.Jc.shape[0] == 0:
        return np.zeros(0)
    return solve_least_squares(jac0.Jc.T, jac0.Jr.T @ r0)


def scaled_kkt(jac: JacobianPair, y, r_val, c_val) -> float:
    """max(scaled ||Jr^T r - Jc^T y||_inf, ||c||_inf)."""
    y = np.asarray(y, dtype=float)
    g = jac.Jr.T @ r_val - jac.Jc.T @ y
    m = y.size
    scale = max(100.0, np.abs(y).sum() / m) / 100.0 if m > 0 else 1.0
    cinf = float(np.max(np.abs(c_val))) if m > 0 else 0.0
    ginf = float(np.max(np.abs(g))) if g.size else 0.0
    return max(ginf / scale, cinf)


def stopping_test(jac: JacobianPair, x, y, r_val, c_val, tol: float) -> bool:
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    return scaled_kkt(jac, y, r_val, c_val) <= tol


def update_schedules(delta_prev: float, eps: float, merit_new: float) -> tuple[float, float]:
    """Penalty and tolerance schedules after an accepted outer step.

    Returns ``(delta_next, eps_next)``; ``eps_next`` uses ``delta_prev``.
    """
    delta_next = max(DELTA_MIN, min(0.1 * delta_prev, merit_new))
    eps_next = max(min(1e3 * delta_prev, 0.99 * eps), 0.9 * eps)
    return delta_next, eps_next


def next_eps(delta: float, eps: float) -> float:
    return max(min(1e3 * delta, 0.99 * eps), 0.9 * eps)


@dataclass
class _State:
    k: int
    w: Iterate
    r_x: np.ndarray
    c_x: np.ndarray
    jac: JacobianPair
    gamma: float
    delta: float
    rho: float
    eps: float
    merit: float


@dataclass
class NewtonStep:
    w_hat: Iterate
    r_hat: np.ndarray
    c_hat: np.ndarray
    jac_hat: JacobianPair
    gamma_hat: float
    rho: float
    saddle: SaddleSystem


class SingularNewtonSystem(RuntimeError):
    pass


def newton_step(prob: Problem, st: _State, hess: HessianModel, sampler: DirectionSampler,
                ctr: EvalCounter) -> NewtonStep:
    """Regularized Newton-like step from ``st``, inflating rho while singular."""
    w, jac = st.w, st.jac
    H = hess.assemble(w.z, w.y)
    rhs = np.concatenate([
        -jac.Jr.T @ w.z + jac.Jc.T @ w.y,
        w.z - st.r_x,
        -st.c_x,
    ])
    rho = st.rho
    while True:
        system = SaddleSystem(H + rho * np.eye(prob.n), jac.Jr, jac.Jc, st.delta, rhs)
        sol = solve_saddle(system)
        if not sol.singular:
            break
        rho = max(RHO_MIN, 10.0 * rho)
        if rho > RHO_MAX:
            raise SingularNewtonSystem("regularization exceeded 1e12")
    w_hat = Iterate(w.x + sol.dx, w.z + sol.dz, w.y + sol.dy)
    r_hat = evaluate_r(prob, w_hat.x, ctr)
    c_hat = evaluate_c(prob, w_hat.x, ctr) if prob.m > 0 else np.zeros(0)
    gamma_hat = max(float(np.linalg.norm(sol.dx)), gamma_floor(w.x))
    jac_hat = estimate_jacobians(prob, w_hat.x, gamma_hat, sampler, ctr, r_hat,
                                 c_hat if prob.m > 0 else None)
    return NewtonStep(w_hat, r_hat, c_hat, jac_hat, gamma_hat, rho, system)


class _Tracer:
    def __init__(self, ctr: EvalCounter):
        self.ctr = ctr
        self.rows: list[TraceRow] = []
        self.best = np.inf

    def record(self, r_x, c_x, jac, y):
        from .bench import merit_phi

        f = 0.5 * float(r_x @ r_x)
        cinf = float(np.max(np.abs(c_x))) if c_x.size else 0.0
        self.best = min(self.best, merit_phi(f, cinf))
        row = TraceRow(self.ctr.total, self.best, f, cinf, scaled_kkt(jac, y, r_x, c_x))
        if self.rows and self.rows[-1].fevals == row.fevals:
            self.rows[-1] = row
        else:
            self.rows.append(row)


def solve(prob: Problem, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Minimize ``0.5||r(x)||^2`` subject to ``c(x) = 0`` from ``prob.x0``."""
    rng = np.random.default_rng(cfg.seed)
    sampler = DirectionSampler(cfg.jacobian, rng)
    ctr = EvalCounter(limit=cfg.budget(prob.n))
    tracer = _Tracer(ctr)
    hess = HessianModel(cfg.hessian, prob.n, prob.m)
    params = cfg.inner_params()
    transitions: list[Transition] = []
    constrained = prob.m > 0

    st: Optional[_State] = None

    def finish(status: Status, message: str = "") -> SolveResult:
        if st is None:
            x = prob.x0.copy()
            return SolveResult(status, x, np.nan, np.nan, np.nan, 0, ctr.total,
                               tracer.rows, transitions, None, message)
        f = 0.5 * float(st.r_x @ st.r_x)
        cinf = float(np.max(np.abs(st.c_x))) if constrained else 0.0
        return SolveResult(status, st.w.x.copy(), f, cinf,
                           scaled_kkt(st.jac, st.w.y, st.r_x, st.c_x), st.k, ctr.total,
                           tracer.rows, transitions, st.w.y.copy(), message)

    try:
        x0 = prob.x0.copy()
        r0 = evaluate_r(prob, x0, ctr)
        c0 = evaluate_c(prob, x0, ctr) if constrained else np.zeros(0)
        jac0 = estimate_jacobians(prob, x0, cfg.gamma0, sampler, ctr, r0, c0 if constrained else None)
        w0 = Iterate(x0, r0.copy(), init_multiplier(jac0, r0))
        _, merit0 = kkt_residual(jac0, w0, r0, c0)
        st = _State(0, w0, r0, c0, jac0, cfg.gamma0, cfg.delta0, cfg.rho0, cfg.eps0, merit0)
        tracer.record(r0, c0, jac0, w0.y)
        hess.update(x0, jac0.Jc)

        while True:
            if stopping_test(st.jac, st.w.x, st.w.y, st.r_x, st.c_x, cfg.kkt_tol):
                return finish(Status.CONVERGED)
            if st.k >= cfg.K1:
                return finish(Status.MAX_ITERS)

            try:
                step = newton_step(prob, st, hess, sampler, ctr)
            except SingularNewtonSystem as exc:
                return finish(Status.FAILED_SINGULAR, str(exc))
            _, merit_hat = kkt_residual(step.jac_hat, step.w_hat, step.r_hat, step.c_hat)
            eps_k = st.eps

            if merit_hat <= cfg.theta * st.merit + eps_k:
                delta_next, eps_next = update_schedules(st.delta, eps_k, merit_hat)
                rho_next = step.rho / 10.0
                if rho_next < RHO_MIN:
                    rho_next = 0.0
                transitions.append(Transition(
                    st.k, "newton", st.merit, merit_hat, eps_k, st.gamma, step.gamma_hat,
                    float(np.linalg.norm(step.w_hat.x - st.w.x)), delta_next, rho_next))
                st = _State(st.k + 1, step.w_hat, step.r_hat, step.c_hat, step.jac_hat,
                            step.gamma_hat, delta_next, rho_next, eps_next, merit_hat)
                tracer.record(st.r_x, st.c_x, st.jac, st.w.y)
            else:
                ctx = OuterContext(st.w.x, st.w.y, st.r_x, st.c_x, st.jac, st.gamma,
                                   st.delta, eps_k, st.merit)
                res = run_inner(prob, ctx, params, sampler, ctr,
                                on_point=lambda x, r, c, jac, y: tracer.record(r, c, jac, y))
                rho_next = res.rho if res.rho is not None else st.rho
                kind = {InnerStatus.SUCCESS: "inner-success",
                        InnerStatus.MAX_ITERS: "inner-max-iters",
                        InnerStatus.FEASIBILITY_STALL: "inner-stall"}[res.status]
                transitions.append(Transition(
                    st.k, kind, st.merit, res.merit, eps_k, st.gamma, res.gamma,
                    float(np.linalg.norm(res.x - st.w.x)), res.delta, rho_next))
                st = _State(st.k + 1, Iterate(res.x, res.z, res.y), res.r_x, res.c_x, res.jac,
                            res.gamma, res.delta, rho_next, next_eps(st.delta, eps_k), res.merit)
                if res.status is InnerStatus.FEASIBILITY_STALL:
                    hess.update(st.w.x, st.jac.Jc)
                    return finish(Status.FEASIBILITY_STALL)
            last = transitions[-1]
            if last.dx_norm > last.gamma_before:
                log.debug("outer %d: step %.3e exceeds gamma %.3e, monotonicity not enforced",
                          last.k, last.dx_norm, last.gamma_before)
            hess.update(st.w.x, st.jac.Jc)
    except BudgetExhausted as exc:
        return finish(Status.BUDGET, str(exc))
    except EvaluationFailure as exc:
        return finish(Status.FAILED, str(exc))
