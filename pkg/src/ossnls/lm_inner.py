"""Derivative-free Levenberg-Marquardt loop on the augmented Lagrangian.

With the outer multiplier ``y_k`` frozen, the augmented Lagrangian
``0.5||r||^2 - y_k^T c + 0.5/delta ||c||^2`` equals, up to a constant,
``0.5 ||Phi(x; delta)||^2`` with::

    Phi(x; delta) = [ r(x) ; delta^{-1/2} (c(x) - delta y_k) ]

The loop runs damped Gauss-Newton steps on ``Phi`` using the estimated
Jacobians, adapts the damping, the smoothing step and the penalty ``delta``,
and stops once the approximate KKT merit has decreased enough relative to the
outer iterate it started from.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import solve_lm_step
from .problems import EvalCounter, Problem, evaluate_c, evaluate_r
from .smoothing import DirectionSampler, JacobianPair, estimate_jacobians

__all__ = [
    "InnerStatus",
    "InnerParams",
    "OuterContext",
    "InnerResult",
    "AugLsModel",
    "aug_ls_model",
    "lm_ratio",
    "update_lambda",
    "update_gamma",
    "delta_decrease_test",
    "merit_star",
    "gamma_floor",
    "run_inner",
    "STALL_GRAD_TOL",
    "STALL_FEAS_TOL",
]

STALL_GRAD_TOL = 1e-6
STALL_FEAS_TOL = 1e-5


class InnerStatus(enum.Enum):
    SUCCESS = "success"
    MAX_ITERS = "max_iters"
    FEASIBILITY_STALL = "feasibility_stall"


def gamma_floor(x) -> float:
    return 1e-12 * (1.0 + float(np.linalg.norm(x)))


def merit_star(Jr, Jc, z, y, r_x, c_x) -> float:
    """||Jr^T z - Jc^T y|| + ||z - r(x)|| + ||c(x)||."""
    return (
        float(np.linalg.norm(Jr.T @ z - Jc.T @ y))
        + float(np.linalg.norm(z - r_x))
        + float(np.linalg.norm(c_x))
    )


@dataclass
class AugLsModel:
    Phi: np.ndarray
    J: np.ndarray
    grad_phi: np.ndarray


def aug_ls_model(jac: JacobianPair, r_x, c_x, y_k, delta: float) -> AugLsModel:
    s = 1.0 / np.sqrt(delta)
    Phi = np.concatenate([r_x, s * (c_x - delta * y_k)])
    J = np.vstack([jac.Jr, s * jac.Jc])
    grad = jac.Jr.T @ r_x - jac.Jc.T @ y_k + (jac.Jc.T @ c_x) / delta
    return AugLsModel(Phi, J, grad)


def lm_ratio(Phi_new, model: AugLsModel, d) -> float:
    """Actual over predicted reduction of ``||Phi||^2``.

    ``-inf`` signals a null step (nonpositive predicted reduction).
    """
    phi2 = model.Phi @ model.Phi
    lin = model.Phi + model.J @ d
    pred = phi2 - lin @ lin
    if not pred > 0.0:
        return -np.inf
    return float((phi2 - Phi_new @ Phi_new) / pred)


def update_lambda(lam, zeta, g_norm, p0=0.001, p1=0.25, p2=0.75, lambda_min=1e-8):
    if zeta < p0:
        return 4.0 * lam
    if g_norm < p1 / lam:
        return 4.0 * lam
    if g_norm < p2 / lam:
        return lam
    return max(0.25 * lam, lambda_min)


def update_gamma(gamma, d_norm, delta_changed, Jc_c_norm, p3=1e-10, p4=1e12, gamma_outer=np.inf):
    if not delta_changed:
        return min(0.5 * gamma, d_norm)
    if Jc_c_norm < p3 * gamma:
        return 0.5 * gamma
    if Jc_c_norm < p4 * gamma:
        return gamma
    return min(2.0 * gamma, gamma_outer)


def delta_decrease_test(jac_next: JacobianPair, r_next, c_next, y_k, delta,
                        lag_grad_k: float, c_norm_k: float, theta: float, eps: float) -> bool:
    """True when the penalty should shrink: the Lagrangian gradient at the
    shifted multiplier is small enough but the violation is not."""
    y_shift = y_k - c_next / delta
    g = jac_next.Jr.T @ r_next - jac_next.Jc.T @ y_shift
    return (
        float(np.linalg.norm(g)) <= theta * lag_grad_k + 0.5 * eps
        and float(np.linalg.norm(c_next)) > theta * c_norm_k + 0.5 * eps
    )


@dataclass
class InnerParams:
    theta: float = 0.99
    p0: float = 0.001
    p1: float = 0.25
    p2: float = 0.75
    p3: float = 1e-10
    p4: float = 1e12
    lambda_min: float = 1e-8
    lambda0: float = 1.0
    max_iters: int = 50
    delta_min: float = 1e-6


@dataclass
class OuterContext:
    """What the LM loop needs from the outer iterate ``w_k``."""

    x: np.ndarray
    y: np.ndarray
    r_x: np.ndarray
    c_x: np.ndarray
    jac: JacobianPair
    gamma: float
    delta: float
    eps: float
    merit: float


@dataclass
class InnerResult:
    status: InnerStatus
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    r_x: np.ndarray
    c_x: np.ndarray
    jac: JacobianPair
    gamma: float
    delta: float
    rho: Optional[float]
    merit: float
    iters: int
    history: dict = field(default_factory=dict)


def run_inner(
    prob: Problem,
    ctx: OuterContext,
    params: InnerParams,
    sampler: DirectionSampler,
    ctr: EvalCounter,
    on_point: Optional[Callable] = None,
) -> InnerResult:
    """Run the LM loop from the outer iterate until the merit test passes.

    ``on_point(x, r_x, c_x, jac, y)`` is called whenever the current point
    changes, for tracing.  Budget and evaluation exceptions propagate.
    """
    x, r_x, c_x, jac = ctx.x.copy(), ctx.r_x, ctx.c_x, ctx.jac
    y_k = ctx.y
    lam = max(params.lambda0, params.lambda_min)
    gamma = ctx.gamma
    delta = delta_prev = ctx.delta
    target = params.theta * ctx.merit + ctx.eps
    lag_grad_k = float(np.linalg.norm(ctx.jac.Jr.T @ ctx.r_x - ctx.jac.Jc.T @ y_k))
    c_norm_k = float(np.linalg.norm(ctx.c_x))
    constrained = prob.m > 0

    hist = {"lambda": [], "gamma": [], "delta": [], "d_norm": [], "zeta": [], "accepted": [],
            "phi2": [], "phi2_new": [], "pred": []}
    y = y_k - c_x / delta
    merit = merit_star(jac.Jr, jac.Jc, r_x, y, r_x, c_x)

    for j in range(params.max_iters):
        model = aug_ls_model(jac, r_x, c_x, y_k, delta)
        g_norm = float(np.linalg.norm(model.grad_phi))
        if g_norm == 0.0:
            d = np.zeros(prob.n)
        else:
            d = solve_lm_step(model.J, model.Phi, lam * g_norm)
        d_norm = float(np.linalg.norm(d))

        lin = model.Phi + model.J @ d
        pred = float(model.Phi @ model.Phi - lin @ lin)
        if pred > 0.0:
            x_try = x + d
            r_try = evaluate_r(prob, x_try, ctr)
            c_try = evaluate_c(prob, x_try, ctr) if constrained else np.zeros(0)
            s = 1.0 / np.sqrt(delta)
            Phi_try = np.concatenate([r_try, s * (c_try - delta * y_k)])
            zeta = lm_ratio(Phi_try, model, d)
        else:
            zeta = -np.inf
        accepted = zeta >= params.p0

        hist["lambda"].append(lam)
        hist["gamma"].append(gamma)
        hist["delta"].append(delta)
        hist["d_norm"].append(d_norm)
        hist["zeta"].append(zeta)
        hist["accepted"].append(accepted)
        hist["phi2"].append(float(model.Phi @ model.Phi))
        hist["phi2_new"].append(float(Phi_try @ Phi_try) if pred > 0.0 else np.nan)
        hist["pred"].append(pred)

        lam_next = update_lambda(lam, zeta, g_norm, params.p0, params.p1, params.p2, params.lambda_min)
        Jc_c_norm = float(np.linalg.norm(jac.Jc.T @ c_x))
        gamma_next = update_gamma(gamma, d_norm, delta != delta_prev, Jc_c_norm,
                                  params.p3, params.p4, ctx.gamma)
        gamma_next = max(gamma_next, gamma_floor(x))
        if accepted:
            x, r_x, c_x = x_try, r_try, c_try
        lam, gamma = lam_next, gamma_next

        jac = estimate_jacobians(prob, x, gamma, sampler, ctr, r_x, c_x if constrained else None)

        delta_prev = delta
        if constrained and delta_decrease_test(jac, r_x, c_x, y_k, delta, lag_grad_k, c_norm_k,
                                               params.theta, ctx.eps):
            delta = max(0.1 * delta, params.delta_min)

        y = y_k - c_x / delta
        z = r_x
        merit = merit_star(jac.Jr, jac.Jc, z, y, r_x, c_x)
        if on_point is not None:
            on_point(x, r_x, c_x, jac, y)

        if merit <= target:
            g_new = aug_ls_model(jac, r_x, c_x, y_k, delta).grad_phi
            rho = lam * float(np.linalg.norm(g_new))
            return InnerResult(InnerStatus.SUCCESS, x, z.copy(), y, r_x, c_x, jac, gamma,
                               delta, rho, merit, j + 1, hist)
        if (constrained and np.max(np.abs(c_x)) > STALL_FEAS_TOL
                and float(np.linalg.norm(jac.Jc.T @ c_x)) <= STALL_GRAD_TOL):
            return InnerResult(InnerStatus.FEASIBILITY_STALL, x, z.copy(), y, r_x, c_x, jac,
                               gamma, delta, None, merit, j + 1, hist)

    return InnerResult(InnerStatus.MAX_ITERS, x, r_x.copy(), y, r_x, c_x, jac, gamma, delta,
                       None, merit, params.max_iters, hist)
