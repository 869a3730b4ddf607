"""Derivative-free solver for equality-constrained nonlinear least squares.

Minimizes ``0.5 * ||r(x)||^2`` subject to ``c(x) = 0`` using only values of
``r`` and ``c``.  Jacobians are estimated by forward differences along random
orthonormal directions (or coordinate directions), inside a regularized
augmented-Lagrangian outer loop with a Levenberg-Marquardt fallback.
"""
from .bench import RunRecord, build_profile, merit_phi
from .hessian import HessianMode, HessianModel
from .problems import (
    BudgetExhausted,
    EvalCounter,
    EvaluationFailure,
    Problem,
    corpus,
    get_problem,
    make_degenerate,
    problem_names,
)
from .smoothing import DirectionMode, DirectionSampler, estimate_jacobians, sample_orthonormal
from .solver import SolverConfig, SolveResult, Status, solve

__all__ = [
    "BudgetExhausted",
    "DirectionMode",
    "DirectionSampler",
    "EvalCounter",
    "EvaluationFailure",
    "HessianMode",
    "HessianModel",
    "Problem",
    "RunRecord",
    "SolveResult",
    "SolverConfig",
    "Status",
    "build_profile",
    "corpus",
    "estimate_jacobians",
    "get_problem",
    "make_degenerate",
    "merit_phi",
    "problem_names",
    "sample_orthonormal",
    "solve",
]

__version__ = "0.1.0"
