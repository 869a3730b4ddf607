"""Black-box problem definitions, evaluation counting and a small test corpus.

Every problem has the form::

    min 0.5 * ||r(x)||^2   subject to   c(x) = 0

where ``r`` and ``c`` are only available through function values.  The
constrained entries are least-squares members of the Hock-Schittkowski
collection; the unconstrained ones come from the More-Garbow-Hillstrom set.
Known optima are stored with the objective scaled as ``0.5 * ||r||^2`` (half
of the value printed in the original collections where the objective is a
plain sum of squares).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Problem",
    "EvalCounter",
    "EvaluationFailure",
    "BudgetExhausted",
    "CorpusEntry",
    "evaluate_r",
    "evaluate_c",
    "make_degenerate",
    "corpus",
    "get_problem",
    "problem_names",
]


class EvaluationFailure(RuntimeError):
    """A residual or constraint evaluation returned non-finite values."""


class BudgetExhausted(RuntimeError):
    """The function-evaluation budget of a run has been used up."""


@dataclass(frozen=True)
class Problem:
    name: str
    n: int
    p: int
    m: int
    x0: np.ndarray
    r_eval: Callable[[np.ndarray], np.ndarray]
    c_eval: Callable[[np.ndarray], np.ndarray]
    f_opt: Optional[float] = None
    x_opt: Optional[np.ndarray] = None

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (self.n,):
            raise ValueError(f"{self.name}: x0 has shape {x0.shape}, expected ({self.n},)")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if self.x_opt is not None:
            xo = np.asarray(self.x_opt, dtype=float)
            xo.setflags(write=False)
            object.__setattr__(self, "x_opt", xo)

    def objective(self, x) -> float:
        """0.5 * ||r(x)||^2 without touching any counter."""
        rx = np.asarray(self.r_eval(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * float(rx @ rx)


@dataclass
class EvalCounter:
    """Counts vector evaluations of ``r`` and ``c``.

    If ``limit`` is set, an evaluation that would push the combined count past
    it raises :class:`BudgetExhausted` before the function is called.
    """

    r_calls: int = 0
    c_calls: int = 0
    limit: Optional[int] = None

    @property
    def total(self) -> int:
        return self.r_calls + self.c_calls

    def _charge(self):
        if self.limit is not None and self.total >= self.limit:
            raise BudgetExhausted(f"evaluation budget of {self.limit} reached")


def _checked(values, size: int, what: str, name: str) -> np.ndarray:
    out = np.asarray(values, dtype=float).reshape(-1)
    if out.shape != (size,):
        raise ValueError(f"{name}: {what} returned {out.shape[0]} values, expected {size}")
    if not np.all(np.isfinite(out)):
        raise EvaluationFailure(f"{name}: non-finite {what} value")
    return out


def evaluate_r(prob: Problem, x, ctr: EvalCounter) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (prob.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({prob.n},)")
    ctr._charge()
    ctr.r_calls += 1
    return _checked(prob.r_eval(x), prob.p, "residual", prob.name)


def evaluate_c(prob: Problem, x, ctr: EvalCounter) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (prob.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({prob.n},)")
    ctr._charge()
    ctr.c_calls += 1
    if prob.m == 0:
        return np.zeros(0)
    return _checked(prob.c_eval(x), prob.m, "constraint", prob.name)


def make_degenerate(prob: Problem) -> Problem:
    """Append the squares of all constraints as extra constraints.

    The squared copies have zero gradient on the feasible set, so the
    constraint Jacobian of the new problem is rank deficient at every
    feasible point while the feasible set itself is unchanged.
    """
    if prob.m == 0:
        raise ValueError(f"{prob.name}: nothing to degenerate (m = 0)")
    base = prob.c_eval

    def c_hat(x):
        cx = np.asarray(base(x), dtype=float)
        return np.concatenate([cx, cx * cx])

    return Problem(
        name=f"{prob.name}-degenerate",
        n=prob.n,
        p=prob.p,
        m=2 * prob.m,
        x0=prob.x0,
        r_eval=prob.r_eval,
        c_eval=c_hat,
        f_opt=prob.f_opt,
        x_opt=prob.x_opt,
    )


def _no_constraints(x):
    return np.zeros(0)


# --- equality constrained least squares (Hock & Schittkowski numbering) ---

def _hs6():
    return Problem(
        "hs6", 2, 1, 1, [-1.2, 1.0],
        lambda x: np.array([1.0 - x[0]]),
        lambda x: np.array([10.0 * (x[1] - x[0] ** 2)]),
        f_opt=0.0, x_opt=[1.0, 1.0],
    )


def _hs27():
    # original objective 0.01(x1-1)^2 + (x2-x1^2)^2, f* = 0.04
    return Problem(
        "hs27", 3, 2, 1, [2.0, 2.0, 2.0],
        lambda x: np.array([0.1 * (x[0] - 1.0), x[1] - x[0] ** 2]),
        lambda x: np.array([x[0] + x[2] ** 2 + 1.0]),
        f_opt=0.02, x_opt=[-1.0, 1.0, 0.0],
    )


def _hs28():
    return Problem(
        "hs28", 3, 2, 1, [-4.0, 1.0, 1.0],
        lambda x: np.array([x[0] + x[1], x[1] + x[2]]),
        lambda x: np.array([x[0] + 2.0 * x[1] + 3.0 * x[2] - 1.0]),
        f_opt=0.0, x_opt=[0.5, -0.5, 0.5],
    )


def _hs42():
    # original f* = 28 - 10*sqrt(2)
    s2 = np.sqrt(2.0)
    return Problem(
        "hs42", 4, 4, 2, [1.0, 1.0, 1.0, 1.0],
        lambda x: x - np.array([1.0, 2.0, 3.0, 4.0]),
        lambda x: np.array([x[0] - 2.0, x[2] ** 2 + x[3] ** 2 - 2.0]),
        f_opt=14.0 - 5.0 * s2, x_opt=[2.0, 2.0, 0.6 * s2, 0.8 * s2],
    )


def _hs48():
    return Problem(
        "hs48", 5, 3, 2, [3.0, 5.0, -3.0, 2.0, -2.0],
        lambda x: np.array([x[0] - 1.0, x[1] - x[2], x[3] - x[4]]),
        lambda x: np.array([x.sum() - 5.0, x[2] - 2.0 * (x[3] + x[4]) + 3.0]),
        f_opt=0.0, x_opt=np.ones(5),
    )


def _hs51():
    return Problem(
        "hs51", 5, 4, 3, [2.5, 0.5, 2.0, -1.0, 0.5],
        lambda x: np.array([x[0] - x[1], x[1] + x[2] - 2.0, x[3] - 1.0, x[4] - 1.0]),
        lambda x: np.array([x[0] + 3.0 * x[1] - 4.0, x[2] + x[3] - 2.0 * x[4], x[1] - x[4]]),
        f_opt=0.0, x_opt=np.ones(5),
    )


def _hs52():
    # original f* = 1859/349, x* = (-33, 11, 180, -158, 11)/349
    return Problem(
        "hs52", 5, 4, 3, [2.0, 2.0, 2.0, 2.0, 2.0],
        lambda x: np.array([4.0 * x[0] - x[1], x[1] + x[2] - 2.0, x[3] - 1.0, x[4] - 1.0]),
        lambda x: np.array([x[0] + 3.0 * x[1], x[2] + x[3] - 2.0 * x[4], x[1] - x[4]]),
        f_opt=1859.0 / 698.0, x_opt=np.array([-33.0, 11.0, 180.0, -158.0, 11.0]) / 349.0,
    )


# --- unconstrained least squares (More, Garbow & Hillstrom) ---

def _rosenbrock():
    return Problem(
        "rosenbrock", 2, 2, 0, [-1.2, 1.0],
        lambda x: np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]]),
        _no_constraints, f_opt=0.0, x_opt=[1.0, 1.0],
    )


def _rosenbrock4():
    def r(x):
        out = np.empty(4)
        out[0::2] = 10.0 * (x[1::2] - x[0::2] ** 2)
        out[1::2] = 1.0 - x[0::2]
        return out

    return Problem(
        "rosenbrock4", 4, 4, 0, [-1.2, 1.0, -1.2, 1.0], r,
        _no_constraints, f_opt=0.0, x_opt=np.ones(4),
    )


def _powell_singular():
    s5, s10 = np.sqrt(5.0), np.sqrt(10.0)
    return Problem(
        "powell-singular", 4, 4, 0, [3.0, -1.0, 0.0, 1.0],
        lambda x: np.array([
            x[0] + 10.0 * x[1],
            s5 * (x[2] - x[3]),
            (x[1] - 2.0 * x[2]) ** 2,
            s10 * (x[0] - x[3]) ** 2,
        ]),
        _no_constraints, f_opt=0.0, x_opt=np.zeros(4),
    )


def _beale():
    y = np.array([1.5, 2.25, 2.625])
    i = np.arange(1, 4)
    return Problem(
        "beale", 2, 3, 0, [1.0, 1.0],
        lambda x: y - x[0] * (1.0 - x[1] ** i),
        _no_constraints, f_opt=0.0, x_opt=[3.0, 0.5],
    )


def _helical_valley():
    def r(x):
        theta = np.arctan(x[1] / x[0]) / (2.0 * np.pi) if x[0] != 0.0 else 0.25 * np.sign(x[1])
        if x[0] < 0.0:
            theta += 0.5
        return np.array([
            10.0 * (x[2] - 10.0 * theta),
            10.0 * (np.hypot(x[0], x[1]) - 1.0),
            x[2],
        ])

    return Problem(
        "helical-valley", 3, 3, 0, [-1.0, 0.0, 0.0], r,
        _no_constraints, f_opt=0.0, x_opt=[1.0, 0.0, 0.0],
    )


_CONSTRAINED = (_hs6, _hs27, _hs28, _hs42, _hs48, _hs51, _hs52)
_UNCONSTRAINED = (_rosenbrock, _rosenbrock4, _powell_singular, _beale, _helical_valley)


@dataclass(frozen=True)
class CorpusEntry:
    problem: Problem
    family: str  # "constrained" | "unconstrained" | "degenerate"


def corpus() -> list[CorpusEntry]:
    """All shipped problems, constrained first, then their degenerate variants."""
    cons = [f() for f in _CONSTRAINED]
    out = [CorpusEntry(p, "constrained") for p in cons]
    out += [CorpusEntry(make_degenerate(p), "degenerate") for p in cons]
    out += [CorpusEntry(f(), "unconstrained") for f in _UNCONSTRAINED]
    return out


def problem_names(family: Optional[str] = None) -> list[str]:
    return [e.problem.name for e in corpus() if family is None or e.family == family]


def get_problem(name: str) -> Problem:
    """Look up a corpus problem by name, e.g. ``hs6`` or ``hs6-degenerate``."""
    for entry in corpus():
        if entry.problem.name == name:
            return entry.problem
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")
