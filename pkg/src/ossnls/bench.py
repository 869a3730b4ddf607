"""Benchmark runs and Dolan-More performance profiles.

Runs are reduced to a single number per (problem, solver): the fewest
function evaluations after which the best merit value seen satisfies::

    (phi - phi*) / (phi(x0) - phi*) <= tau

where ``phi`` penalizes infeasibility and ``phi*`` is the best final merit any
solver reached on that problem.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "FEAS_TOL",
    "PENALTY",
    "RunRecord",
    "ProfileTable",
    "merit_phi",
    "phi_at",
    "convergence_feval",
    "performance_ratios",
    "profile_curve",
    "profile_from_times",
    "median_run",
    "build_profile",
    "write_trace_csv",
    "read_trace_csv",
    "write_profile_csv",
    "TRACE_COLUMNS",
]

FEAS_TOL = 1e-6
PENALTY = 1e4
TRACE_COLUMNS = ("fevals", "merit_phi", "f", "cviol_inf", "kkt_scaled")


def merit_phi(f: float, cviol_inf: float) -> float:
    """``f`` if the point is feasible to 1e-6 (inclusive), else ``f + 1e4 * cviol``."""
    if cviol_inf < 0.0:
        raise ValueError("constraint violation must be nonnegative")
    if cviol_inf <= FEAS_TOL:
        return f
    return f + PENALTY * cviol_inf


def phi_at(prob, x) -> float:
    """Merit of ``x`` computed directly from the problem (no counting)."""
    x = np.asarray(x, dtype=float)
    f = prob.objective(x)
    if prob.m == 0:
        return merit_phi(f, 0.0)
    c = np.asarray(prob.c_eval(x), dtype=float)
    return merit_phi(f, float(np.max(np.abs(c))))


@dataclass
class RunRecord:
    problem: str
    solver: str
    seed: int
    status: str
    trace: list  # (fevals, best merit so far)
    f: float = math.nan
    cviol: float = math.nan
    kkt: float = math.nan
    fevals: int = 0
    phi0: float = math.nan

    @property
    def final_merit(self) -> float:
        return self.trace[-1][1] if self.trace else math.inf

    @classmethod
    def from_result(cls, problem, solver: str, seed: int, result) -> "RunRecord":
        return cls(
            problem=problem.name,
            solver=solver,
            seed=seed,
            status=result.status.name,
            trace=[(row.fevals, row.merit_phi) for row in result.trace],
            f=float(result.f),
            cviol=float(result.cviol),
            kkt=float(result.kkt_res),
            fevals=int(result.fevals),
            phi0=float(phi_at(problem, problem.x0)),
        )


def convergence_feval(record: RunRecord, phi0: float, phi_star: float, tau: float) -> float:
    """First evaluation count at which the run passes the convergence test."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    if phi0 <= phi_star:
        return 0
    threshold = phi_star + tau * (phi0 - phi_star)
    for fevals, phi in record.trace:
        if phi <= threshold:
            return fevals
    return math.inf


def performance_ratios(t) -> np.ndarray:
    """``t[p, s] / min_s t[p, s]``; rows with no finite entry stay infinite.

    A zero best time (solved at the start point) is treated as one evaluation
    so that ratios stay defined.
    """
    t = np.asarray(t, dtype=float)
    out = np.full_like(t, np.inf)
    for i, row in enumerate(t):
        finite = np.isfinite(row)
        if not finite.any():
            continue
        best = max(row[finite].min(), 1.0)
        out[i, finite] = np.maximum(row[finite], 1.0) / best
    return out


def profile_curve(ratios_s: Sequence[float], alphas: Iterable[float]) -> np.ndarray:
    """Fraction of problems with ratio at most ``alpha``, for each alpha."""
    r = np.asarray(ratios_s, dtype=float)
    return np.array([np.count_nonzero(r <= a) / r.size for a in alphas])


@dataclass
class ProfileTable:
    problems: list
    solvers: list
    t: np.ndarray
    ratios: np.ndarray
    alphas: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    pi: dict = field(default_factory=dict)

    def rows(self):
        for s_idx, s in enumerate(self.solvers):
            for a, v in zip(self.alphas, self.pi[s]):
                yield a, s, v


def _alpha_grid(ratios: np.ndarray, points: int = 64) -> np.ndarray:
    finite = ratios[np.isfinite(ratios)]
    top = math.log2(finite.max()) if finite.size else 0.0
    top = max(top, 1.0) * 1.05
    grid = 2.0 ** np.linspace(0.0, top, points)
    return np.unique(np.concatenate([grid, finite]))


def profile_from_times(t, problems, solvers, alphas=None) -> ProfileTable:
    t = np.asarray(t, dtype=float)
    ratios = performance_ratios(t)
    alphas = _alpha_grid(ratios) if alphas is None else np.asarray(alphas, dtype=float)
    pi = {s: profile_curve(ratios[:, j], alphas) for j, s in enumerate(solvers)}
    return ProfileTable(list(problems), list(solvers), t, ratios, alphas, pi)


def median_run(records: Sequence[RunRecord]) -> RunRecord:
    """Lower-median run by final merit."""
    ordered = sorted(records, key=lambda r: (r.final_merit, r.seed))
    return ordered[(len(ordered) - 1) // 2]


def build_profile(records: Mapping[str, Sequence[RunRecord]], tau: float,
                  phi0: Optional[Mapping[str, float]] = None, alphas=None) -> ProfileTable:
    """Performance profile from runs grouped by solver tag.

    Multiple seeds of one (problem, solver) collapse to their median run.
    ``phi0`` maps problem name to the start-point merit; by default it is taken
    from the records themselves.
    """
    if not records or not any(records.values()):
        raise ValueError("no run records")
    solvers = list(records)
    problems = sorted({r.problem for rs in records.values() for r in rs})
    reps: dict = {}
    for s, rs in records.items():
        for p in problems:
            runs = [r for r in rs if r.problem == p]
            if runs:
                reps[p, s] = median_run(runs)

    t = np.full((len(problems), len(solvers)), np.inf)
    for i, p in enumerate(problems):
        chosen = [reps[p, s] for s in solvers if (p, s) in reps]
        phi_star = min(r.final_merit for r in chosen)
        start = phi0[p] if phi0 is not None else chosen[0].phi0
        for j, s in enumerate(solvers):
            if (p, s) in reps:
                t[i, j] = convergence_feval(reps[p, s], start, phi_star, tau)
    return profile_from_times(t, problems, solvers, alphas)


def _fmt(v) -> str:
    return repr(float(v)) if not isinstance(v, (int, np.integer)) else str(int(v))


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in trace:
            w.writerow([_fmt(getattr(row, c)) for c in TRACE_COLUMNS])


def read_trace_csv(path) -> list:
    with open(path, newline="") as fh:
        return [(int(r["fevals"]), float(r["merit_phi"])) for r in csv.DictReader(fh)]


def write_profile_csv(path, table: ProfileTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "solver", "pi"])
        for a, s, v in table.rows():
            w.writerow([repr(float(a)), s, repr(float(v))])


def plot_profile(table: ProfileTable, path) -> None:
    """Step plot of the profile with a log2 alpha axis (needs matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for s in table.solvers:
        ax.step(table.alphas, table.pi[s], where="post", label=s)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("alpha")
    ax.set_ylabel("fraction of problems")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(os.fspath(path))
    plt.close(fig)
