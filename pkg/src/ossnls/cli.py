"""Command line entry points: ``solve``, ``bench`` and ``profile``.

``solve`` exits with the integer value of :class:`ossnls.solver.Status`.
Solver tags on the ``bench`` command line are ``JACOBIAN+HESSIAN``, e.g.
``oss-v1+sr1``.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from collections import defaultdict

from .bench import RunRecord, build_profile, read_trace_csv, write_profile_csv, write_trace_csv
from .hessian import HessianMode
from .problems import get_problem, problem_names
from .smoothing import DirectionMode
from .solver import SolverConfig, solve

RUN_COLUMNS = ("problem", "solver", "seed", "status", "f", "cviol", "kkt", "fevals", "phi0", "trace")


def parse_solver_tag(tag: str) -> tuple[DirectionMode, HessianMode]:
    jac, sep, hess = tag.partition("+")
    if not sep:
        raise ValueError(f"solver tag {tag!r} is not of the form JACOBIAN+HESSIAN")
    return DirectionMode.parse(jac), HessianMode.parse(hess)


def _split(value: str) -> list:
    return [v.strip() for v in value.split(",") if v.strip()]


def _expand_problems(items) -> list:
    names = []
    for item in items:
        if item in ("constrained", "unconstrained", "degenerate", "all"):
            names.extend(problem_names(None if item == "all" else item))
        else:
            get_problem(item)  # fail early on typos
            names.append(item)
    return names


def _cmd_solve(args) -> int:
    prob = get_problem(args.problem)
    cfg = SolverConfig(jacobian=args.jacobian, hessian=args.hessian, seed=args.seed,
                       kkt_tol=args.tol, K1=args.max_iters, K2=args.inner_max_iters,
                       max_fevals=args.max_fevals)
    res = solve(prob, cfg)
    if args.out:
        write_trace_csv(args.out, res.trace)
    print(f"{prob.name}: {res.status.name} f={res.f:.10g} cviol={res.cviol:.3e} "
          f"kkt={res.kkt_res:.3e} iters={res.iters} fevals={res.fevals}")
    return int(res.status)


def _cmd_bench(args) -> int:
    problems = _expand_problems(_split(args.problems))
    tags = _split(args.solvers)
    modes = {t: parse_solver_tag(t) for t in tags}
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for name in problems:
        prob = get_problem(name)
        for tag, (jac, hess) in modes.items():
            # coordinate differences are deterministic, one seed is enough
            seeds = [0] if jac is DirectionMode.COORDINATE else range(args.seeds)
            for seed in seeds:
                cfg = SolverConfig(jacobian=jac, hessian=hess, seed=seed, kkt_tol=args.tol,
                                   max_fevals=args.max_fevals)
                res = solve(prob, cfg)
                rec = RunRecord.from_result(prob, tag, seed, res)
                trace_name = f"{name}__{tag}__s{seed}.csv"
                write_trace_csv(os.path.join(args.out_dir, trace_name), res.trace)
                rows.append([rec.problem, tag, seed, rec.status, repr(float(rec.f)),
                             repr(float(rec.cviol)), repr(float(rec.kkt)), rec.fevals,
                             repr(float(rec.phi0)), trace_name])
                if args.verbose:
                    print(f"{name} {tag} seed={seed} {rec.status} fevals={rec.fevals}")
    with open(os.path.join(args.out_dir, "runs.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        w.writerows(rows)
    print(f"wrote {len(rows)} runs to {args.out_dir}")
    if args.profile:
        table = build_profile(load_runs(args.out_dir), args.tau)
        write_profile_csv(os.path.join(args.out_dir, "profile.csv"), table)
    return 0


def load_runs(in_dir) -> dict:
    """Run records grouped by solver tag, as written by ``bench``."""
    grouped = defaultdict(list)
    with open(os.path.join(in_dir, "runs.csv"), newline="") as fh:
        for row in csv.DictReader(fh):
            grouped[row["solver"]].append(RunRecord(
                problem=row["problem"], solver=row["solver"], seed=int(row["seed"]),
                status=row["status"], trace=read_trace_csv(os.path.join(in_dir, row["trace"])),
                f=float(row["f"]), cviol=float(row["cviol"]), kkt=float(row["kkt"]),
                fevals=int(row["fevals"]), phi0=float(row["phi0"]),
            ))
    return dict(grouped)


def _cmd_profile(args) -> int:
    table = build_profile(load_runs(args.in_dir), args.tau)
    write_profile_csv(args.out, table)
    if args.svg:
        from .bench import plot_profile

        plot_profile(table, args.svg)
    for s in table.solvers:
        print(f"{s}: pi(1)={table.pi[s][0]:.3f} pi(max)={table.pi[s][-1]:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ossnls", description=__doc__.splitlines()[0])
    ap.add_argument("--log-level", default="WARNING")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one corpus problem")
    s.add_argument("--problem", required=True)
    s.add_argument("--jacobian", default="fd", choices=[m.value for m in DirectionMode])
    s.add_argument("--hessian", default="sr1", choices=[m.value for m in HessianMode])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--max-iters", type=int, default=150)
    s.add_argument("--inner-max-iters", type=int, default=50)
    s.add_argument("--max-fevals", type=int, default=None)
    s.add_argument("--out", default=None, help="trace CSV path")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="run problems x solvers x seeds")
    b.add_argument("--problems", default="constrained",
                   help="comma list of names or families (constrained, unconstrained, degenerate, all)")
    b.add_argument("--solvers", default="oss-v1+sr1,oss-v2+sr1,fd+sr1")
    b.add_argument("--seeds", type=int, default=20)
    b.add_argument("--tau", type=float, default=1e-5)
    b.add_argument("--tol", type=float, default=1e-5)
    b.add_argument("--max-fevals", type=int, default=None)
    b.add_argument("--out-dir", required=True)
    b.add_argument("--profile", action="store_true", help="also write profile.csv")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=_cmd_bench)

    p = sub.add_parser("profile", help="performance profile from a bench directory")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--tau", type=float, default=1e-5)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_profile)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper())
    try:
        return args.func(args)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64


if __name__ == "__main__":
    sys.exit(main())
