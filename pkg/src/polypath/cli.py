"""Command-line interface: solve systems, compare controllers, compare
predictors.

Three subcommands:

  solve       track every total-degree start path and report solutions
  benchmark   compare the adaptive controller against the classical
              halving/doubling one on identical paths
  predictors  per-predictor step counts and Euler-normalized runtimes

Reports are JSON, tables are CSV; complex numbers serialize as
[re, im] pairs.  Exit codes: 0 success, 2 usage or parse error,
3 numerical failure (some path failed and --allow-failures is absent).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .algebra import (ParseError, format_system, generate_benchmark,
                      parse_system)
from .corrector import CRITERIA, CorrectorOptions
from .predictor import METHODS
from .tracker import (BenchmarkRow, TrackerOptions, benchmark, measure_steps,
                      solve)

PATCH_CHOICES = ("orthogonal", "fixed", "fixed_random")


class CLIError(Exception):
    """Usage-level problem; maps to exit code 2."""


def _patch_kind(name: str) -> str:
    return "fixed_random" if name == "fixed" else name


def _add_system_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", metavar="FILE",
                   help="system file (vars: line, one polynomial per line)")
    p.add_argument("--family", choices=("cyclic", "katsura"),
                   help="generate a built-in benchmark family instead")
    p.add_argument("--n", type=int, help="family size parameter")


def _add_tracking_flags(p: argparse.ArgumentParser, t_end_default: float) -> None:
    p.add_argument("--predictor", default="heun",
                   help="one of euler, heun, rk4, pade21")
    p.add_argument("--tau", type=float, default=1e-7,
                   help="corrector accuracy tolerance (default 1e-7)")
    p.add_argument("--max-corrector-iters", type=int, default=3,
                   help="total corrector iterations per step, counting the "
                        "reused-factorization one (default 3, i.e. 2 full "
                        "Newton steps)")
    p.add_argument("--criterion", choices=CRITERIA,
                   default="simplified_a_priori")
    p.add_argument("--patch", choices=PATCH_CHOICES, default="orthogonal")
    p.add_argument("--t-end", type=float, default=t_end_default,
                   help=f"where tracking stops (default {t_end_default})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", metavar="FILE", help="write the report here "
                   "instead of stdout")
    p.add_argument("--allow-failures", action="store_true",
                   help="exit 0 even when some paths fail")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polypath",
        description="Polynomial system solving by homotopy continuation "
                    "with adaptive step-size control.")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="find all isolated roots")
    _add_system_flags(ps)
    _add_tracking_flags(ps, t_end_default=0.0)
    ps.add_argument("--controller", choices=("adaptive", "simple"),
                    default="adaptive")
    ps.set_defaults(func=cmd_solve)

    pb = sub.add_parser("benchmark",
                        help="compare step-size controllers on shared paths")
    _add_system_flags(pb)
    _add_tracking_flags(pb, t_end_default=0.1)
    pb.add_argument("--controller", choices=("old", "new", "both"),
                    default="both",
                    help="old = classical halving/doubling, new = adaptive")
    pb.add_argument("--runs", type=int, default=1,
                    help="number of gamma draws to average over")
    pb.set_defaults(func=cmd_benchmark)

    pp = sub.add_parser("predictors",
                        help="compare predictor methods on shared paths")
    _add_system_flags(pp)
    _add_tracking_flags(pp, t_end_default=0.1)
    pp.add_argument("--controller", choices=("adaptive", "simple"),
                    default="adaptive")
    pp.add_argument("--runs", type=int, default=1)
    pp.set_defaults(func=cmd_predictors)
    return p


def _load_system(args):
    if args.input and args.family:
        raise CLIError("give either --input or --family, not both")
    if args.input:
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise CLIError(f"cannot read {args.input}: {exc}") from exc
        return parse_system(text)
    if args.family:
        if args.n is None:
            raise CLIError("--family needs --n")
        try:
            return generate_benchmark(args.family, args.n)
        except ValueError as exc:
            raise CLIError(str(exc)) from exc
    raise CLIError("no system given: use --input FILE or --family NAME --n K")


def _tracker_options(args, controller: str, predictor=None) -> TrackerOptions:
    predictor = predictor or args.predictor
    if predictor not in METHODS:
        raise CLIError(f"unknown predictor {predictor!r}; choose from "
                       f"{', '.join(sorted(METHODS))}")
    total = args.max_corrector_iters
    if total < 2:
        raise CLIError("--max-corrector-iters counts every corrector "
                       "iteration including the reused-factorization one "
                       "and must be at least 2")
    if not 0.0 <= args.t_end < 1.0:
        raise CLIError("--t-end must lie in [0, 1)")
    corrector = CorrectorOptions(tau=args.tau, max_newton_iters=total - 1,
                                 criterion=args.criterion)
    try:
        return TrackerOptions(predictor=predictor, controller=controller,
                              corrector=corrector,
                              patch=_patch_kind(args.patch),
                              t_end=args.t_end)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc


def _options_json(opts: TrackerOptions) -> dict:
    return {
        "predictor": opts.predictor.kind,
        "predictor_order": opts.predictor.order,
        "controller": opts.controller,
        "tau": opts.corrector.tau,
        "max_corrector_iters": opts.corrector.max_newton_iters + 1,
        "criterion": opts.corrector.criterion,
        "patch": opts.patch,
        "t_start": opts.t_start,
        "t_end": opts.t_end,
        "dt_init": opts.dt_init,
        "dt_min": opts.dt_min,
        "dt_max": opts.dt_max,
    }


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _vector(v) -> list:
    return [_pair(z) for z in v]


def _solve_payload(system, opts, report, wall: float) -> dict:
    return {
        "command": "solve",
        "system": {
            "variables": list(system.variables),
            "polynomials": format_system(system).splitlines()[1:],
        },
        "seed": report.seed,
        "gamma": _pair(report.gamma),
        "options": _options_json(opts),
        "wall_seconds": wall,
        "paths": [
            {
                "status": pr.status,
                "t_reached": pr.t_reached,
                "accepted": pr.stats.accepted,
                "rejected": pr.stats.rejected,
                "newton_iters": pr.stats.newton_iters_total,
                "tangent_solves": pr.stats.tangent_solves,
                "endpoint": _vector(pr.endpoint),
            }
            for pr in report.paths
        ],
        "aggregates": {
            "n_paths": report.n_paths,
            "mean_accepted": report.averages["accepted"],
            "mean_rejected": report.averages["rejected"],
            "mean_total": report.averages["total"],
            "mean_newton_iters": report.averages["newton_iters"],
            "mean_tangent_solves": report.averages["tangent_solves"],
            "failures": report.failures,
            "at_infinity": report.at_infinity,
            "distinct_solutions": len(report.solutions),
        },
        "solutions": [
            {
                "point": _vector(s.point),
                "residual": s.residual,
                "multiplicity": s.multiplicity,
                "path_index": s.path_index,
            }
            for s in report.solutions
        ],
    }


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _exit_code(failures: int, allow: bool) -> int:
    return 0 if failures == 0 or allow else 3


def cmd_solve(args) -> int:
    system = _load_system(args)
    opts = _tracker_options(args, args.controller)
    t0 = time.perf_counter()
    report = solve(system, opts, rng_seed=args.seed, threads=args.threads)
    wall = time.perf_counter() - t0
    payload = _solve_payload(system, opts, report, wall)
    _emit(json.dumps(payload, indent=2), args.out)
    print(f"{len(report.solutions)} distinct solutions from {report.n_paths} "
          f"paths ({report.at_infinity} at infinity, {report.failures} "
          f"failed) in {wall:.2f}s", file=sys.stderr)
    return _exit_code(report.failures, args.allow_failures)


def cmd_benchmark(args) -> int:
    if args.runs < 1:
        raise CLIError("--runs must be at least 1")
    system = _load_system(args)
    label_to_controller = {"old": "simple", "new": "adaptive"}
    if args.controller == "both":
        result = benchmark(system, _tracker_options(args, "simple"),
                           _tracker_options(args, "adaptive"),
                           runs=args.runs, rng_seed=args.seed,
                           threads=args.threads)
        rows = result.rows
        failures = sum(r.failures for r in rows)
    else:
        opts = _tracker_options(args, label_to_controller[args.controller])
        avg = measure_steps(system, opts, args.runs, rng_seed=args.seed,
                            threads=args.threads)
        rows = [BenchmarkRow(args.controller, avg.accepted, avg.rejected,
                             avg.total, 1.0, avg.failures)]
        failures = avg.failures
    text = _csv(
        ["controller", "accepted", "rejected", "total", "ratio", "failures"],
        [[r.label, f"{r.accepted:.4f}", f"{r.rejected:.4f}",
          f"{r.total:.4f}", f"{r.ratio:.4f}", r.failures] for r in rows])
    _emit(text, args.out)
    return _exit_code(failures, args.allow_failures)


def cmd_predictors(args) -> int:
    if args.runs < 1:
        raise CLIError("--runs must be at least 1")
    names = [n.strip() for n in args.predictor.split(",") if n.strip()]
    if not names:
        raise CLIError("give at least one predictor name")
    unknown = [n for n in names if n not in METHODS]
    if unknown:
        raise CLIError(f"unknown predictor {unknown[0]!r}; choose from "
                       f"{', '.join(sorted(METHODS))}")
    system = _load_system(args)
    measured = []
    failures = 0
    for name in names:
        opts = _tracker_options(args, args.controller, predictor=name)
        t0 = time.perf_counter()
        avg = measure_steps(system, opts, args.runs, rng_seed=args.seed,
                            threads=args.threads)
        wall = time.perf_counter() - t0
        measured.append((name, wall, avg))
        failures += avg.failures
    base = next((w for n, w, _ in measured if n == "euler"), measured[0][1])
    text = _csv(
        ["predictor", "normalized_runtime", "steps", "accepted", "rejected",
         "tangent_solves", "failures"],
        [[name, f"{wall / base:.4f}", f"{avg.total:.4f}",
          f"{avg.accepted:.4f}", f"{avg.rejected:.4f}",
          f"{avg.tangent_solves:.4f}", avg.failures]
         for name, wall, avg in measured])
    _emit(text, args.out)
    return _exit_code(failures, args.allow_failures)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
