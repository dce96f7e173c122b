"""Command-line front end.

Subcommands: ``solve``, ``sim``, ``solve-azb``, ``verify`` and ``bench``.
A report goes to stdout (JSON by default). The exit code identifies the
outcome:

====  ==========================================
0     success
1     usage error or any other unexpected error
2     infeasible constraint
3     zero dictionary (or zero data for ``sim``)
4     dimension mismatch
5     parse or I/O error
6     verification failure (``verify`` only)
====  ==========================================
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .closed_form import (
    shape_interaction_matrix,
    solve_azb,
    solve_lrr,
    solve_lrr_full_row_rank,
)
from .errors import IoError, NucminError
from .linalg import DEFAULT_TOLERANCES, Tolerances, frobenius, numerical_rank
from .matrix_io import FORMATS, read_matrix, render_report, write_matrix
from .oracle import AdmmParams, admm_solve_lrr
from .sampling import random_lrr_instance
from .verify import verify_lrr

BENCH_COLUMNS = (
    "m", "n", "k", "rank", "seed",
    "t_closed_form", "t_admm", "iterations", "converged", "distance",
)


class UsageError(NucminError):
    exit_code = 1
    code = "usage_error"


@dataclass
class RunConfig:
    command: str
    X: str = None
    A: str = None
    B: str = None
    out: str = None
    format: str = None
    report: str = "json"
    tol: Tolerances = DEFAULT_TOLERANCES
    admm: AdmmParams = field(default_factory=AdmmParams)
    seed: int = 0
    force_theorem1: bool = False
    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    n_seeds: int = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which would collide with Infeasible
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    text = text.strip()
    if not text:
        return []
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return values


def build_parser():
    parser = _Parser(prog="nucmin", description="Closed-form nuclear norm minimization.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default="json")
    common.add_argument("--rank-tol", type=float, default=DEFAULT_TOLERANCES.rank_tol_factor,
                        help="relative singular value cutoff factor (default: machine epsilon)")
    common.add_argument("--feas-tol", type=float, default=DEFAULT_TOLERANCES.feas_tol)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iter", type=int, default=AdmmParams.max_iter)
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="matrix file format (default: detected from the X file)")
    common.add_argument("--out", default=None)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", parents=[common], help="solve min ||Z||_* s.t. X = AZ")
    p.add_argument("--X", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--force-theorem1", action="store_true",
                   help="use the general route even when A has full row rank")

    p = sub.add_parser("sim", parents=[common], help="shape interaction matrix of X")
    p.add_argument("--X", required=True)

    p = sub.add_parser("solve-azb", parents=[common], help="solve min ||Z||_* s.t. X = AZB")
    p.add_argument("--X", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)

    p = sub.add_parser("verify", parents=[common], help="cross-check the closed form on one instance")
    p.add_argument("--X", required=True)
    p.add_argument("--A", required=True)

    p = sub.add_parser("bench", parents=[common], help="time closed form against ADMM")
    p.add_argument("--rows", type=_int_list, default=[20, 50], help="comma-separated values of m")
    p.add_argument("--cols", type=_int_list, default=[20, 50], help="comma-separated values of n")
    p.add_argument("--n-seeds", type=int, default=3)
    return parser


def parse_config(argv):
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances(rank_tol_factor=args.rank_tol, feas_tol=args.feas_tol)
        admm = AdmmParams(max_iter=args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = RunConfig(
        command=args.command,
        X=getattr(args, "X", None),
        A=getattr(args, "A", None),
        B=getattr(args, "B", None),
        out=args.out,
        format=args.format,
        report=args.report,
        tol=tol,
        admm=admm,
        seed=args.seed,
        force_theorem1=getattr(args, "force_theorem1", False),
    )
    if args.command == "bench":
        if args.out is None:
            raise UsageError("bench needs --out for the CSV file")
        if args.n_seeds < 0:
            raise UsageError("--n-seeds must be nonnegative")
        config.rows, config.cols, config.n_seeds = args.rows, args.cols, args.n_seeds
    return config


def _solution_fields(sol):
    return {
        "objective": sol.objective,
        "feasibility_residual": sol.feasibility_residual,
        "method_tag": sol.method_tag.value,
    }


def _load(config, *names):
    mats, fmt = [], config.format
    for name in names:
        M, detected = read_matrix(getattr(config, name), config.format)
        fmt = fmt or detected
        mats.append(M)
    return mats, fmt


def _write(config, Z, fmt):
    if config.out is not None:
        write_matrix(config.out, Z, fmt)


def cmd_solve(config):
    (X, A), fmt = _load(config, "X", "A")
    tol = config.tol
    rank_A = numerical_rank(A, tol)
    if not config.force_theorem1 and X.shape[0] == A.shape[0] and rank_A == A.shape[0]:
        sol = solve_lrr_full_row_rank(X, A, tol)
    else:
        sol = solve_lrr(X, A, tol)
    _write(config, sol.minimizer, fmt)
    report = {"command": "solve", "status": "ok", **_solution_fields(sol),
              "rank_X": numerical_rank(X, tol), "rank_A": rank_A,
              "shape": list(sol.minimizer.shape), "output": config.out, "checks": []}
    return 0, report


def cmd_sim(config):
    (X,), fmt = _load(config, "X")
    sol = shape_interaction_matrix(X, config.tol)
    Z = sol.minimizer
    rank = sol.diagnostics["rank_X"]
    checks = [
        {"name": "symmetry", "value": frobenius(Z - Z.T), "threshold": 1e-9},
        {"name": "idempotency", "value": frobenius(Z @ Z - Z), "threshold": 1e-9},
        {"name": "trace_rank", "value": abs(float(np.trace(Z)) - rank), "threshold": 0.5},
    ]
    for check in checks:
        check["status"] = "pass" if check["value"] <= check["threshold"] else "fail"
    _write(config, Z, fmt)
    report = {"command": "sim", "status": "ok", **_solution_fields(sol),
              "rank_X": rank, "rank_A": rank, "shape": list(Z.shape),
              "output": config.out, "checks": checks}
    return 0, report


def cmd_solve_azb(config):
    (X, A, B), fmt = _load(config, "X", "A", "B")
    sol = solve_azb(X, A, B, config.tol)
    _write(config, sol.minimizer, fmt)
    report = {"command": "solve-azb", "status": "ok", **_solution_fields(sol),
              "rank_X": numerical_rank(X, config.tol), "rank_A": sol.diagnostics["rank_A"],
              "rank_B": sol.diagnostics["rank_B"], "shape": list(sol.minimizer.shape),
              "output": config.out, "checks": []}
    return 0, report


def cmd_verify(config):
    (X, A), fmt = _load(config, "X", "A")
    sol, checks, admm = verify_lrr(X, A, config.tol, config.admm, config.seed)
    _write(config, sol.minimizer, fmt)
    passed = all(c.passed for c in checks)
    report = {"command": "verify", "status": "ok" if passed else "verification_failed",
              **_solution_fields(sol),
              "rank_X": numerical_rank(X, config.tol), "rank_A": sol.diagnostics["rank_A"],
              "seed": config.seed, "admm_iterations": admm.iterations,
              "admm_converged": admm.converged, "output": config.out,
              "checks": [c.as_dict() for c in checks]}
    return (0 if passed else 6), report


def bench_rows(config):
    """Yield one benchmark record per (m, n, seed) grid point."""
    for m in config.rows:
        for n in config.cols:
            k = m
            rank = max(1, min(m, k) // 2)
            for s in range(config.n_seeds):
                seed = config.seed + s
                inst = random_lrr_instance(seed, m, k, n, "deficient", rank=rank)
                t0 = time.perf_counter()
                sol = solve_lrr(inst.X, inst.A, config.tol)
                t1 = time.perf_counter()
                rep = admm_solve_lrr(inst.X, inst.A, config.admm, reference=sol.minimizer, tol=config.tol)
                t2 = time.perf_counter()
                yield {"m": m, "n": n, "k": k, "rank": rank, "seed": seed,
                       "t_closed_form": t1 - t0, "t_admm": t2 - t1,
                       "iterations": rep.iterations, "converged": rep.converged,
                       "distance": rep.distance_to_reference}


def cmd_bench(config):
    records = []
    try:
        fh = open(config.out, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {config.out}: {exc}") from exc
    with fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for rec in bench_rows(config):
            writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in rec.items()})
            records.append(rec)
    distances = [r["distance"] for r in records]
    report = {"command": "bench", "status": "ok", "rows": len(records), "output": config.out,
              "all_converged": all(r["converged"] for r in records),
              "max_distance": max(distances) if distances else None, "checks": []}
    return 0, report


HANDLERS = {
    "solve": cmd_solve,
    "sim": cmd_sim,
    "solve-azb": cmd_solve_azb,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def run(config):
    """Execute `config`; returns ``(exit_code, report)`` without printing."""
    try:
        return HANDLERS[config.command](config)
    except NucminError as exc:
        return exc.exit_code, {"command": config.command, "status": "error",
                               "error": exc.code, "message": str(exc),
                               "exit_code": exc.exit_code}


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return exc.exit_code
    code, report = run(config)
    report.setdefault("exit_code", code)
    stdout.write(render_report(report, config.report))
    if code and "message" in report:
        print(f"nucmin {config.command}: {report['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
