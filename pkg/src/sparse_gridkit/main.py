import sys
import json
import argparse
from typing import List, Optional

import numpy as np
import yaml

from .config import configure_logging
from .errors import (
    BufferLengthMismatch,
    ClockUnavailable,
    DisconnectedAssignment,
    EllBlowup,
    EmptySubdomain,
    InterfaceInconsistency,
    ParseError,
    ProtocolDeadlock,
    SolverError,
    UnsupportedField,
    UsageError,
    ZeroDiagonal,
)
from .formats import FORMATS, SparseMatrix, convert
from .kernels import spmv
from .autotune import time_kernel, tune_spmv
from .matrix_io import (
    KINDS,
    build_manifest,
    compute_stats,
    generate_test_matrix,
    json_report,
    load_format,
    read_matrix_market,
    save_format,
    write_bench_csv,
    write_json_report,
    write_matrix_market,
)
from .schemas import BLOCK_SIZES, WORKERS_PER_ROW, ExecPolicy, GridStrategy, SolverConfig, TimingProtocol
from .solvers import SOLVERS, solve
from .substructure import NEIGHBOR_ORDERS, partition_matrix, partition_stats, read_assignment, solve_cg_substructured

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (
    SolverError,
    ZeroDiagonal,
    EllBlowup,
    ClockUnavailable,
    ProtocolDeadlock,
    BufferLengthMismatch,
    InterfaceInconsistency,
)
IO_ERRORS = (OSError, ParseError, UnsupportedField)


class _ArgumentParser(argparse.ArgumentParser):
    """Raise on bad arguments so main() owns the exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _banner(title: str, quiet: bool = False) -> None:
    if quiet:
        return
    print("\n" + "=" * 80)
    print(title)
    print("=" * 80)


def _load_matrix(path: str) -> SparseMatrix:
    if path.endswith(".npz"):
        return load_format(path)
    return read_matrix_market(path)


def _policy(args, base: Optional[dict] = None) -> ExecPolicy:
    fields = dict(base or {})
    flags = {
        "block_size": args.block_size,
        "workers_per_row": args.workers_per_row,
        "grid_strategy": args.strategy,
        "worker_count": args.workers,
    }
    fields.update({k: v for k, v in flags.items() if v is not None})
    return ExecPolicy(**fields)


def _solver_config(args) -> SolverConfig:
    """YAML file (if any) first, explicit flags on top"""
    base = {}
    if args.config:
        with open(args.config, "r") as f:
            base = yaml.safe_load(f) or {}
        if not isinstance(base, dict):
            raise UsageError(f"{args.config}: expected a mapping of solver settings")
    overrides = {
        "tolerance": args.tol,
        "max_iterations": args.max_iter,
        "preconditioner": getattr(args, "precond", None),
        "restart": getattr(args, "restart", None),
        "stab_l": getattr(args, "l", None),
        "record_trace": True if getattr(args, "trace", False) else None,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    base["policy"] = _policy(args, base.get("policy"))
    return SolverConfig.model_validate(base)


def _rhs(spec: str, n: int) -> np.ndarray:
    if spec == "ones":
        return np.ones(n)
    b = np.loadtxt(spec, dtype=np.float64, ndmin=1)
    if b.shape != (n,):
        raise UsageError(f"rhs file {spec} holds {b.size} values, system has {n} equations")
    return b


def _assignment(args, n: int):
    if args.assignment:
        return read_assignment(args.assignment, n)
    return None


# ---------------------------------------------------------------- commands

def cmd_convert(args) -> int:
    m = _load_matrix(args.matrix)
    width = args.hyb_width
    if width is not None and width != "auto":
        try:
            width = int(width)
        except ValueError:
            raise UsageError(f"--hyb-width must be an integer or 'auto', got {width!r}")
    converted = convert(m, args.to, hyb_width=width if width is not None else "auto")
    if args.out.endswith(".mtx"):
        write_matrix_market(converted, args.out)
    else:
        save_format(converted, args.out)
    print(f"  {args.matrix} -> {args.out}: {converted!r}")
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = compute_stats(_load_matrix(args.matrix))
    if args.json:
        print(json.dumps(stats.model_dump(), indent=2))
        return EXIT_OK
    _banner(f"MATRIX STATISTICS: {args.matrix}")
    print(f"h:               {stats.h}")
    print(f"nz:              {stats.nz}")
    print(f"density:         {stats.density:.6g} ({stats.density_percent:.4g} %)")
    print(f"max row:         {stats.max_row} nonzeros (row {stats.densest_row})")
    print(f"bandwidth:       {stats.bandwidth}")
    print(f"nz/h:            {stats.nz_per_h_mean:.3f}")
    print(f"nz/h stddev:     {stats.nz_per_h_stddev:.3f}")
    return EXIT_OK


def cmd_spmv_bench(args) -> int:
    m = convert(_load_matrix(args.matrix), args.format)
    policy = _policy(args)
    x = np.ones(m.n_cols)
    y = np.zeros(m.n_rows)
    protocol = TimingProtocol(min_repetitions=args.reps)
    record = time_kernel(
        lambda: spmv(m, x, policy, out=y),
        protocol,
        kernel_name=f"spmv_{m.format_name}",
        matrix_name=args.matrix,
        policy=policy,
    )
    if args.json:
        manifest = build_manifest("spmv-bench", args.argv, args.matrix, args.format, policy)
        print(json.dumps(json_report(record, manifest), indent=2))
    else:
        write_bench_csv([record])
    return EXIT_OK


def cmd_tune(args) -> int:
    m = convert(_load_matrix(args.matrix), args.format)
    protocol = TimingProtocol(min_repetitions=args.reps)
    _banner(f"TUNING spmv_{m.format_name} ON {args.matrix}", args.json)
    result = tune_spmv(m, protocol=protocol, matrix_name=args.matrix)

    if args.csv:
        write_bench_csv(result.table, args.csv)
    if args.json:
        manifest = build_manifest("tune", args.argv, args.matrix, args.format)
        print(json.dumps(json_report(result, manifest), indent=2))
        return EXIT_OK

    print(f"{'policy':<22}{'reps':>9}{'mean (ms)':>14}{'stddev (ms)':>14}")
    for record in result.table:
        print(f"{record.policy.label():<22}{record.reps:>9}{record.mean_ms:>14.4f}{record.stddev_ms:>14.4f}")
    print(f"\nBest policy:      {result.best_policy.label()}  ({result.best_record.mean_ms:.4f} ms)")
    print(f"Default policy:   {result.default_record.policy.label()}  ({result.default_record.mean_ms:.4f} ms)")
    print(f"Speed-up:         {result.speedup_vs_default:.3f}")
    print(f"Max deviation:    {result.max_relative_deviation:.2e}")
    return EXIT_OK


def _finish_solve(report, args, manifest) -> int:
    if args.report:
        write_json_report(report.summary(include_solution=args.with_solution), args.report, manifest)
    print(f"Method:           {report.method}")
    print(f"Converged:        {report.converged}")
    print(f"Iterations:       {report.iterations}")
    print(f"Final measure:    {report.final_residual_measure:.3e}")
    print(f"Wall time:        {report.wall_time:.3f} s")
    if report.subdomain_times:
        for i, seconds in enumerate(report.subdomain_times):
            print(f"  subdomain {i}:    {seconds:.3f} s")
    return EXIT_OK if report.converged else EXIT_NUMERICAL


def _run_reported(run, args, manifest) -> int:
    """Run a solve; numerical failures still leave their partial report behind"""
    try:
        report = run()
    except SolverError as error:
        if error.report is not None:
            _finish_solve(error.report, args, manifest)
        raise
    return _finish_solve(report, args, manifest)


def cmd_solve(args) -> int:
    m = convert(_load_matrix(args.matrix), args.format)
    cfg = _solver_config(args)
    b = _rhs(args.rhs, m.n_rows)
    manifest = build_manifest("solve", args.argv, args.matrix, args.format, cfg.policy, cfg)
    _banner(f"SOLVE {args.matrix} WITH {args.method.upper()} ({cfg.preconditioner.value})")
    return _run_reported(lambda: solve(args.method, m, b, None, cfg), args, manifest)


def cmd_partition(args) -> int:
    m = _load_matrix(args.matrix)
    partition, locals_ = partition_matrix(m, assignment=_assignment(args, m.n_rows), n_parts=args.parts)
    table = partition_stats(partition, locals_)
    if args.json:
        print(json.dumps([row.model_dump() for row in table], indent=2))
        return EXIT_OK
    _banner(f"PARTITION {args.matrix} INTO {partition.n_subdomains} SUBDOMAINS")
    print(f"{'subdomain':>10}{'dof':>10}{'nnz':>12}{'interface':>12}{'neighbors':>12}")
    for row in table:
        print(f"{row.subdomain:>10}{row.dof:>10}{row.nnz:>12}{row.n_interface:>12}{row.n_neighbors:>12}")
    print(f"\nInterface equations: {len(partition.interface_equations())}")
    return EXIT_OK


def cmd_solve_par(args) -> int:
    m = _load_matrix(args.matrix)
    cfg = _solver_config(args)
    b = _rhs(args.rhs, m.n_rows)
    assignment = _assignment(args, m.n_rows)
    manifest = build_manifest("solve-par", args.argv, args.matrix, "csr", cfg.policy, cfg)
    _banner(f"SUB-STRUCTURED CG ON {args.matrix} ({args.parts or 'assigned'} parts)")
    return _run_reported(
        lambda: solve_cg_substructured(
            m, b, n_parts=None if assignment is not None else args.parts, assignment=assignment, cfg=cfg,
            neighbor_order=args.neighbor_order, timeout=args.timeout,
        ),
        args,
        manifest,
    )


def cmd_generate(args) -> int:
    m = generate_test_matrix(args.kind, args.n, args.out, peclet=args.peclet)
    print(f"  {args.kind} n={args.n}: {m.n_rows}x{m.n_cols}, nnz {m.nnz} -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="sparse-gridkit", description="Sparse formats, tuned SpMV and Krylov solvers")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from SPARSE_GRIDKIT_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    policy_flags = argparse.ArgumentParser(add_help=False)
    policy_flags.add_argument("--block-size", type=int, choices=BLOCK_SIZES, default=None)
    policy_flags.add_argument("--workers-per-row", type=int, choices=WORKERS_PER_ROW, default=None)
    policy_flags.add_argument("--strategy", type=GridStrategy, choices=list(GridStrategy), default=None)
    policy_flags.add_argument("--workers", type=int, default=None, help="Worker-pool size")

    solver_flags = argparse.ArgumentParser(add_help=False)
    solver_flags.add_argument("--tol", type=float, default=None, help="Relative tolerance (default 1e-6)")
    solver_flags.add_argument("--max-iter", type=int, default=None, help="Iteration cap (default 30000)")
    solver_flags.add_argument("--rhs", default="ones", help="'ones' or a file with one value per line")
    solver_flags.add_argument("--config", default=None, help="YAML file with SolverConfig settings")
    solver_flags.add_argument("--report", default=None, help="Write the JSON SolveReport here")
    solver_flags.add_argument("--with-solution", action="store_true", help="Include x in the report")

    p = sub.add_parser("convert", help="Convert a matrix to another storage format")
    p.add_argument("matrix")
    p.add_argument("--to", required=True, choices=FORMATS)
    p.add_argument("--hyb-width", default=None, help="ELL width of the HYB split, or 'auto'")
    p.add_argument("--out", required=True, help=".mtx for Matrix Market, anything else for an .npz archive")
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("stats", help="Dimension, density and row-count statistics")
    p.add_argument("matrix")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("spmv-bench", parents=[policy_flags], help="Time SpMV under one execution policy")
    p.add_argument("matrix")
    p.add_argument("--format", default="csr", choices=FORMATS)
    p.add_argument("--reps", type=int, default=10, help="Minimum repetitions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_spmv_bench)

    p = sub.add_parser("tune", help="Search the execution-policy grid for the fastest SpMV")
    p.add_argument("matrix")
    p.add_argument("--format", default="csr", choices=FORMATS)
    p.add_argument("--reps", type=int, default=10, help="Minimum repetitions")
    p.add_argument("--csv", default=None, help="Write the timing table as CSV")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_tune)

    p = sub.add_parser("solve", parents=[policy_flags, solver_flags], help="Solve A x = b with a Krylov method")
    p.add_argument("matrix")
    p.add_argument("--method", default="cg", choices=sorted(SOLVERS))
    p.add_argument("--l", type=int, default=None, help="BiCGStab(l) degree")
    p.add_argument("--restart", type=int, default=None, help="GCR restart length")
    p.add_argument("--precond", default=None, choices=["none", "jacobi"])
    p.add_argument("--format", default="csr", choices=FORMATS)
    p.add_argument("--trace", action="store_true", help="Record the per-iteration scalars")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("partition", help="Split a matrix into subdomains and report their sizes")
    p.add_argument("matrix")
    p.add_argument("--parts", type=int, default=None)
    p.add_argument("--assignment", default=None, help="File with one subdomain id per equation")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_partition)

    p = sub.add_parser("solve-par", parents=[policy_flags, solver_flags], help="Sub-structured parallel CG")
    p.add_argument("matrix")
    p.add_argument("--parts", type=int, default=None)
    p.add_argument("--assignment", default=None, help="File with one subdomain id per equation")
    p.add_argument("--neighbor-order", default="ascending", choices=NEIGHBOR_ORDERS)
    p.add_argument("--timeout", type=float, default=None, help="Exchange timeout in seconds")
    p.set_defaults(handler=cmd_solve_par)

    p = sub.add_parser("generate", help="Write a generated test matrix")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("n", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--peclet", type=float, default=None, help="convdiff2d Peclet number (default 1)")
    p.set_defaults(handler=cmd_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        configure_logging(args.log_level)
        if getattr(args, "parts", None) is not None and getattr(args, "assignment", None) is None and args.parts < 1:
            raise UsageError(f"--parts must be >= 1, got {args.parts}")
        if args.command in ("partition", "solve-par") and args.parts is None and args.assignment is None:
            raise UsageError(f"{args.command} needs --parts or --assignment")
        return args.handler(args)
    except NUMERICAL_ERRORS as error:
        print(f"\n  Numerical failure: {error}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IO_ERRORS as error:
        print(f"\n  I/O error: {error}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, DisconnectedAssignment, EmptySubdomain) as error:
        print(f"\n  Usage error: {error}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
