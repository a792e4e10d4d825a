"""Command-line interface: generate problems, solve them, cross-check the
solver against the dense oracle, and benchmark.

Exit codes: 0 success (``check`` additionally requires the frequency error
to pass its bound), 1 usage error, 2 solver failure. The matvec backend is
single-threaded, so runs are fully deterministic; the ``OSC_THREADS``
environment variable is accepted as an upper bound on matvec parallelism
(currently always 1).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import fileio, oracle
from .driver import SolverConfig, solve_lowest
from .errors import OscmodesError
from .operators import ExplicitOperator, InverseMassOperator

CHECK_ERROR_BOUND = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code contract
    instead of calling sys.exit."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="oscmodes",
                     description="Lowest normal-mode frequencies of "
                                 "K xi = omega eta, T eta = omega xi")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve for the lowest frequencies")
    solve.add_argument("--k-matrix", metavar="FILE",
                       help="Matrix Market file with K")
    solve.add_argument("--t-matrix", metavar="FILE",
                       help="Matrix Market file with T")
    solve.add_argument("--mass-matrix", metavar="FILE",
                       help="Matrix Market file with M; T = M^-1 is applied "
                            "through an inner CG solve")
    solve.add_argument("--gen", metavar="N,NNZ,SEED",
                       help="generate a random (K, T) problem instead of "
                            "reading files")
    solve.add_argument("--neigs", type=int, default=1, metavar="K")
    solve.add_argument("--tol", type=float, default=1e-8)
    solve.add_argument("--max-basis", type=int, default=80)
    solve.add_argument("--max-restarts", type=int, default=200)
    solve.add_argument("--seed", type=int, default=1)
    solve.add_argument("--history", metavar="OUT.csv",
                       help="write the per-step convergence history")

    gen = sub.add_parser("gen", help="generate a random SPD matrix")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--nnz-per-row", type=int, default=40)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, metavar="FILE")

    check = sub.add_parser("check",
                           help="compare solver frequencies with the dense oracle")
    check.add_argument("--n", type=int, required=True)
    check.add_argument("--seed", type=int, required=True)
    check.add_argument("--neigs", type=int, default=1)
    check.add_argument("--nnz-per-row", type=int, default=40)
    check.add_argument("--tol", type=float, default=1e-8)

    bench = sub.add_parser("bench", help="time a solve and report apply counts")
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--neigs", type=int, default=1)
    bench.add_argument("--nnz-per-row", type=int, default=40)
    bench.add_argument("--tol", type=float, default=1e-8)
    return parser


def _parse_gen_spec(spec: str):
    parts = spec.split(",")
    if len(parts) != 3:
        raise _UsageError("--gen expects N,NNZ,SEED")
    try:
        n, nnz, seed = (int(p) for p in parts)
    except ValueError:
        raise _UsageError("--gen expects three integers N,NNZ,SEED") from None
    return n, nnz, seed


def _load_problem(args):
    if args.gen is not None:
        if args.k_matrix or args.t_matrix or args.mass_matrix:
            raise _UsageError("--gen excludes the file inputs")
        n, nnz, seed = _parse_gen_spec(args.gen)
        K, T = oracle.generate_problem(n, nnz, seed)
        return ExplicitOperator(K), ExplicitOperator(T)
    if not args.k_matrix:
        raise _UsageError("provide --k-matrix with --t-matrix or "
                          "--mass-matrix, or use --gen")
    if bool(args.t_matrix) == bool(args.mass_matrix):
        raise _UsageError("provide exactly one of --t-matrix / --mass-matrix")
    K = fileio.read_matrix_market(args.k_matrix)
    Kop = ExplicitOperator(K)
    if args.t_matrix:
        return Kop, ExplicitOperator(fileio.read_matrix_market(args.t_matrix))
    M = fileio.read_matrix_market(args.mass_matrix)
    return Kop, InverseMassOperator(M)


def _cmd_solve(args) -> int:
    Kop, Top = _load_problem(args)
    config = SolverConfig(n_eigs=args.neigs, tol=args.tol,
                          max_basis=args.max_basis,
                          max_restarts=args.max_restarts, seed=args.seed)
    modes = solve_lowest(Kop, Top, config)
    for omega in modes.omegas:
        print(f"{omega:.17g}")
    if args.history:
        fileio.write_history_csv(modes.history, args.history)
    return 0


def _cmd_gen(args) -> int:
    matrix = oracle.gen_random_spd(args.n, args.nnz_per_row, args.seed)
    fileio.write_matrix_market(matrix, args.out)
    return 0


def _cmd_check(args) -> int:
    K, T = oracle.generate_problem(args.n, args.nnz_per_row, args.seed)
    config = SolverConfig(n_eigs=args.neigs, tol=args.tol, seed=args.seed)
    modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T), config)
    reference = oracle.dense_spectrum(K, T).omegas[:args.neigs]
    err = float(np.max(np.abs(modes.omegas - reference) / reference))
    print(f"max relative frequency error: {err:.17g}")
    return 0 if err <= CHECK_ERROR_BOUND else 2


def _cmd_bench(args) -> int:
    t0 = time.perf_counter()
    K, T = oracle.generate_problem(args.n, args.nnz_per_row, args.seed)
    t_gen = time.perf_counter() - t0
    config = SolverConfig(n_eigs=args.neigs, tol=args.tol, seed=args.seed)
    t0 = time.perf_counter()
    modes = solve_lowest(ExplicitOperator(K), ExplicitOperator(T), config)
    t_solve = time.perf_counter() - t0
    last = modes.history.rows[-1]
    print(f"n: {args.n}")
    print(f"nnz: {K.nnz + T.nnz}")
    print(f"generate: {t_gen:.3f} s")
    print(f"solve: {t_solve:.3f} s")
    print(f"operator applies: {last.op_applies}")
    print(f"outer steps: {len(modes.history.rows)}")
    for omega in modes.omegas:
        print(f"omega: {omega:.17g}")
    return 0


def run_cli(argv) -> int:
    """Entry point used by tests and by ``main``; returns the exit code."""
    parser = _build_parser()

    def usage_error(exc):
        message = str(exc)
        if "usage:" not in message:
            message = f"{message}\n{parser.format_usage()}"
        print(message, file=sys.stderr)
        return 1

    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return usage_error(exc)
    handlers = {"solve": _cmd_solve, "gen": _cmd_gen,
                "check": _cmd_check, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        return usage_error(exc)
    except OscmodesError as exc:
        print(f"oscmodes: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"oscmodes: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
