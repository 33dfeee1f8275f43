"""Command-line entry point: ``nlfem {mesh-gen,solve,convergence,verify}``.

Exit codes: 0 success, 2 usage or unreadable input, 3 solver failure,
4 configuration or regime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .errors import (DegenerateTriangle, HorizonTooSmall, InvalidDelta, NonManifoldError, NonNormalizable,
                     NonSymmetric, NotConverged, OrientationError, ParseError, RegimeError, UnsupportedOrder,
                     ZeroDiagonal)
from .quadrature import QuadratureConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

INPUT_ERRORS = (OSError, ParseError, OrientationError, NonManifoldError, DegenerateTriangle)
SOLVER_ERRORS = (NotConverged, NonSymmetric, ZeroDiagonal)
CONFIG_ERRORS = (HorizonTooSmall, RegimeError, InvalidDelta, NonNormalizable, UnsupportedOrder, ValueError)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _levels(text: str) -> int:
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("a convergence study needs at least 2 levels")
    return value


def _add_numerics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", default="const", help="const, quadratic or poly:c0,c1,... (default: const)")
    p.add_argument("--edge-quad", type=_positive_int, default=QuadratureConfig.edge_points,
                   help="Gauss points per 1D piece (default: %(default)s)")
    p.add_argument("--tri-quad-degree", type=_positive_int, default=QuadratureConfig.tri_degree,
                   help="triangle rule degree (default: %(default)s)")
    p.add_argument("--tol", type=_positive_float, default=1e-10, help="CG relative residual (default: %(default)s)")
    p.add_argument("--threads", type=_positive_int, default=None, help="cap on assembly threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlfem", description="Nonlocal diffusion finite elements.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh-gen", help="write a structured unit-square mesh")
    p.add_argument("--n", type=_positive_int, required=True, help="cells per side")
    p.add_argument("--out", required=True, help="mesh file to write")

    p = sub.add_parser("solve", help="assemble and solve one problem")
    p.add_argument("--mesh", required=True, help="mesh file")
    p.add_argument("--delta", type=_positive_float, required=True, help="horizon parameter (support radius 2 delta)")
    p.add_argument("--problem", choices=("constant", "cosine"), default="constant")
    p.add_argument("--out", required=True, help="solution CSV (cell,local,x,y,value)")
    p.add_argument("--maxiter", type=_positive_int, default=None, help="CG iteration cap (default: 20 * dofs)")
    p.add_argument("--matrix-out", help="write S = D + M in Matrix Market format")
    p.add_argument("--rhs-out", help="write the load vector b")
    p.add_argument("--solution-out", help="write the coefficient vector c")
    p.add_argument("--cg-log", action="store_true", help="print 'iter <k> relres <value>' per CG iteration")
    _add_numerics(p)

    p = sub.add_parser("convergence", help="solve on n = 4, 8, 16, ... with delta = ratio * h")
    p.add_argument("--levels", type=_levels, required=True)
    p.add_argument("--delta-ratio", type=_positive_float, required=True)
    p.add_argument("--problem", choices=("constant", "cosine"), default="cosine")
    p.add_argument("--out", required=True, help="CSV file to write")
    _add_numerics(p)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=("kernels", "geometry", "oracle", "all"), default="all")
    return parser


def _quadrature(args) -> QuadratureConfig:
    return QuadratureConfig(edge_points=args.edge_quad, tri_degree=args.tri_quad_degree)


def _cmd_mesh_gen(args) -> int:
    from .mesh import generate_unit_square_mesh, save_mesh

    text = save_mesh(generate_unit_square_mesh(args.n))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return EXIT_OK


def _cmd_solve(args) -> int:
    from .export import write_matrix_market, write_solution_csv, write_vector
    from .mesh import load_mesh
    from .study import SolveConfig, solve

    with open(args.mesh, encoding="utf-8") as fh:
        m = load_mesh(fh.read())
    cfg = SolveConfig(kernel=args.kernel, delta=args.delta, problem=args.problem, quadrature=_quadrature(args),
                      tol=args.tol, maxiter=args.maxiter, threads=args.threads)
    run = solve(m, cfg, verbose=args.cg_log)
    write_solution_csv(args.out, m, run.solution)
    if args.matrix_out:
        write_matrix_market(args.matrix_out, run.system.S, comment=" S = D + M, dof = 3 * cell + local (1-based)")
    if args.rhs_out:
        write_vector(args.rhs_out, run.system.b)
    if args.solution_out:
        write_vector(args.solution_out, run.solution)
    print(f"L2 {run.l2:.17g}")
    print(f"Linf {run.linf:.17g}")
    print(f"cg_iters {run.cg.iterations}")
    print(f"assembly_seconds {run.assembly_seconds:.3f}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    from .export import write_csv
    from .study import CONVERGENCE_COLUMNS, ConvergenceConfig, convergence_study

    cfg = ConvergenceConfig(levels=args.levels, delta_ratio=args.delta_ratio, problem=args.problem,
                            kernel=args.kernel, quadrature=_quadrature(args), tol=args.tol, threads=args.threads)
    rows = convergence_study(cfg)
    write_csv(args.out, CONVERGENCE_COLUMNS, rows)
    for row in rows:
        print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in zip(CONVERGENCE_COLUMNS, row)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_suite

    checks = run_suite(args.suite, stream=sys.stdout)
    return EXIT_OK if all(c.passed for c in checks) else 1


COMMANDS = {"mesh-gen": _cmd_mesh_gen, "solve": _cmd_solve, "convergence": _cmd_convergence, "verify": _cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        print(f"nlfem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SOLVER_ERRORS as exc:
        print(f"nlfem: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CONFIG_ERRORS as exc:
        print(f"nlfem: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
