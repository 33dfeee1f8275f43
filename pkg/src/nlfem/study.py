"""End-to-end runs: assemble, solve, measure errors, sweep mesh levels."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numba
import numpy as np

from .assembly import System, assemble_system
from .kernel import KernelFamily, make_kernel_family, parse_kernel
from .mesh import Mesh, generate_unit_square_mesh
from .problems import Problem, get_problem
from .quadrature import QuadratureConfig
from .solver import CGResult, conjugate_gradient, error_norms

log = logging.getLogger(__name__)


@dataclass
class SolveConfig:
    kernel: str = "const"
    delta: float = 0.25
    problem: str = "constant"
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tol: float = 1e-10
    maxiter: Optional[int] = None
    threads: Optional[int] = None

    def kernel_family(self) -> KernelFamily:
        return make_kernel_family(parse_kernel(self.kernel), self.delta)


@dataclass
class SolveResult:
    mesh: Mesh
    problem: Problem
    system: System
    cg: CGResult
    l2: float
    linf: float
    assembly_seconds: float
    solve_seconds: float

    @property
    def solution(self) -> np.ndarray:
        return self.cg.solution


def set_threads(threads: Optional[int]) -> None:
    """Cap the assembly threads (``None`` keeps the numba default)."""
    if threads is None:
        return
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def solve(m: Mesh, cfg: SolveConfig, verbose: bool = False, stream: TextIO | None = None) -> SolveResult:
    set_threads(cfg.threads)
    problem = get_problem(cfg.problem)
    kf = cfg.kernel_family()
    t0 = time.perf_counter()
    system = assemble_system(m, kf, problem.f, problem.g, cfg.quadrature)
    t1 = time.perf_counter()
    cg = conjugate_gradient(system.S, system.b, tol=cfg.tol, maxiter=cfg.maxiter, verbose=verbose, stream=stream)
    t2 = time.perf_counter()
    l2, linf = error_norms(cg.solution, problem.exact, m, cfg.quadrature)
    log.info("n_cells=%d iters=%d l2=%.3e linf=%.3e", m.n_cells, cg.iterations, l2, linf)
    return SolveResult(m, problem, system, cg, l2, linf, t1 - t0, t2 - t1)


@dataclass
class ConvergenceConfig:
    levels: int = 3
    delta_ratio: float = 2.0
    problem: str = "cosine"
    kernel: str = "const"
    base_n: int = 4
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tol: float = 1e-10
    threads: Optional[int] = None


CONVERGENCE_COLUMNS = ("level", "n", "h", "delta", "l2", "linf", "assembly_seconds", "cg_iters")


def convergence_study(cfg: ConvergenceConfig) -> list[tuple]:
    """Rows ``(level, n, h, delta, l2, linf, assembly_seconds, cg_iters)`` for
    ``n = base_n * 2**level``, ``h = 1/n`` and ``delta = delta_ratio * h``."""
    if cfg.levels < 2:
        raise ValueError(f"a convergence study needs at least 2 levels, got {cfg.levels}")
    rows = []
    for level in range(cfg.levels):
        n = cfg.base_n * 2**level
        h = 1.0 / n
        delta = cfg.delta_ratio * h
        run = solve(generate_unit_square_mesh(n),
                    SolveConfig(kernel=cfg.kernel, delta=delta, problem=cfg.problem, quadrature=cfg.quadrature,
                                tol=cfg.tol, threads=cfg.threads))
        rows.append((level, n, h, delta, run.l2, run.linf, run.assembly_seconds, run.cg.iterations))
    return rows
