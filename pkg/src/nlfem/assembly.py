"""Reduced-dimension assembly of the discrete nonlocal Neumann problem.

The unknowns are the coefficients ``c[3 i + k]`` of the discontinuous
linear basis (three per cell).  The diffusion matrix ``D`` is
``(1 / 2 delta^2)`` times the symmetrised double integral of
``R_delta (phi(x) - phi(y)) (psi(x) - psi(y))``; the zero-order matrix ``M``
is ``int int Rbar_delta phi(x) psi(y)``.  Integration by parts moves all
dependence on the inner variable into the closed-form triangle integrals
``U_i, P_i, Q_i`` of ``R_delta, Rbar_delta, Rbarbar_delta``; only 1D and
2D outer integrals remain for quadrature.

Per cell pair, with ``phibar`` the affine extension of a basis function
and ``a`` its gradient::

    D_ij = -2 oint_dTj (a_ik.n) phi_jl P_i + 2 (a_ik.a_jl) int_Tj P_i
           - delta^-2 int_Tj phibar_ik phi_jl U_i                     (i != j)
    D_ii = -2 delta^2 oint oint (a_k.n)(a_l.n) Rbarbar_delta
           + (a_k.a_l) int_Ti P_i + delta^-2 int_Ti W_i phi_k phi_l
    M_ij = 2 delta^2 oint_dTj (a_ik.n) phi_jl Q_i
           - 2 delta^2 (a_ik.a_jl) int_Tj Q_i + int_Tj P_i phibar_ik phi_jl

where ``W_i = sum_{j != i} U_j``.  That sum is evaluated as
``int_Omega R_delta(x - y) dy - U_i(x)``: the domain integral is a sum of
exact wedge moments over the maximal straight boundary runs within ``2 delta``
of ``T_i`` (a constant in the interior), so no cell ever needs its
neighbours' ``U_j``.

``U_i, P_i, Q_i`` are piecewise smooth in ``x``: their derivatives jump on
the circles of radius ``2 delta`` about the vertices of ``T_i`` and on the
lines offset by ``2 delta`` from its edges.  Every 1D outer integral is split
at those crossings, and every 2D outer integral over a target cell is split
into strips and chords along them, with Gauss rules whose nodes are graded
towards square-root endpoints.  This keeps the outer quadrature spectrally
accurate on the clipped pairs.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import _kernels
from ._segments import make_rules
from .errors import HorizonTooSmall
from .exact_integrate import tier_weights
from .kernel import KernelFamily
from .mesh import Mesh, boundary_edges_near, boundary_runs_near, interacting_cells
from .quadrature import QuadratureConfig

log = logging.getLogger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]
"""Vectorised field: maps an (m, 2) array of points to (m,) values."""


@dataclass
class AssemblyTimings:
    blocks: float = 0.0
    boundary: float = 0.0
    extra: dict = field(default_factory=dict)


def check_horizon(m: Mesh, kf: KernelFamily) -> None:
    hmin = float(m.cell_diameters().min())
    if kf.horizon < 0.1 * hmin:
        raise HorizonTooSmall(f"2*delta = {kf.horizon:g} is below a tenth of the smallest cell diameter {hmin:g}")


def _rules(q: QuadratureConfig):
    """Segment rule variants on [0, 1] and the barycentric triangle rule."""
    seg = q.segment()
    rx, rw = make_rules(0.5 * (seg.nodes + 1.0), 0.5 * seg.weights)
    tr = q.triangle()
    xi, eta = tr.nodes[:, 0], tr.nodes[:, 1]
    qb = np.ascontiguousarray(np.stack([1.0 - xi - eta, xi, eta], axis=1))
    qw = np.ascontiguousarray(2.0 * tr.weights)
    return rx, rw, qb, qw


def _upper_pairs(nbr_ptr, nbr_idx):
    up_ptr = [0]
    up_idx = []
    for i in range(len(nbr_ptr) - 1):
        row = nbr_idx[nbr_ptr[i]:nbr_ptr[i + 1]]
        row = row[row > i]
        up_idx.append(row)
        up_ptr.append(up_ptr[-1] + len(row))
    return np.array(up_ptr, dtype=np.int64), np.concatenate(up_idx).astype(np.int64)


def _blocks_to_csr(n, diag, up_ptr, up_idx, upper) -> sp.csr_matrix:
    cells = np.arange(n)
    pair_i = np.repeat(cells, np.diff(up_ptr))
    kk, ll = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    rows = [(3 * cells[:, None, None] + kk).ravel(), (3 * pair_i[:, None, None] + kk).ravel(),
            (3 * up_idx[:, None, None] + ll).ravel()]
    cols = [(3 * cells[:, None, None] + ll).ravel(), (3 * up_idx[:, None, None] + ll).ravel(),
            (3 * pair_i[:, None, None] + kk).ravel()]
    vals = [diag.ravel(), upper.ravel(), upper.ravel()]
    mat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(3 * n, 3 * n))
    out = mat.tocsr()
    out.sort_indices()
    return out


@dataclass
class Operators:
    """Diffusion and zero-order matrices of one assembly."""

    D: sp.csr_matrix
    M: sp.csr_matrix
    seconds: float

    @property
    def S(self) -> sp.csr_matrix:
        return (self.D + self.M).tocsr()


def assemble_operators(m: Mesh, kf: KernelFamily, q: QuadratureConfig | None = None) -> Operators:
    """Assemble ``D`` and ``M`` together (they share every inner integral)."""
    q = q or QuadratureConfig()
    check_horizon(m, kf)
    t0 = time.perf_counter()
    nbr_ptr, nbr_idx = interacting_cells(m, kf.horizon)
    up_ptr, up_idx = _upper_pairs(nbr_ptr, nbr_idx)
    grads, offs = m.basis_arrays()
    tri = np.ascontiguousarray(m.cell_coords())
    rx, rw, qb, qw = _rules(q)
    n = m.n_cells
    Dd = np.zeros((n, 3, 3))
    Md = np.zeros((n, 3, 3))
    Dp = np.zeros((len(up_idx), 3, 3))
    Mp = np.zeros((len(up_idx), 3, 3))
    runs, run_ptr, run_idx = boundary_runs_near(m, kf.horizon)
    _kernels.assemble_blocks(tri, grads, offs, m.areas, up_ptr, up_idx, np.ascontiguousarray(runs), run_ptr, run_idx,
                             tier_weights(kf), kf.horizon, kf.delta, rx, rw, qb, qw, Dd, Md, Dp, Mp)
    D = _blocks_to_csr(n, Dd, up_ptr, up_idx, Dp)
    M = _blocks_to_csr(n, Md, up_ptr, up_idx, Mp)
    seconds = time.perf_counter() - t0
    log.info("assembled %d cells, %d pairs in %.2fs", n, len(up_idx), seconds)
    return Operators(D, M, seconds)


def assemble_diffusion(m: Mesh, kf: KernelFamily, q: QuadratureConfig | None = None) -> sp.csr_matrix:
    return assemble_operators(m, kf, q).D


def assemble_zero_order(m: Mesh, kf: KernelFamily, q: QuadratureConfig | None = None) -> sp.csr_matrix:
    return assemble_operators(m, kf, q).M


def interpolate(field: ScalarField, m: Mesh) -> np.ndarray:
    """Vertex values of ``field`` in the discontinuous space (one triple per cell)."""
    pts = m.cell_coords().reshape(-1, 2)
    return np.asarray(field(pts), dtype=float).reshape(-1) * np.ones(len(pts))


def assemble_boundary(m: Mesh, kf: KernelFamily, g: ScalarField, q: QuadratureConfig | None = None) -> np.ndarray:
    """Load vector of ``2 int phi_ik(x) int_dOmega Rbar_delta(x, y) g(y) dy dx``."""
    q = q or QuadratureConfig()
    n = m.n_cells
    out = np.zeros((n, 3))
    if len(m.boundary_edges) == 0:
        return out.ravel()
    ptr, idx = boundary_edges_near(m, kf.horizon)
    pair_cell = np.repeat(np.arange(n), np.diff(ptr)).astype(np.int64)
    pair_edge = idx.astype(np.int64)
    if len(pair_cell) == 0:
        return out.ravel()
    bseg = np.ascontiguousarray(m.vertices[m.boundary_edges])
    tri = np.ascontiguousarray(m.cell_coords())
    rx, rw, _, _ = _rules(q)
    nodes, weights, nptr = _kernels.boundary_nodes(pair_cell, pair_edge, bseg, tri, kf.horizon, rx, rw)
    gvals = np.ascontiguousarray(np.asarray(g(nodes), dtype=float).reshape(-1) * np.ones(len(nodes)))
    grads, offs = m.basis_arrays()
    _kernels.boundary_terms(pair_cell, nptr, nodes, weights, gvals, tri, grads, offs,
                            tier_weights(kf), kf.horizon, kf.delta, rx, rw, out)
    return 2.0 * out.ravel()


def assemble_rhs(m: Mesh, kf: KernelFamily, f: ScalarField, g: ScalarField,
                 q: QuadratureConfig | None = None, M: sp.csr_matrix | None = None) -> np.ndarray:
    """Source term ``M @ interpolate(f)`` plus the boundary load."""
    if M is None:
        M = assemble_zero_order(m, kf, q)
    return M @ interpolate(f, m) + assemble_boundary(m, kf, g, q)


@dataclass
class System:
    S: sp.csr_matrix
    b: np.ndarray
    operators: Operators


def assemble_system(m: Mesh, kf: KernelFamily, f: ScalarField, g: ScalarField,
                    q: QuadratureConfig | None = None) -> System:
    ops = assemble_operators(m, kf, q)
    b = assemble_rhs(m, kf, f, g, q, M=ops.M)
    return System(ops.S, b, ops)
