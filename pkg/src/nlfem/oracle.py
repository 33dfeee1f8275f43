"""Brute-force evaluation of the unreduced integrals, for validation only.

Two modes:

* ``tensor``: nested triangle (and segment) rules over pairs of cells.
  Exact up to rounding when the kernel support covers every pair of
  points involved (no clipping), because the integrands are polynomials.
* ``mc``: Monte Carlo with a standard-error estimate, for the clipped
  regime where the integrand has a kink surface.

Entries follow the original discrete form, without integration by parts::

    D[(i,k),(j,l)] = delta^-2 int phi_ik(x) int R_delta(x,y) (phi_jl(x) - phi_jl(y)) dy dx
    M[(i,k),(j,l)] = int phi_ik(x) int Rbar_delta(x,y) phi_jl(y) dy dx
    b[(i,k)]       = int phi_ik(x) int Rbar_delta(x,y) f_h(y) dy dx
                     + 2 int phi_ik(x) int_dOmega Rbar_delta(x,y) g(y) dS_y dx

with ``f_h`` the vertex interpolant of ``f``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from matplotlib.tri import Triangulation

from .errors import RegimeError
from .kernel import KernelFamily, eval_scaled
from .mesh import Mesh
from .quadrature import gauss_segment, map_rule, triangle_rule

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    samples: int = 0


def _basis(m: Mesh, cell: int, k: int, pts: np.ndarray) -> np.ndarray:
    grads, offs = m.basis_arrays()
    return pts @ grads[cell, k] + offs[cell, k]


def _max_vertex_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = a.reshape(-1, 1, 2) - b.reshape(1, -1, 2)
    return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))


def _require_no_clipping(kf: KernelFamily, *pairs) -> None:
    for a, b in pairs:
        if _max_vertex_distance(a, b) > kf.horizon:
            raise RegimeError("tensor mode needs the kernel support to cover every point pair; use mode='mc'")


# --------------------------------------------------------------------------
# tensor mode


def _cell_rule(m: Mesh, cell: int, order: int):
    return map_rule(triangle_rule(order), m.cell_coords(cell))


def _tensor_diffusion(m, kf, i, k, j, l, order):
    xi, wi = _cell_rule(m, i, order)
    if i != j:
        _require_no_clipping(kf, (m.cell_coords(i), m.cell_coords(j)))
        yj, wj = _cell_rule(m, j, order)
        K = eval_scaled(kf, "R", xi[:, None, :], yj[None, :, :])
        val = -np.einsum("a,b,ab,a,b->", wi, wj, K, _basis(m, i, k, xi), _basis(m, j, l, yj))
        return val / kf.delta**2
    _require_no_clipping(kf, (m.cell_coords(i), m.vertices))
    mass = np.zeros(len(xi))
    for c in range(m.n_cells):
        yc, wc = _cell_rule(m, c, order)
        mass += eval_scaled(kf, "R", xi[:, None, :], yc[None, :, :]) @ wc
    K = eval_scaled(kf, "R", xi[:, None, :], xi[None, :, :])
    pk, pl = _basis(m, i, k, xi), _basis(m, i, l, xi)
    local = np.sum(wi * pk * pl * mass)
    cross = np.einsum("a,b,ab,a,b->", wi, wi, K, pk, pl)
    return (local - cross) / kf.delta**2


def _tensor_zero_order(m, kf, i, k, j, l, order):
    _require_no_clipping(kf, (m.cell_coords(i), m.cell_coords(j)))
    xi, wi = _cell_rule(m, i, order)
    yj, wj = _cell_rule(m, j, order)
    K = eval_scaled(kf, "Rbar", xi[:, None, :], yj[None, :, :])
    return float(np.einsum("a,b,ab,a,b->", wi, wj, K, _basis(m, i, k, xi), _basis(m, j, l, yj)))


def _tensor_rhs(m, kf, i, k, f_dofs, g, order, edge_points):
    _require_no_clipping(kf, (m.cell_coords(i), m.vertices))
    xi, wi = _cell_rule(m, i, order)
    pk = _basis(m, i, k, xi)
    src = 0.0
    fd = np.asarray(f_dofs).reshape(-1, 3)
    for c in range(m.n_cells):
        yc, wc = _cell_rule(m, c, order)
        fh = sum(fd[c, l] * _basis(m, c, l, yc) for l in range(3))
        src += np.einsum("a,b,ab,a,b->", wi, wc, eval_scaled(kf, "Rbar", xi[:, None, :], yc[None, :, :]), pk, fh)
    bnd = 0.0
    seg = gauss_segment(edge_points)
    for v1, v2 in m.boundary_edges:
        ys, ws = map_rule(seg, m.vertices[[v1, v2]])
        gy = np.asarray(g(ys), dtype=float) * np.ones(len(ys))
        bnd += np.einsum("a,b,ab,a,b->", wi, ws, eval_scaled(kf, "Rbar", xi[:, None, :], ys[None, :, :]), pk, gy)
    return float(src + 2.0 * bnd)


# --------------------------------------------------------------------------
# Monte Carlo mode


class _Sampler:
    def __init__(self, m: Mesh, seed: int):
        self.m = m
        self.seed = seed
        tri = Triangulation(m.vertices[:, 0], m.vertices[:, 1], m.cells)
        self.finder = tri.get_trifinder()

    def streams(self, n_batches: int, tag: tuple):
        ss = np.random.SeedSequence([self.seed, *tag])
        return [np.random.default_rng(s) for s in ss.spawn(n_batches)]

    def in_cell(self, rng, cell, n):
        t = self.m.cell_coords(cell)
        u = rng.random((n, 2))
        flip = u.sum(axis=1) > 1.0
        u[flip] = 1.0 - u[flip]
        return t[0] + u[:, :1] * (t[1] - t[0]) + u[:, 1:] * (t[2] - t[0])

    def in_disk(self, rng, centers, radius):
        n = len(centers)
        r = radius * np.sqrt(rng.random(n))
        th = 2.0 * np.pi * rng.random(n)
        return centers + np.stack([r * np.cos(th), r * np.sin(th)], axis=1)

    def locate(self, pts):
        return self.finder(pts[:, 0], pts[:, 1])


def _mc_reduce(chunks, scale):
    vals = np.concatenate(chunks)
    n = len(vals)
    return Estimate(float(scale * vals.mean()), float(scale * vals.std(ddof=1) / np.sqrt(n)), n)


def _batches(samples, batch):
    full, rest = divmod(samples, batch)
    return [batch] * full + ([rest] if rest else [])


def _mc_diffusion(m, kf, i, k, j, l, samples, sampler, batch):
    sizes = _batches(samples, batch)
    rngs = sampler.streams(len(sizes), (0, i, k, j, l))
    chunks = []
    if i != j:
        for rng, n in zip(rngs, sizes):
            x = sampler.in_cell(rng, i, n)
            y = sampler.in_cell(rng, j, n)
            chunks.append(-eval_scaled(kf, "R", x, y) * _basis(m, i, k, x) * _basis(m, j, l, y))
        return _mc_reduce(chunks, m.areas[i] * m.areas[j] / kf.delta**2)
    for rng, n in zip(rngs, sizes):
        x = sampler.in_cell(rng, i, n)
        y = sampler.in_disk(rng, x, kf.horizon)
        where = sampler.locate(y)
        inside = where >= 0
        same = where == i
        diff = _basis(m, i, l, x) - np.where(same, _basis(m, i, l, y), 0.0)
        chunks.append(np.where(inside, eval_scaled(kf, "R", x, y), 0.0) * _basis(m, i, k, x) * diff)
    return _mc_reduce(chunks, m.areas[i] * np.pi * kf.horizon**2 / kf.delta**2)


def _mc_zero_order(m, kf, i, k, j, l, samples, sampler, batch):
    sizes = _batches(samples, batch)
    rngs = sampler.streams(len(sizes), (1, i, k, j, l))
    chunks = []
    for rng, n in zip(rngs, sizes):
        x = sampler.in_cell(rng, i, n)
        y = sampler.in_cell(rng, j, n)
        chunks.append(eval_scaled(kf, "Rbar", x, y) * _basis(m, i, k, x) * _basis(m, j, l, y))
    return _mc_reduce(chunks, m.areas[i] * m.areas[j])


def _mc_rhs(m, kf, i, k, f_dofs, g, samples, sampler, batch):
    fd = np.asarray(f_dofs).reshape(-1, 3)
    grads, offs = m.basis_arrays()
    sizes = _batches(samples, batch)
    rngs = sampler.streams(len(sizes), (2, i, k))
    chunks = []
    for rng, n in zip(rngs, sizes):
        x = sampler.in_cell(rng, i, n)
        y = sampler.in_disk(rng, x, kf.horizon)
        where = sampler.locate(y)
        c = np.maximum(where, 0)
        fh = np.einsum("nk,nk->n", fd[c], np.einsum("nkd,nd->nk", grads[c], y) + offs[c])
        fh = np.where(where >= 0, fh, 0.0)
        chunks.append(eval_scaled(kf, "Rbar", x, y) * _basis(m, i, k, x) * fh)
    src = _mc_reduce(chunks, m.areas[i] * np.pi * kf.horizon**2)

    seg = m.vertices[m.boundary_edges]
    lengths = np.linalg.norm(seg[:, 1] - seg[:, 0], axis=1)
    total = float(lengths.sum())
    if total == 0.0:
        return src
    cum = np.cumsum(lengths) / total
    rngs = sampler.streams(len(sizes), (3, i, k))
    chunks = []
    for rng, n in zip(rngs, sizes):
        x = sampler.in_cell(rng, i, n)
        e = np.minimum(np.searchsorted(cum, rng.random(n), side="right"), len(seg) - 1)
        t = rng.random(n)[:, None]
        y = seg[e, 0] + t * (seg[e, 1] - seg[e, 0])
        gy = np.asarray(g(y), dtype=float) * np.ones(n)
        chunks.append(eval_scaled(kf, "Rbar", x, y) * _basis(m, i, k, x) * gy)
    bnd = _mc_reduce(chunks, 2.0 * m.areas[i] * total)
    return Estimate(src.value + bnd.value, float(np.hypot(src.stderr, bnd.stderr)), src.samples + bnd.samples)


# --------------------------------------------------------------------------
# public entry points


def _check_mode(mode):
    if mode not in ("tensor", "mc"):
        raise ValueError(f"unknown oracle mode {mode!r}")


def brute_force_diffusion_entry(m: Mesh, kf: KernelFamily, row, col, order: int = 10, mode: str = "tensor",
                                samples: int = 10**6, seed: int = DEFAULT_SEED, batch: int = 10**6) -> Estimate:
    """Diffusion entry ``D[row, col]`` with ``row = (i, k)``, ``col = (j, l)``."""
    _check_mode(mode)
    (i, k), (j, l) = row, col
    if mode == "tensor":
        return Estimate(float(_tensor_diffusion(m, kf, i, k, j, l, order)))
    return _mc_diffusion(m, kf, i, k, j, l, samples, _Sampler(m, seed), batch)


def brute_force_zero_order_entry(m: Mesh, kf: KernelFamily, row, col, order: int = 10, mode: str = "tensor",
                                 samples: int = 10**6, seed: int = DEFAULT_SEED, batch: int = 10**6) -> Estimate:
    _check_mode(mode)
    (i, k), (j, l) = row, col
    if mode == "tensor":
        return Estimate(_tensor_zero_order(m, kf, i, k, j, l, order))
    return _mc_zero_order(m, kf, i, k, j, l, samples, _Sampler(m, seed), batch)


def brute_force_rhs_entry(m: Mesh, kf: KernelFamily, row, f_dofs, g, order: int = 10, mode: str = "tensor",
                          samples: int = 10**6, seed: int = DEFAULT_SEED, batch: int = 10**6,
                          edge_points: int = 16) -> Estimate:
    """Load entry ``b[row]`` for interpolated source dofs ``f_dofs`` and flux ``g``."""
    _check_mode(mode)
    i, k = row
    if mode == "tensor":
        return Estimate(_tensor_rhs(m, kf, i, k, f_dofs, g, order, edge_points))
    return _mc_rhs(m, kf, i, k, f_dofs, g, samples, _Sampler(m, seed), batch)


def brute_force_boundary_entry(m: Mesh, kf: KernelFamily, row, g, order: int = 10, edge_points: int = 16) -> float:
    """Only the boundary part of ``b[row]`` (tensor mode)."""
    return brute_force_rhs_entry(m, kf, row, np.zeros(m.n_dofs), g, order=order, edge_points=edge_points).value
