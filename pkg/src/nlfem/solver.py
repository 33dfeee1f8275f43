"""Jacobi-preconditioned conjugate gradients and discrete error norms."""
from __future__ import annotations

import sys
from typing import Callable, NamedTuple, Optional, TextIO

import numpy as np
import scipy.sparse as sp

from .assembly import ScalarField, interpolate
from .errors import NonSymmetric, NotConverged, ZeroDiagonal
from .mesh import Mesh
from .quadrature import QuadratureConfig

SYMMETRY_TOL = 1e-10


class CGResult(NamedTuple):
    solution: np.ndarray
    iterations: int
    residual: float


def check_symmetric(S: sp.spmatrix, tol: float = SYMMETRY_TOL) -> None:
    S = sp.csr_matrix(S)
    scale = abs(S).max() if S.nnz else 0.0
    diff = abs(S - S.T).max() if S.nnz else 0.0
    if diff > tol * scale:
        raise NonSymmetric(f"max |S - S^T| = {diff:.3e} exceeds {tol:g} * max |S| = {tol * scale:.3e}")


def conjugate_gradient(S, b, tol: float = 1e-10, maxiter: Optional[int] = None, verbose: bool = False,
                       stream: TextIO | None = None,
                       callback: Optional[Callable[[int, np.ndarray], None]] = None) -> CGResult:
    """Solve ``S c = b`` for symmetric positive definite ``S``.

    Stops once ``||S c - b||_2 <= tol * ||b||_2``.  ``callback(k, c)`` sees
    every iterate (``k = 0`` is the zero start).  With ``verbose`` one line
    ``iter <k> relres <value>`` per iteration goes to ``stream`` (stdout by
    default).
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    S = sp.csr_matrix(S)
    b = np.asarray(b, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: S {S.shape}, b {b.shape}")
    if maxiter is None:
        maxiter = 20 * n
    check_symmetric(S)
    diag = S.diagonal()
    if np.any(diag == 0.0):
        raise ZeroDiagonal(f"zero diagonal at row {int(np.argmax(diag == 0.0))}")
    out = stream if stream is not None else sys.stdout
    inv_diag = 1.0 / diag

    x = np.zeros(n)
    bnorm = float(np.linalg.norm(b))
    if callback is not None:
        callback(0, x)
    if bnorm == 0.0:
        return CGResult(x, 0, 0.0)
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    relres = 1.0
    for k in range(1, maxiter + 1):
        Sp = S @ p
        alpha = rz / float(p @ Sp)
        x += alpha * p
        r -= alpha * Sp
        relres = float(np.linalg.norm(r)) / bnorm
        if verbose:
            print(f"iter {k} relres {relres:.6e}", file=out)
        if callback is not None:
            callback(k, x)
        if relres <= tol:
            return CGResult(x, k, relres)
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NotConverged(maxiter, relres)


def reconstruct(c: np.ndarray, m: Mesh, q: QuadratureConfig | None = None):
    """Quadrature points of every cell and the discrete field at them."""
    q = q or QuadratureConfig()
    rule = q.triangle()
    xi, eta = rule.nodes[:, 0], rule.nodes[:, 1]
    bary = np.stack([1.0 - xi - eta, xi, eta], axis=1)  # (nq, 3)
    tri = m.cell_coords()  # (N, 3, 2)
    pts = np.einsum("qk,nkd->nqd", bary, tri)
    vals = np.asarray(c, dtype=float).reshape(-1, 3) @ bary.T  # (N, nq)
    weights = 2.0 * rule.weights[None, :] * m.areas[:, None]
    return pts, vals, weights


def error_norms(c, exact: ScalarField, m: Mesh, q: QuadratureConfig | None = None) -> tuple[float, float]:
    """``(L2, Linf)`` of ``sum_k c_ik phi_ik - exact``.

    L2 uses the triangle rule of ``q``; Linf is taken over the vertex values
    of every cell.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (m.n_dofs,):
        raise ValueError(f"expected {m.n_dofs} coefficients, got {c.shape}")
    pts, vals, weights = reconstruct(c, m, q)
    flat = pts.reshape(-1, 2)
    ref = (np.asarray(exact(flat), dtype=float) * np.ones(len(flat))).reshape(vals.shape)
    l2 = float(np.sqrt(np.sum(weights * (vals - ref) ** 2)))
    vert = interpolate(exact, m)
    linf = float(np.max(np.abs(c - vert))) if len(c) else 0.0
    return l2, linf
