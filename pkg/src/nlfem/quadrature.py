"""Quadrature rules for the outer (numerical) integrals of the assembly."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._triangle_tables import TRIANGLE_TABLES
from .errors import DegenerateGeometry, UnsupportedOrder

MAX_SEGMENT_POINTS = 16
MAX_TRIANGLE_DEGREE = 12

# Requested degree -> shipped table; degrees 3, 7 and 11 reuse the next
# higher rule because the minimal symmetric rules there have negative weights.
_TABLE_FOR_DEGREE = {2: 2, 3: 4, 4: 4, 5: 5, 6: 6, 7: 8, 8: 8, 9: 9, 10: 10, 11: 12, 12: 12}


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray  # (n,) on [-1, 1] or (n, 2) on the reference triangle
    weights: np.ndarray
    degree: int

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class QuadratureConfig:
    """Orders used for the outer integrals of the assembly."""

    edge_points: int = 8
    tri_degree: int = 6

    def segment(self) -> QuadratureRule:
        return gauss_segment(self.edge_points)

    def triangle(self) -> QuadratureRule:
        return triangle_rule(self.tri_degree)

    def refined(self) -> "QuadratureConfig":
        return QuadratureConfig(
            edge_points=min(2 * self.edge_points, MAX_SEGMENT_POINTS),
            tri_degree=min(2 * self.tri_degree, MAX_TRIANGLE_DEGREE),
        )


@lru_cache(maxsize=None)
def gauss_segment(npoints: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1], exact to degree ``2 npoints - 1``."""
    if not isinstance(npoints, (int, np.integer)) or not 1 <= npoints <= MAX_SEGMENT_POINTS:
        raise UnsupportedOrder(f"segment rule with {npoints!r} points is not available (1..{MAX_SEGMENT_POINTS})")
    x, w = leggauss(int(npoints))
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, 2 * int(npoints) - 1)


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadratureRule:
    """Symmetric rule on the unit right triangle exact to total ``degree``."""
    if not isinstance(degree, (int, np.integer)) or not 1 <= degree <= MAX_TRIANGLE_DEGREE:
        raise UnsupportedOrder(f"triangle rule of degree {degree!r} is not available (1..{MAX_TRIANGLE_DEGREE})")
    if degree == 1:
        nodes = np.array([[1.0 / 3.0, 1.0 / 3.0]])
        weights = np.array([0.5])
    else:
        table = np.array(TRIANGLE_TABLES[_TABLE_FOR_DEGREE[int(degree)]])
        nodes, weights = table[:, :2].copy(), table[:, 2].copy()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, int(degree))


def map_rule(rule: QuadratureRule, geometry) -> tuple[np.ndarray, np.ndarray]:
    """Affine image of ``rule`` on a segment ``(A, B)`` or triangle ``(A, B, C)``.

    Returns physical nodes of shape (n, 2) and weights scaled by the
    Jacobian (segment half-length, or twice the triangle area).
    """
    g = np.asarray(geometry, dtype=float)
    if g.shape == (2, 2):
        if rule.nodes.ndim != 1:
            raise ValueError("segment geometry needs a segment rule")
        a, b = g
        half = 0.5 * np.linalg.norm(b - a)
        if half == 0.0:
            raise DegenerateGeometry("zero-length segment")
        t = 0.5 * (rule.nodes + 1.0)
        return a + t[:, None] * (b - a), rule.weights * half
    if g.shape == (3, 2):
        if rule.nodes.ndim != 2:
            raise ValueError("triangle geometry needs a triangle rule")
        a, b, c = g
        jac = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        scale = float(np.sum((g.max(axis=0) - g.min(axis=0)) ** 2))
        if jac * 0.5 <= 1e-14 * scale:
            raise DegenerateGeometry("degenerate triangle")
        xi, eta = rule.nodes[:, 0], rule.nodes[:, 1]
        pts = a + xi[:, None] * (b - a) + eta[:, None] * (c - a)
        return pts, rule.weights * jac
    raise ValueError(f"geometry of shape {g.shape} is neither a segment nor a triangle")
