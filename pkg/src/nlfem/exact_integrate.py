"""Closed-form integrals of radial polynomials over triangle/disk intersections.

The triangle ``T`` is split into the three oriented wedges ``(c, P, Q)``
spanned by the disk centre ``c`` and each counterclockwise edge ``PQ``.
Each wedge clipped to the disk is a union of apex triangles (edge pieces
inside the circle) and circular sectors (edge pieces outside).  On an apex
triangle with perpendicular height ``a`` the monomial ``r^(2k)`` integrates
to ``a^(2k+2)/(2k+2) * int sec^(2k+2)``; the secant powers follow the
reduction recurrence.  Signed wedges make the decomposition valid for any
position of ``c`` relative to ``T``.

The scalar kernels are compiled with numba because assembly evaluates them
at millions of quadrature points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateTriangle, DomainError
from .kernel import KernelFamily, Polynomial

# Perpendicular distance (relative to the radius) below which a wedge is flat.
FLAT_TOL = 1e-12
# Tangency tolerance on rho^2 - a^2, relative to rho^2.
TANGENT_TOL = 1e-12
SNAP_TOL = 1e-12


# --------------------------------------------------------------------------
# compiled kernels; all lengths are in units of the disk radius


@njit(cache=True)
def _apex_into(a, u0, u1, kmax, sign, out):
    # G_n(u) = a^n F_n(theta) with tan(theta) = u / a, sec(theta) = r / a:
    #   G_2 = a u,  G_n = (a u r^(n-2) + (n-2) a^2 G_(n-2)) / (n-1)
    r0 = math.sqrt(a * a + u0 * u0)
    r1 = math.sqrt(a * a + u1 * u1)
    g0 = a * u0
    g1 = a * u1
    p0 = 1.0
    p1 = 1.0
    out[0] += sign * (g1 - g0) * 0.5
    for k in range(1, kmax + 1):
        n = 2 * k + 2
        p0 *= r0 * r0
        p1 *= r1 * r1
        g0 = (a * u0 * p0 + (n - 2) * a * a * g0) / (n - 1)
        g1 = (a * u1 * p1 + (n - 2) * a * a * g1) / (n - 1)
        out[k] += sign * (g1 - g0) / n


@njit(cache=True)
def _sector_into(dtheta, kmax, sign, out):
    # unit radius: int r^(2k) over a sector = dtheta / (2k + 2)
    for k in range(kmax + 1):
        out[k] += sign * dtheta / (2 * k + 2)


@njit(cache=True)
def _angle_between(u0, u1, a):
    # atan(u1 / a) - atan(u0 / a) with one atan2; both angles lie in (-pi/2, pi/2)
    return math.atan2(a * (u1 - u0), a * a + u0 * u1)


@njit(cache=True)
def _wedge_into(px, py, qx, qy, kmax, out):
    """Add the signed unit-disk wedge moments of (0, P, Q) to ``out``."""
    dx = qx - px
    dy = qy - py
    length = math.sqrt(dx * dx + dy * dy)
    if length == 0.0:
        return
    cross = px * qy - py * qx
    a = abs(cross) / length
    if a <= FLAT_TOL:
        return
    sign = 1.0 if cross > 0.0 else -1.0
    # signed positions of P and Q along the edge line, measured from the foot
    s0 = (px * dx + py * dy) / length
    s1 = s0 + length
    h2 = 1.0 - a * a
    if h2 <= TANGENT_TOL:
        _sector_into(_angle_between(s0, s1, a), kmax, sign, out)
        return
    h = math.sqrt(h2)
    if abs(s0 + h) <= SNAP_TOL:
        s0 = -h
    if abs(s1 - h) <= SNAP_TOL:
        s1 = h
    lo = max(s0, -h)
    hi = min(s1, h)
    if hi > lo:
        _apex_into(a, lo, hi, kmax, sign, out)
    if s0 < -h:
        e = min(s1, -h)
        _sector_into(_angle_between(s0, e, a), kmax, sign, out)
    if s1 > h:
        b = max(s0, h)
        _sector_into(_angle_between(b, s1, a), kmax, sign, out)


@njit(cache=True)
def _outside_reach(cx, cy, tri, rho):
    # exact test for dist(c, T) >= rho, so the moments are exactly zero there
    inside = True
    for e in range(3):
        f = (e + 1) % 3
        ex = tri[f, 0] - tri[e, 0]
        ey = tri[f, 1] - tri[e, 1]
        px = cx - tri[e, 0]
        py = cy - tri[e, 1]
        if ex * py - ey * px < 0.0:
            inside = False
        t = (px * ex + py * ey) / (ex * ex + ey * ey)
        t = min(max(t, 0.0), 1.0)
        if math.hypot(px - t * ex, py - t * ey) < rho:
            return False
    return not inside


@njit(cache=True)
def triangle_moments(cx, cy, tri, rho, kmax, out):
    """Fill ``out[k] = int_{T cap B(c, rho)} (|y - c| / rho)^(2k) dy``.

    ``tri`` is a (3, 2) array of counterclockwise vertices.
    """
    for k in range(kmax + 1):
        out[k] = 0.0
    gx = (tri[0, 0] + tri[1, 0] + tri[2, 0]) / 3.0
    gy = (tri[0, 1] + tri[1, 1] + tri[2, 1]) / 3.0
    reach = 0.0
    for v in range(3):
        d = math.hypot(tri[v, 0] - gx, tri[v, 1] - gy)
        if d > reach:
            reach = d
    if math.hypot(cx - gx, cy - gy) >= rho + reach:
        return
    if _outside_reach(cx, cy, tri, rho):
        return
    inv = 1.0 / rho
    for e in range(3):
        f = (e + 1) % 3
        _wedge_into(
            (tri[e, 0] - cx) * inv,
            (tri[e, 1] - cy) * inv,
            (tri[f, 0] - cx) * inv,
            (tri[f, 1] - cy) * inv,
            kmax,
            out,
        )
    r2 = rho * rho
    for k in range(kmax + 1):
        out[k] *= r2


@njit(cache=True)
def _many_centers(centers, tri, rho, weights, result):
    kmax = weights.shape[1] - 1
    mom = np.empty(kmax + 1)
    for m in range(centers.shape[0]):
        triangle_moments(centers[m, 0], centers[m, 1], tri, rho, kmax, mom)
        for t in range(weights.shape[0]):
            acc = 0.0
            for k in range(kmax + 1):
                acc += weights[t, k] * mom[k]
            result[m, t] = acc


# --------------------------------------------------------------------------
# public scalar API


def _sec_antiderivative(n: int, theta: float) -> float:
    t = math.tan(theta)
    s = 1.0 / math.cos(theta)
    if n % 2:
        value, m = math.asinh(t), 1  # asinh(tan) = ln|sec + tan|
    else:
        value, m = t, 2
    while m < n:
        m += 2
        value = s ** (m - 2) * t / (m - 1) + (m - 2) / (m - 1) * value
    return value


def secant_power_integral(n: int, theta0: float, theta1: float) -> float:
    """``int_theta0^theta1 sec(t)^n dt`` by the reduction recurrence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    half = 0.5 * math.pi
    for th in (theta0, theta1):
        if not abs(th) < half - 1e-9:
            raise DomainError(f"angle {th!r} is not inside (-pi/2, pi/2)")
    return _sec_antiderivative(n, theta1) - _sec_antiderivative(n, theta0)


def apex_triangle_monomial(k: int, a: float, theta0: float, theta1: float) -> float:
    """``int r^(2k)`` over the triangle with apex at the origin, opposite edge
    on a line at distance ``a``, spanning polar angles ``[theta0, theta1]``
    measured from the perpendicular foot."""
    n = 2 * k + 2
    return a**n / n * secant_power_integral(n, theta0, theta1)


@dataclass(frozen=True)
class Wedge:
    center: tuple
    p: tuple
    q: tuple
    rho: float

    def orientation(self) -> float:
        (cx, cy), (px, py), (qx, qy) = self.center, self.p, self.q
        return float(np.sign((px - cx) * (qy - cy) - (py - cy) * (qx - cx)))


def wedge_monomial(w: Wedge, k: int) -> float:
    """Signed ``int |x - c|^(2k)`` over triangle (c, P, Q) clipped to B(c, rho)."""
    if w.rho <= 0.0:
        return 0.0
    out = np.zeros(k + 1)
    cx, cy = w.center
    inv = 1.0 / w.rho
    _wedge_into(
        (w.p[0] - cx) * inv, (w.p[1] - cy) * inv,
        (w.q[0] - cx) * inv, (w.q[1] - cy) * inv,
        k, out,
    )
    return float(out[k] * w.rho ** (2 * k + 2))


def _ccw_triangle(T) -> np.ndarray:
    tri = np.array(T, dtype=float).reshape(3, 2)
    e1 = tri[1] - tri[0]
    e2 = tri[2] - tri[0]
    area2 = e1[0] * e2[1] - e1[1] * e2[0]
    scale2 = float(np.sum((tri.max(axis=0) - tri.min(axis=0)) ** 2))
    if abs(area2) * 0.5 < 1e-14 * scale2 or scale2 == 0.0:
        raise DegenerateTriangle(f"triangle {tri.tolist()} is degenerate")
    if area2 < 0:
        tri = tri[[0, 2, 1]]
    return np.ascontiguousarray(tri)


def triangle_disk_poly(p: Polynomial, delta: float, c, T) -> float:
    """``int_{T cap B(c, 2 delta)} p(|y - c|^2 / (4 delta^2)) dy``."""
    tri = _ccw_triangle(T)
    coeffs = p.as_array()
    mom = np.empty(len(coeffs))
    triangle_moments(float(c[0]), float(c[1]), tri, 2.0 * delta, len(coeffs) - 1, mom)
    return float(np.dot(coeffs, mom))


def tier_weights(kf: KernelFamily) -> np.ndarray:
    """(3, K+1) weights turning unit-radius moments into (U, P, Q)."""
    n = kf.max_degree + 1
    return np.ascontiguousarray(np.vstack([kf.scaled_weights(t, n) for t in ("R", "Rbar", "Rbarbar")]))


def kernel_triangle_integrals(kf: KernelFamily, c, T) -> tuple:
    """``(U, P, Q)``: the integrals over ``T`` of ``R_delta``, ``Rbar_delta``
    and ``Rbarbar_delta`` with one argument fixed at ``c``."""
    tri = _ccw_triangle(T)
    res = np.empty((1, 3))
    _many_centers(np.array([[float(c[0]), float(c[1])]]), tri, kf.horizon, tier_weights(kf), res)
    return tuple(float(v) for v in res[0])


def kernel_triangle_integrals_many(kf: KernelFamily, centers, T) -> np.ndarray:
    """Vectorised :func:`kernel_triangle_integrals`; returns an (M, 3) array."""
    tri = _ccw_triangle(T)
    centers = np.ascontiguousarray(np.asarray(centers, dtype=float).reshape(-1, 2))
    res = np.empty((centers.shape[0], 3))
    _many_centers(centers, tri, kf.horizon, tier_weights(kf), res)
    return res
