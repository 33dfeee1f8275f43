"""Segment splitting at the kinks of compactly supported kernel integrals.

A point ``x`` on a segment sees ``B(x, rho)`` start or stop touching a
polygon feature where ``|x - v| = rho`` for a vertex ``v`` or where ``x`` is
at distance ``rho`` from an edge with its foot inside the edge.  Those
parameters split the segment into pieces on which the integrand is smooth.

The two kinds of breakpoint differ.  Across a vertex circle the integrand
is analytic on either side, so plain Gauss rules converge spectrally.  An
edge contact adds a circular segment of area ~ d^(3/2) (d the penetration
depth), so the integrand has a square-root branch at that end of the piece.
Breakpoints carry a flag, and flagged ends get the Gauss rule composed with
a map whose derivative vanishes there (``t ~ u^2``), which restores
analyticity.
"""
import math

import numpy as np
from numba import njit

EPS_T = 1e-12
MAX_BREAKS = 16
ON_LINE_TOL = 1e-10
CIRCLE_FLAG = 1

# rule variants: index 2 * (left end singular) + (right end singular)
PLAIN, RIGHT, LEFT, BOTH = 0, 1, 2, 3


@njit(cache=True)
def endpoint_rules(gx, gw, rx, rw):
    """Fill the four (plain / right / left / both-sided) variants of a rule on [0, 1]."""
    for q in range(gx.shape[0]):
        u = gx[q]
        w = gw[q]
        rx[PLAIN, q] = u
        rw[PLAIN, q] = w
        # left end: t = u^2 (2 - u)
        rx[LEFT, q] = u * u * (2.0 - u)
        rw[LEFT, q] = w * u * (4.0 - 3.0 * u)
        # right end: mirror image
        v = 1.0 - u
        rx[RIGHT, q] = 1.0 - v * v * (2.0 - v)
        rw[RIGHT, q] = w * v * (4.0 - 3.0 * v)
        # both ends: t = 3u^2 - 2u^3
        rx[BOTH, q] = u * u * (3.0 - 2.0 * u)
        rw[BOTH, q] = w * 6.0 * u * (1.0 - u)


def make_rules(gx, gw):
    rx = np.empty((4, len(gx)))
    rw = np.empty((4, len(gx)))
    endpoint_rules(np.ascontiguousarray(gx, dtype=float), np.ascontiguousarray(gw, dtype=float), rx, rw)
    return rx, rw


@njit(cache=True)
def _insert_sorted(buf, flg, n, t, f):
    # entries closer than EPS_T are merged; a merged end is singular if either is
    for i in range(n):
        if abs(buf[i] - t) <= EPS_T:
            flg[i] = max(flg[i], f)
            return n
    i = n
    while i > 0 and buf[i - 1] > t:
        buf[i] = buf[i - 1]
        flg[i] = flg[i - 1]
        i -= 1
    buf[i] = t
    flg[i] = f
    return n + 1


@njit(cache=True)
def on_offset(px, py, poly, npoly, closed, rho):
    """True if P lies on a segment offset by rho from an edge of ``poly``."""
    nedges = npoly if closed else npoly - 1
    for e in range(nedges):
        f = (e + 1) % npoly
        lx = poly[f, 0] - poly[e, 0]
        ly = poly[f, 1] - poly[e, 1]
        ll = lx * lx + ly * ly
        if ll == 0.0:
            continue
        qx = px - poly[e, 0]
        qy = py - poly[e, 1]
        dist = abs(qx * ly - qy * lx) / math.sqrt(ll)
        s = (qx * lx + qy * ly) / ll
        if abs(dist - rho) <= ON_LINE_TOL * rho and -ON_LINE_TOL <= s <= 1.0 + ON_LINE_TOL:
            return True
    return False


@njit(cache=True)
def kink_breaks(ax, ay, bx, by, poly, npoly, closed, rho, buf, flg):
    """Sorted parameters in [0, 1] splitting segment AB where the kernel
    support circle of a point on AB passes a vertex of ``poly`` or touches
    one of its edges.  ``flg`` marks edge contacts (square-root ends).
    Returns the number of entries written to ``buf``."""
    buf[0] = 0.0
    flg[0] = 1 if on_offset(ax, ay, poly, npoly, closed, rho) else 0
    n = 1
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        buf[1] = 1.0
        flg[1] = 0
        return 2
    for v in range(npoly):
        ex = ax - poly[v, 0]
        ey = ay - poly[v, 1]
        bq = dx * ex + dy * ey
        cq = ex * ex + ey * ey - rho * rho
        disc = bq * bq - dd * cq
        if disc > 0.0:
            sq = math.sqrt(disc)
            t = (-bq - sq) / dd
            if EPS_T < t < 1.0 - EPS_T:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
            t = (-bq + sq) / dd
            if EPS_T < t < 1.0 - EPS_T:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
    nedges = npoly if closed else npoly - 1
    for e in range(nedges):
        f = (e + 1) % npoly
        vx = poly[e, 0]
        vy = poly[e, 1]
        lx = poly[f, 0] - vx
        ly = poly[f, 1] - vy
        ll = lx * lx + ly * ly
        if ll == 0.0:
            continue
        length = math.sqrt(ll)
        nx = ly / length
        ny = -lx / length
        nd = nx * dx + ny * dy
        if nd == 0.0:
            continue
        base = nx * (ax - vx) + ny * (ay - vy)
        for side in range(2):
            off = rho if side == 0 else -rho
            t = (off - base) / nd
            if EPS_T < t < 1.0 - EPS_T:
                px = ax + t * dx - vx
                py = ay + t * dy - vy
                s = (px * lx + py * ly) / ll
                if 0.0 <= s <= 1.0:
                    n = _insert_sorted(buf, flg, n, t, 1)
    buf[n] = 1.0
    flg[n] = 1 if on_offset(bx, by, poly, npoly, closed, rho) else 0
    return n + 1


@njit(cache=True)
def circle_breaks(ax, ay, bx, by, cx, cy, rho, buf, flg):
    """Breakpoints of AB at its crossings of the circle |x - c| = rho."""
    buf[0] = 0.0
    flg[0] = 0
    n = 1
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd > 0.0:
        ex = ax - cx
        ey = ay - cy
        bq = dx * ex + dy * ey
        cq = ex * ex + ey * ey - rho * rho
        disc = bq * bq - dd * cq
        if disc > 0.0:
            sq = math.sqrt(disc)
            t = (-bq - sq) / dd
            if EPS_T < t < 1.0 - EPS_T:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
            t = (-bq + sq) / dd
            if EPS_T < t < 1.0 - EPS_T:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
    buf[n] = 1.0
    flg[n] = 0
    return n + 1


@njit(cache=True)
def segment_nodes(ax, ay, bx, by, breaks, flg, nbreaks, rx, rw, px, py, pt, pw):
    """Composite Gauss nodes on AB over the pieces given by ``breaks``."""
    length = math.hypot(bx - ax, by - ay)
    ng = rx.shape[1]
    m = 0
    for s in range(nbreaks - 1):
        t0 = breaks[s]
        h = breaks[s + 1] - t0
        if h <= 0.0:
            continue
        kind = 2 * flg[s] + flg[s + 1]
        for q in range(ng):
            t = t0 + h * rx[kind, q]
            pt[m] = t
            px[m] = ax + t * (bx - ax)
            py[m] = ay + t * (by - ay)
            pw[m] = rw[kind, q] * h * length
            m += 1
    return m
