"""Kink-aware iterated quadrature over a triangle.

A function ``F(x) = int_S K(|x - y|) dy`` with a compactly supported kernel of
radius ``rho`` is piecewise analytic in ``x``.  Its kink set consists of the
circles of radius ``rho`` about the vertices of ``S`` and the segments offset
by ``+-rho`` from its edges.  Fixed triangle rules lose accuracy on cells
crossed by that set, so the target triangle is cut into strips at every
event of the kink set (tangencies, crossings of the cell boundary, mutual
intersections) and each chord of a strip is split where it crosses the set.
Pieces ending at a tangency or an edge contact (square-root behaviour) use
the endpoint-mapped Gauss variants of ``_segments``; all other pieces use
the plain rule.
"""
import math

import numpy as np
from numba import njit

from ._segments import CIRCLE_FLAG, EPS_T, MAX_BREAKS, ON_LINE_TOL, _insert_sorted

MAX_EVENTS = 160
INSIDE_TOL = 1e-12


@njit(cache=True)
def _inside(tri, x, y, scale):
    tol = INSIDE_TOL * scale
    for e in range(3):
        f = (e + 1) % 3
        ex = tri[f, 0] - tri[e, 0]
        ey = tri[f, 1] - tri[e, 1]
        length = math.hypot(ex, ey)
        if (ex * (y - tri[e, 1]) - ey * (x - tri[e, 0])) / length < -tol:
            return False
    return True


@njit(cache=True)
def _push(buf, flg, n, v, f, lo, hi):
    if lo < v < hi and n < buf.shape[0] - 1:
        buf[n] = v
        flg[n] = f
        return n + 1
    return n


@njit(cache=True)
def _offset_segments(src, rho, segs):
    # segs[s] = (ax, ay, bx, by): the two offsets of each edge of src
    for e in range(3):
        f = (e + 1) % 3
        lx = src[f, 0] - src[e, 0]
        ly = src[f, 1] - src[e, 1]
        length = math.hypot(lx, ly)
        nx = ly / length * rho
        ny = -lx / length * rho
        for side in range(2):
            sg = 1.0 if side == 0 else -1.0
            s = 2 * e + side
            segs[s, 0] = src[e, 0] + sg * nx
            segs[s, 1] = src[e, 1] + sg * ny
            segs[s, 2] = src[f, 0] + sg * nx
            segs[s, 3] = src[f, 1] + sg * ny


@njit(cache=True)
def _seg_circle(ax, ay, bx, by, cx, cy, rho, out):
    """Points of segment AB on the circle; returns their count (<= 2)."""
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return 0
    ex = ax - cx
    ey = ay - cy
    bq = dx * ex + dy * ey
    cq = ex * ex + ey * ey - rho * rho
    disc = bq * bq - dd * cq
    if disc < 0.0:
        return 0
    sq = math.sqrt(disc)
    n = 0
    for sgn in (-1.0, 1.0):
        t = (-bq + sgn * sq) / dd
        if -EPS_T <= t <= 1.0 + EPS_T:
            out[n, 0] = ax + t * dx
            out[n, 1] = ay + t * dy
            n += 1
    return n


@njit(cache=True)
def _seg_seg(a, b, out):
    """Intersection point of segments a and b (rows ax, ay, bx, by)."""
    rx = a[2] - a[0]
    ry = a[3] - a[1]
    sx = b[2] - b[0]
    sy = b[3] - b[1]
    den = rx * sy - ry * sx
    if den == 0.0:
        return 0
    qx = b[0] - a[0]
    qy = b[1] - a[1]
    t = (qx * sy - qy * sx) / den
    u = (qx * ry - qy * rx) / den
    if -EPS_T <= t <= 1.0 + EPS_T and -EPS_T <= u <= 1.0 + EPS_T:
        out[0, 0] = a[0] + t * rx
        out[0, 1] = a[1] + t * ry
        return 1
    return 0


@njit(cache=True)
def _circle_circle(c0x, c0y, c1x, c1y, rho, out):
    dx = c1x - c0x
    dy = c1y - c0y
    d = math.hypot(dx, dy)
    if d == 0.0 or d >= 2.0 * rho:
        return 0
    h = math.sqrt(rho * rho - 0.25 * d * d)
    mx = c0x + 0.5 * dx
    my = c0y + 0.5 * dy
    out[0, 0] = mx - h * dy / d
    out[0, 1] = my + h * dx / d
    out[1, 0] = mx + h * dy / d
    out[1, 1] = my - h * dx / d
    return 2


@njit(cache=True)
def triangle_features(src, rho, cen, segs, owner):
    """Kink features of a triangle source: its vertices as circle centres and
    the six offsets of its edges; ``owner`` holds the circles at each
    segment's ends (the segment meets them tangentially)."""
    for v in range(3):
        cen[v, 0] = src[v, 0]
        cen[v, 1] = src[v, 1]
    _offset_segments(src, rho, segs)
    for e in range(3):
        for side in range(2):
            owner[2 * e + side, 0] = e
            owner[2 * e + side, 1] = (e + 1) % 3


@njit(cache=True)
def _middle(tgt, v, dx, dy):
    """True if the line through vertex v along d enters the triangle, i.e.
    v is neither the first nor the last vertex in the normal coordinate."""
    a = (v + 1) % 3
    b = (v + 2) % 3
    e1x = tgt[a, 0] - tgt[v, 0]
    e1y = tgt[a, 1] - tgt[v, 1]
    e2x = tgt[b, 0] - tgt[v, 0]
    e2y = tgt[b, 1] - tgt[v, 1]
    c1 = e1x * dy - e1y * dx
    c2 = dx * e2y - dy * e2x
    return c1 * c2 > 0.0


@njit(cache=True)
def _direction(base, segs, ns, tgt, vflag):
    """Chord direction near angle ``base``.

    It is kept away from the directions of the offset segments (a segment
    parallel to the chords would make the chord integral jump) and, for
    vertices of ``tgt`` lying on the kink set (``vflag``), away from their
    angle: such a vertex must come first or last across the chords, else
    chords passing next to it see the singularity just beyond their end.
    Every direction lies inside the angle of exactly one vertex, so the
    second condition can be met whenever a vertex is unflagged."""
    best = base
    best_score = -2.0
    for c in range(24):
        k = (c + 1) // 2
        ang = base + (0.1309 * k if c % 2 == 1 else -0.1309 * k)
        dx = math.cos(ang)
        dy = math.sin(ang)
        score = 1.0
        for s in range(ns):
            lx = segs[s, 2] - segs[s, 0]
            ly = segs[s, 3] - segs[s, 1]
            ll = math.hypot(lx, ly)
            if ll == 0.0:
                continue
            v = abs(dx * ly - dy * lx) / ll
            if v < score:
                score = v
        for v in range(3):
            if vflag[v] and _middle(tgt, v, dx, dy):
                score -= 1.0
                break
        if score > 0.3:
            return dx, dy
        if score > best_score:
            best_score = score
            best = ang
    return math.cos(best), math.sin(best)


@njit(cache=True)
def _on_segments(px, py, segs, ns, rho):
    for s in range(ns):
        lx = segs[s, 2] - segs[s, 0]
        ly = segs[s, 3] - segs[s, 1]
        ll = lx * lx + ly * ly
        if ll == 0.0:
            continue
        qx = px - segs[s, 0]
        qy = py - segs[s, 1]
        dist = abs(qx * ly - qy * lx) / math.sqrt(ll)
        t = (qx * lx + qy * ly) / ll
        if dist <= ON_LINE_TOL * rho and -ON_LINE_TOL <= t <= 1.0 + ON_LINE_TOL:
            return True
    return False


@njit(cache=True)
def _events(tgt, cen, nc, segs, ns, owner, rho, nx, ny, lo, hi, buf, flg):
    """Sorted normal coordinates where the chord integral is not analytic;
    ``flg`` marks square-root events (tangencies and edge contacts)."""
    scale = hi - lo
    raw = np.empty(MAX_EVENTS)
    rf = np.empty(MAX_EVENTS, dtype=np.int64)
    n = 0
    flo = 0
    fhi = 0
    for v in range(3):
        # a vertex on an offset segment ends an edge that touches it
        f = 1 if _on_segments(tgt[v, 0], tgt[v, 1], segs, ns, rho) else 0
        e = tgt[v, 0] * nx + tgt[v, 1] * ny
        if e <= lo:
            flo = max(flo, f)
        elif e >= hi:
            fhi = max(fhi, f)
        n = _push(raw, rf, n, e, f, lo, hi)
    pts = np.empty((2, 2))
    edges = np.empty((3, 4))
    for e in range(3):
        f = (e + 1) % 3
        edges[e, 0] = tgt[e, 0]
        edges[e, 1] = tgt[e, 1]
        edges[e, 2] = tgt[f, 0]
        edges[e, 3] = tgt[f, 1]
    for c in range(nc):
        cx = cen[c, 0]
        cy = cen[c, 1]
        # the chords become tangent to the circle
        for sg in (-1.0, 1.0):
            px = cx + sg * rho * nx
            py = cy + sg * rho * ny
            if _inside(tgt, px, py, scale):
                n = _push(raw, rf, n, px * nx + py * ny, 1, lo, hi)
        for e in range(3):
            k = _seg_circle(edges[e, 0], edges[e, 1], edges[e, 2], edges[e, 3], cx, cy, rho, pts)
            for q in range(k):
                n = _push(raw, rf, n, pts[q, 0] * nx + pts[q, 1] * ny, CIRCLE_FLAG, lo, hi)
        for s in range(ns):
            if owner[s, 0] == c or owner[s, 1] == c:
                continue  # tangent at the segment's own end, already an event
            k = _seg_circle(segs[s, 0], segs[s, 1], segs[s, 2], segs[s, 3], cx, cy, rho, pts)
            for q in range(k):
                if _inside(tgt, pts[q, 0], pts[q, 1], scale):
                    n = _push(raw, rf, n, pts[q, 0] * nx + pts[q, 1] * ny, 1, lo, hi)
        for c2 in range(c + 1, nc):
            k = _circle_circle(cx, cy, cen[c2, 0], cen[c2, 1], rho, pts)
            for q in range(k):
                if _inside(tgt, pts[q, 0], pts[q, 1], scale):
                    n = _push(raw, rf, n, pts[q, 0] * nx + pts[q, 1] * ny, CIRCLE_FLAG, lo, hi)
    for s in range(ns):
        for end in range(2):
            px = segs[s, 2 * end]
            py = segs[s, 2 * end + 1]
            if _inside(tgt, px, py, scale):
                n = _push(raw, rf, n, px * nx + py * ny, 1, lo, hi)
        for e in range(3):
            if _seg_seg(segs[s], edges[e], pts) == 1:
                n = _push(raw, rf, n, pts[0, 0] * nx + pts[0, 1] * ny, 1, lo, hi)
        for s2 in range(s + 1, ns):
            if _seg_seg(segs[s], segs[s2], pts) == 1:
                if _inside(tgt, pts[0, 0], pts[0, 1], scale):
                    n = _push(raw, rf, n, pts[0, 0] * nx + pts[0, 1] * ny, 1, lo, hi)
    order = np.argsort(raw[:n])
    tol = 1e-12 * scale
    buf[0] = lo
    flg[0] = flo
    m = 1
    for q in range(n):
        v = raw[order[q]]
        f = rf[order[q]]
        if v - buf[m - 1] > tol:
            buf[m] = v
            flg[m] = f
            m += 1
        elif f > flg[m - 1]:
            flg[m - 1] = f
    if hi - buf[m - 1] > tol:
        buf[m] = hi
        flg[m] = fhi
        m += 1
    else:
        buf[m - 1] = hi
        flg[m - 1] = max(flg[m - 1], fhi)
    return m


@njit(cache=True)
def feature_breaks(ax, ay, bx, by, cen, nc, segs, ns, rho, buf, flg):
    """Sorted parameters in [0, 1] where segment AB crosses a feature circle
    or offset segment; crossings of segments and ends lying on one are
    flagged as square-root ends.  Returns the number of entries."""
    buf[0] = 0.0
    flg[0] = 1 if _on_segments(ax, ay, segs, ns, rho) else 0
    n = 1
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        buf[1] = 1.0
        flg[1] = 0
        return 2
    cap = buf.shape[0] - 1
    for c in range(nc):
        ex = ax - cen[c, 0]
        ey = ay - cen[c, 1]
        bq = dx * ex + dy * ey
        cq = ex * ex + ey * ey - rho * rho
        disc = bq * bq - dd * cq
        if disc > 0.0:
            sq = math.sqrt(disc)
            t = (-bq - sq) / dd
            if EPS_T < t < 1.0 - EPS_T and n < cap:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
            t = (-bq + sq) / dd
            if EPS_T < t < 1.0 - EPS_T and n < cap:
                n = _insert_sorted(buf, flg, n, t, CIRCLE_FLAG)
    for s in range(ns):
        sx = segs[s, 2] - segs[s, 0]
        sy = segs[s, 3] - segs[s, 1]
        den = dx * sy - dy * sx
        if den == 0.0:
            continue
        qx = segs[s, 0] - ax
        qy = segs[s, 1] - ay
        t = (qx * sy - qy * sx) / den
        u = (qx * dy - qy * dx) / den
        if EPS_T < t < 1.0 - EPS_T and 0.0 <= u <= 1.0 and n < cap:
            n = _insert_sorted(buf, flg, n, t, 1)
    buf[n] = 1.0
    flg[n] = 1 if _on_segments(bx, by, segs, ns, rho) else 0
    return n + 1


@njit(cache=True)
def covers(tgt, src, rho):
    """True when B(x, rho) contains src for every x in tgt (F is polynomial)."""
    r2 = rho * rho
    for a in range(3):
        for b in range(3):
            dx = tgt[a, 0] - src[b, 0]
            dy = tgt[a, 1] - src[b, 1]
            if dx * dx + dy * dy > r2:
                return False
    return True


@njit(cache=True)
def plane_capacity(ng):
    return MAX_EVENTS * ng * MAX_BREAKS * ng


@njit(cache=True)
def plane_nodes_features(tgt, cen, nc, segs, ns, owner, rho, base, rx, rw, ox, oy, ow):
    """Nodes ``(ox, oy)`` and weights ``ow`` integrating over ``tgt``
    functions whose kinks are the circles of radius ``rho`` about ``cen`` and
    the segments ``segs``.  ``rx``/``rw`` are the endpoint variants of a
    Gauss rule on [0, 1] (see ``_segments``); ``base`` is the preferred chord
    angle.  Returns the node count; the buffers need ``plane_capacity``
    entries."""
    vflag = np.zeros(3, dtype=np.bool_)
    for v in range(3):
        vflag[v] = _on_segments(tgt[v, 0], tgt[v, 1], segs, ns, rho)
    dx, dy = _direction(base, segs, ns, tgt, vflag)
    nx = -dy
    ny = dx
    lo = tgt[0, 0] * nx + tgt[0, 1] * ny
    hi = lo
    for v in range(1, 3):
        e = tgt[v, 0] * nx + tgt[v, 1] * ny
        lo = min(lo, e)
        hi = max(hi, e)
    ev = np.empty(MAX_EVENTS)
    ef = np.empty(MAX_EVENTS, dtype=np.int64)
    ne = _events(tgt, cen, nc, segs, ns, owner, rho, nx, ny, lo, hi, ev, ef)
    cb = np.empty(MAX_BREAKS)
    cf = np.empty(MAX_BREAKS, dtype=np.int64)
    ng = rx.shape[1]
    m = 0
    for piece in range(ne - 1):
        e0 = ev[piece]
        he = ev[piece + 1] - e0
        ke = 2 * ef[piece] + ef[piece + 1]
        for a in range(ng):
            eta = e0 + he * rx[ke, a]
            weta = he * rw[ke, a]
            # chord of tgt on the line x . n = eta
            t0 = 1e300
            t1 = -1e300
            for v in range(3):
                f = (v + 1) % 3
                ev0 = tgt[v, 0] * nx + tgt[v, 1] * ny
                ev1 = tgt[f, 0] * nx + tgt[f, 1] * ny
                if (ev0 - eta) * (ev1 - eta) <= 0.0 and ev0 != ev1:
                    s = (eta - ev0) / (ev1 - ev0)
                    px = tgt[v, 0] + s * (tgt[f, 0] - tgt[v, 0])
                    py = tgt[v, 1] + s * (tgt[f, 1] - tgt[v, 1])
                    t = px * dx + py * dy
                    t0 = min(t0, t)
                    t1 = max(t1, t)
            if not t1 > t0:
                continue
            ax = t0 * dx + eta * nx
            ay = t0 * dy + eta * ny
            bx = t1 * dx + eta * nx
            by = t1 * dy + eta * ny
            nb = feature_breaks(ax, ay, bx, by, cen, nc, segs, ns, rho, cb, cf)
            length = t1 - t0
            for s in range(nb - 1):
                u0 = cb[s]
                hu = cb[s + 1] - u0
                if hu <= 0.0:
                    continue
                kc = 2 * cf[s] + cf[s + 1]
                for b in range(ng):
                    u = u0 + hu * rx[kc, b]
                    ox[m] = ax + u * (bx - ax)
                    oy[m] = ay + u * (by - ay)
                    ow[m] = weta * hu * length * rw[kc, b]
                    m += 1
    return m


@njit(cache=True)
def plane_nodes(tgt, src, rho, rx, rw, ox, oy, ow):
    """:func:`plane_nodes_features` for the kinks of a triangle source; the
    chords run roughly along the line between the two cells."""
    cen = np.empty((3, 2))
    segs = np.empty((6, 4))
    owner = np.empty((6, 2), dtype=np.int64)
    triangle_features(src, rho, cen, segs, owner)
    cx = (tgt[0, 0] + tgt[1, 0] + tgt[2, 0] - src[0, 0] - src[1, 0] - src[2, 0]) / 3.0
    cy = (tgt[0, 1] + tgt[1, 1] + tgt[2, 1] - src[0, 1] - src[1, 1] - src[2, 1]) / 3.0
    base = math.atan2(cy, cx) if (cx != 0.0 or cy != 0.0) else 0.3
    return plane_nodes_features(tgt, cen, 3, segs, 6, owner, rho, base, rx, rw, ox, oy, ow)
