"""Compiled loops of the reduced assembly.

Conventions: ``tri`` (N, 3, 2) ccw cell coordinates, ``grads``/``offs`` the
affine basis (``phi_k(x) = grads[k] . x + offs[k]``), ``tw`` (3, K+1) tier
weights of (R, Rbar, Rbarbar) as polynomials in ``(r / rho)^2`` with
``rho = 2 delta``.  Segment rules come as the four endpoint variants
``rx``/``rw`` (4, ng) of a Gauss rule on [0, 1] (see ``_segments``);
triangle rules as barycentric nodes ``qb`` (nq, 3) with weights ``qw``
summing to 1.
"""
import math

import numpy as np
from numba import njit, prange

from ._plane import covers, plane_capacity, plane_nodes, plane_nodes_features
from ._segments import MAX_BREAKS, circle_breaks, kink_breaks, segment_nodes
from .exact_integrate import _wedge_into, triangle_moments


@njit(cache=True)
def _poly_tier(coeffs, s):
    if s >= 1.0:
        return 0.0
    acc = 0.0
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * s + coeffs[k]
    return acc


@njit(cache=True)
def _outward_normal(tri, e):
    f = (e + 1) % 3
    lx = tri[f, 0] - tri[e, 0]
    ly = tri[f, 1] - tri[e, 1]
    length = math.hypot(lx, ly)
    return ly / length, -lx / length


@njit(cache=True)
def _segment_kernel_integral(ax, ay, bx, by, cx, cy, coeffs, rho, rx, rw, buf, flg, px, py, pt, pw):
    """int over AB of the scaled kernel with coefficients ``coeffs`` centred at c."""
    nb = circle_breaks(ax, ay, bx, by, cx, cy, rho, buf, flg)
    m = segment_nodes(ax, ay, bx, by, buf, flg, nb, rx, rw, px, py, pt, pw)
    inv = 1.0 / (rho * rho)
    acc = 0.0
    for q in range(m):
        dx = px[q] - cx
        dy = py[q] - cy
        acc += pw[q] * _poly_tier(coeffs, (dx * dx + dy * dy) * inv)
    return acc


@njit(cache=True)
def fill_plane(tgt, src, area_t, rho, rx, rw, qb, qw, ox, oy, ow):
    """Outer 2D nodes over ``tgt`` for inner integrals over ``src``."""
    if covers(tgt, src, rho):
        # B(x, rho) contains src for all x in tgt: the inner integrals are
        # polynomials in x and the fixed triangle rule is exact
        for q in range(qw.shape[0]):
            ox[q] = qb[q, 0] * tgt[0, 0] + qb[q, 1] * tgt[1, 0] + qb[q, 2] * tgt[2, 0]
            oy[q] = qb[q, 0] * tgt[0, 1] + qb[q, 1] * tgt[1, 1] + qb[q, 2] * tgt[2, 1]
            ow[q] = qw[q] * area_t
        return qw.shape[0]
    return plane_nodes(tgt, src, rho, rx, rw, ox, oy, ow)


@njit(cache=True)
def edge_terms(ti, tj, gi, tw, rho, rx, rw, E1, E2, breaks, flg, px, py, pt, pw):
    """E1[k, l] = oint_{dTj} (a_ik . n) phi_jl P_i and E2 likewise with Q_i."""
    kmax = tw.shape[1] - 1
    mom = np.empty(kmax + 1)
    an = np.empty(3)
    for k in range(3):
        for l in range(3):
            E1[k, l] = 0.0
            E2[k, l] = 0.0
    for e in range(3):
        f = (e + 1) % 3
        nx, ny = _outward_normal(tj, e)
        for k in range(3):
            an[k] = gi[k, 0] * nx + gi[k, 1] * ny
        nb = kink_breaks(tj[e, 0], tj[e, 1], tj[f, 0], tj[f, 1], ti, 3, True, rho, breaks, flg)
        m = segment_nodes(tj[e, 0], tj[e, 1], tj[f, 0], tj[f, 1], breaks, flg, nb, rx, rw, px, py, pt, pw)
        for q in range(m):
            triangle_moments(px[q], py[q], ti, rho, kmax, mom)
            P = 0.0
            Q = 0.0
            for s in range(kmax + 1):
                P += tw[1, s] * mom[s]
                Q += tw[2, s] * mom[s]
            if P == 0.0 and Q == 0.0:
                continue
            # phi_jl restricted to edge (e, f) is linear in the edge parameter
            we = pw[q] * (1.0 - pt[q])
            wf = pw[q] * pt[q]
            for k in range(3):
                E1[k, e] += an[k] * P * we
                E1[k, f] += an[k] * P * wf
                E2[k, e] += an[k] * Q * we
                E2[k, f] += an[k] * Q * wf


@njit(cache=True)
def plane_terms(ti, gi, oi, gj, oj, tw, rho, ox, oy, ow, m, V1, V2, A, W):
    """2D outer integrals over cell j (nodes ``ox, oy, ow``) of the inner
    integrals over cell i.

    V1[k, l] = int_Tj phibar_ik phi_jl U_i,   V2 likewise with P_i,
    A = (int_Tj P_i, int_Tj Q_i),   W[k, l] = int_Tj phi_jk phi_jl U_i.
    """
    kmax = tw.shape[1] - 1
    mom = np.empty(kmax + 1)
    pb = np.empty(3)
    pj = np.empty(3)
    for k in range(3):
        for l in range(3):
            V1[k, l] = 0.0
            V2[k, l] = 0.0
            W[k, l] = 0.0
    A[0] = 0.0
    A[1] = 0.0
    for q in range(m):
        x = ox[q]
        y = oy[q]
        triangle_moments(x, y, ti, rho, kmax, mom)
        U = 0.0
        P = 0.0
        Q = 0.0
        for s in range(kmax + 1):
            U += tw[0, s] * mom[s]
            P += tw[1, s] * mom[s]
            Q += tw[2, s] * mom[s]
        w = ow[q]
        A[0] += w * P
        A[1] += w * Q
        for k in range(3):
            pb[k] = gi[k, 0] * x + gi[k, 1] * y + oi[k]
            pj[k] = gj[k, 0] * x + gj[k, 1] * y + oj[k]
        for k in range(3):
            for l in range(3):
                c = w * pj[l]
                V1[k, l] += c * pb[k] * U
                V2[k, l] += c * pb[k] * P
                W[k, l] += c * pj[k] * U


@njit(cache=True)
def pair_terms(ti, tj, gi, oi, gj, oj, area_j, tw, rho, rx, rw, qb, qw, E1, E2, V1, V2, A, W):
    """Edge and 2D outer integrals over cell j of the inner integrals over cell i."""
    cap = MAX_BREAKS * rx.shape[1]
    breaks = np.empty(MAX_BREAKS)
    flg = np.empty(MAX_BREAKS, dtype=np.int64)
    px = np.empty(cap)
    py = np.empty(cap)
    pt = np.empty(cap)
    pw = np.empty(cap)
    edge_terms(ti, tj, gi, tw, rho, rx, rw, E1, E2, breaks, flg, px, py, pt, pw)
    pcap = max(plane_capacity(rx.shape[1]), qw.shape[0])
    ox = np.empty(pcap)
    oy = np.empty(pcap)
    ow = np.empty(pcap)
    m = fill_plane(tj, ti, area_j, rho, rx, rw, qb, qw, ox, oy, ow)
    plane_terms(ti, gi, oi, gj, oj, tw, rho, ox, oy, ow, m, V1, V2, A, W)


@njit(cache=True)
def edge_pair_matrix(ti, tw, rho, rx, rw, G):
    """G[e1, e2] = int_{e1} int_{e2} Rbarbar_delta over edge pairs of one cell.

    The outer edge is split at the kinks of the inner segment integral and
    the inner integral at its crossings of the support circle."""
    cap = MAX_BREAKS * rx.shape[1]
    buf = np.empty(MAX_BREAKS)
    flg = np.empty(MAX_BREAKS, dtype=np.int64)
    buf2 = np.empty(MAX_BREAKS)
    flg2 = np.empty(MAX_BREAKS, dtype=np.int64)
    px = np.empty(cap)
    py = np.empty(cap)
    pt = np.empty(cap)
    pw = np.empty(cap)
    qx = np.empty(cap)
    qy = np.empty(cap)
    qt = np.empty(cap)
    qw = np.empty(cap)
    seg = np.empty((2, 2))
    coeffs = tw[2].copy()
    for e1 in range(3):
        f1 = (e1 + 1) % 3
        for e2 in range(e1, 3):
            f2 = (e2 + 1) % 3
            seg[0, 0] = ti[e2, 0]
            seg[0, 1] = ti[e2, 1]
            seg[1, 0] = ti[f2, 0]
            seg[1, 1] = ti[f2, 1]
            nb = kink_breaks(ti[e1, 0], ti[e1, 1], ti[f1, 0], ti[f1, 1], seg, 2, False, rho, buf, flg)
            m = segment_nodes(ti[e1, 0], ti[e1, 1], ti[f1, 0], ti[f1, 1], buf, flg, nb, rx, rw, px, py, pt, pw)
            acc = 0.0
            for q in range(m):
                acc += pw[q] * _segment_kernel_integral(seg[0, 0], seg[0, 1], seg[1, 0], seg[1, 1], px[q], py[q],
                                                        coeffs, rho, rx, rw, buf2, flg2, qx, qy, qt, qw)
            G[e1, e2] = acc
            G[e2, e1] = acc


@njit(cache=True)
def domain_moments(x, y, runs, ridx, r0, r1, rho, kmax, mom):
    """Moments of ``Omega cap B(x, rho)`` for x inside the domain.

    Signed wedges over the boundary runs ``ridx[r0:r1]`` near x; every other
    run lies outside the disk and contributes a plain sector, so together
    they add the remaining winding angle ``2 pi - sum(theta)``."""
    for k in range(kmax + 1):
        mom[k] = 0.0
    inv = 1.0 / rho
    theta = 0.0
    for p in range(r0, r1):
        r = ridx[p]
        px = (runs[r, 0] - x) * inv
        py = (runs[r, 1] - y) * inv
        qx = (runs[r, 2] - x) * inv
        qy = (runs[r, 3] - y) * inv
        _wedge_into(px, py, qx, qy, kmax, mom)
        theta += math.atan2(px * qy - py * qx, px * qx + py * qy)
    rest = 2.0 * math.pi - theta
    for k in range(kmax + 1):
        mom[k] = (mom[k] + rest / (2 * k + 2)) * rho * rho


@njit(cache=True)
def domain_terms(ti, gi, oi, area, runs, ridx, r0, r1, tw, rho, rx, rw, qb, qw, ox, oy, ow, Wd):
    """Wd[k, l] = int_Ti phi_k phi_l int_{Omega cap B(x, rho)} R_delta dy dx.

    The inner integral is constant away from the boundary; near it, its
    kinks are the circles about the run ends and the offsets of the runs."""
    kmax = tw.shape[1] - 1
    mom = np.empty(kmax + 1)
    if r1 == r0:
        full = 0.0
        for s in range(kmax + 1):
            full += tw[0, s] * 2.0 * math.pi / (2 * s + 2)
        full *= rho * rho
        for k in range(3):
            for l in range(3):
                Wd[k, l] = full * area / 12.0 * (2.0 if k == l else 1.0)
        return
    nr = r1 - r0
    cen = np.empty((2 * nr, 2))
    segs = np.empty((2 * nr, 4))
    owner = np.empty((2 * nr, 2), dtype=np.int64)
    nc = 0
    for p in range(nr):
        r = ridx[r0 + p]
        lx = runs[r, 2] - runs[r, 0]
        ly = runs[r, 3] - runs[r, 1]
        length = math.hypot(lx, ly)
        for end in range(2):
            vx = runs[r, 2 * end]
            vy = runs[r, 2 * end + 1]
            found = -1
            for c in range(nc):
                if cen[c, 0] == vx and cen[c, 1] == vy:
                    found = c
            if found < 0:
                cen[nc, 0] = vx
                cen[nc, 1] = vy
                found = nc
                nc += 1
            owner[2 * p, end] = found
            owner[2 * p + 1, end] = found
        for side in range(2):
            sg = rho / length if side == 0 else -rho / length
            segs[2 * p + side, 0] = runs[r, 0] + sg * ly
            segs[2 * p + side, 1] = runs[r, 1] - sg * lx
            segs[2 * p + side, 2] = runs[r, 2] + sg * ly
            segs[2 * p + side, 3] = runs[r, 3] - sg * lx
    m = plane_nodes_features(ti, cen, nc, segs, 2 * nr, owner, rho, 0.3, rx, rw, ox, oy, ow)
    ph = np.empty(3)
    for k in range(3):
        for l in range(3):
            Wd[k, l] = 0.0
    for q in range(m):
        x = ox[q]
        y = oy[q]
        domain_moments(x, y, runs, ridx, r0, r1, rho, kmax, mom)
        U = 0.0
        for s in range(kmax + 1):
            U += tw[0, s] * mom[s]
        w = ow[q] * U
        for k in range(3):
            ph[k] = gi[k, 0] * x + gi[k, 1] * y + oi[k]
        for k in range(3):
            for l in range(3):
                Wd[k, l] += w * ph[k] * ph[l]


@njit(cache=True, parallel=True)
def assemble_blocks(tri, grads, offs, areas, up_ptr, up_idx, runs, run_ptr, run_idx, tw, rho, delta, rx, rw, qb, qw,
                    Dd, Md, Dp, Mp):
    """Diagonal blocks (Dd, Md) per cell and upper blocks (Dp, Mp) per pair.

    The ``W_i = sum_{j != i} U_j`` part of the diagonal diffusion block is
    evaluated as ``int_{Omega cap B} R_delta - U_i``: the domain integral
    needs only the boundary runs within reach (``run_ptr``/``run_idx``) and
    every cell is handled by a single thread, so the result does not depend
    on the thread schedule.
    """
    n = tri.shape[0]
    d2 = delta * delta
    pcap = max(plane_capacity(rx.shape[1]), qw.shape[0])
    cap = MAX_BREAKS * rx.shape[1]
    for i in prange(n):
        E1 = np.empty((3, 3))
        E2 = np.empty((3, 3))
        V1 = np.empty((3, 3))
        V2 = np.empty((3, 3))
        G = np.empty((3, 3))
        W = np.empty((3, 3))
        Wd = np.empty((3, 3))
        A = np.empty(2)
        an = np.empty((3, 3))
        breaks = np.empty(MAX_BREAKS)
        flg = np.empty(MAX_BREAKS, dtype=np.int64)
        px = np.empty(cap)
        py = np.empty(cap)
        pt = np.empty(cap)
        pw = np.empty(cap)
        ox = np.empty(pcap)
        oy = np.empty(pcap)
        ow = np.empty(pcap)
        ti = tri[i]
        gi = grads[i]
        oi = offs[i]
        # diagonal block; W holds int_Ti phi phi U_i
        edge_terms(ti, ti, gi, tw, rho, rx, rw, E1, E2, breaks, flg, px, py, pt, pw)
        m = fill_plane(ti, ti, areas[i], rho, rx, rw, qb, qw, ox, oy, ow)
        plane_terms(ti, gi, oi, gi, oi, tw, rho, ox, oy, ow, m, V1, V2, A, W)
        domain_terms(ti, gi, oi, areas[i], runs, run_idx, run_ptr[i], run_ptr[i + 1], tw, rho, rx, rw, qb, qw,
                     ox, oy, ow, Wd)
        edge_pair_matrix(ti, tw, rho, rx, rw, G)
        for k in range(3):
            for e in range(3):
                nx, ny = _outward_normal(ti, e)
                an[k, e] = gi[k, 0] * nx + gi[k, 1] * ny
        for k in range(3):
            for l in range(3):
                ee = 0.0
                for e1 in range(3):
                    for e2 in range(3):
                        ee += an[k, e1] * an[l, e2] * G[e1, e2]
                aa = gi[k, 0] * gi[l, 0] + gi[k, 1] * gi[l, 1]
                Dd[i, k, l] = -2.0 * d2 * ee + aa * A[0] + (Wd[k, l] - W[k, l]) / d2
                Md[i, k, l] = 2.0 * d2 * E2[k, l] - 2.0 * d2 * aa * A[1] + V2[k, l]
        for k in range(3):
            for l in range(k + 1, 3):
                s = 0.5 * (Md[i, k, l] + Md[i, l, k])
                Md[i, k, l] = s
                Md[i, l, k] = s
                s = 0.5 * (Dd[i, k, l] + Dd[i, l, k])
                Dd[i, k, l] = s
                Dd[i, l, k] = s
        # off-diagonal blocks with j > i
        for p in range(up_ptr[i], up_ptr[i + 1]):
            j = up_idx[p]
            tj = tri[j]
            gj = grads[j]
            oj = offs[j]
            edge_terms(ti, tj, gi, tw, rho, rx, rw, E1, E2, breaks, flg, px, py, pt, pw)
            m = fill_plane(tj, ti, areas[j], rho, rx, rw, qb, qw, ox, oy, ow)
            plane_terms(ti, gi, oi, gj, oj, tw, rho, ox, oy, ow, m, V1, V2, A, W)
            for k in range(3):
                for l in range(3):
                    aa = gi[k, 0] * gj[l, 0] + gi[k, 1] * gj[l, 1]
                    Dp[p, k, l] = -2.0 * E1[k, l] + 2.0 * aa * A[0] - V1[k, l] / d2
                    Mp[p, k, l] = 2.0 * d2 * E2[k, l] - 2.0 * d2 * aa * A[1] + V2[k, l]


@njit(cache=True)
def boundary_nodes(pair_cell, pair_edge, bseg, tri, rho, rx, rw):
    """Quadrature nodes on boundary edges, split at the kinks of each paired cell."""
    npairs = pair_cell.shape[0]
    cap = MAX_BREAKS * rx.shape[1]
    nodes = np.empty((npairs * cap, 2))
    weights = np.empty(npairs * cap)
    ptr = np.zeros(npairs + 1, dtype=np.int64)
    buf = np.empty(MAX_BREAKS)
    flg = np.empty(MAX_BREAKS, dtype=np.int64)
    px = np.empty(cap)
    py = np.empty(cap)
    pt = np.empty(cap)
    pw = np.empty(cap)
    m = 0
    for p in range(npairs):
        s = bseg[pair_edge[p]]
        nb = kink_breaks(s[0, 0], s[0, 1], s[1, 0], s[1, 1], tri[pair_cell[p]], 3, True, rho, buf, flg)
        c = segment_nodes(s[0, 0], s[0, 1], s[1, 0], s[1, 1], buf, flg, nb, rx, rw, px, py, pt, pw)
        for q in range(c):
            nodes[m, 0] = px[q]
            nodes[m, 1] = py[q]
            weights[m] = pw[q]
            m += 1
        ptr[p + 1] = m
    return nodes[:m].copy(), weights[:m].copy(), ptr


@njit(cache=True)
def boundary_terms(pair_cell, ptr, nodes, weights, gvals, tri, grads, offs, tw, rho, delta, rx, rw, out):
    """Accumulate the boundary-flux load into ``out`` (N, 3).

    For y on a boundary edge near cell i:
      -2 delta^2 sum_e (a_ik . n_e) int_e Rbarbar_delta(x, y) dS_x  +  phibar_ik(y) P_i(y)
    weighted by g(y).
    """
    kmax = tw.shape[1] - 1
    mom = np.empty(kmax + 1)
    cap = MAX_BREAKS * rx.shape[1]
    buf = np.empty(MAX_BREAKS)
    flg = np.empty(MAX_BREAKS, dtype=np.int64)
    qx = np.empty(cap)
    qy = np.empty(cap)
    qt = np.empty(cap)
    qw = np.empty(cap)
    coeffs = tw[2].copy()
    H = np.empty(3)
    d2 = delta * delta
    for p in range(pair_cell.shape[0]):
        i = pair_cell[p]
        ti = tri[i]
        for q in range(ptr[p], ptr[p + 1]):
            w = weights[q] * gvals[q]
            if w == 0.0:
                continue
            yx = nodes[q, 0]
            yy = nodes[q, 1]
            triangle_moments(yx, yy, ti, rho, kmax, mom)
            P = 0.0
            for s in range(kmax + 1):
                P += tw[1, s] * mom[s]
            for e in range(3):
                f = (e + 1) % 3
                H[e] = _segment_kernel_integral(ti[e, 0], ti[e, 1], ti[f, 0], ti[f, 1], yx, yy,
                                                coeffs, rho, rx, rw, buf, flg, qx, qy, qt, qw)
            for k in range(3):
                flux = 0.0
                for e in range(3):
                    nx, ny = _outward_normal(ti, e)
                    flux += (grads[i, k, 0] * nx + grads[i, k, 1] * ny) * H[e]
                pbar = grads[i, k, 0] * yx + grads[i, k, 1] * yy + offs[i, k]
                out[i, k] += w * (-2.0 * d2 * flux + pbar * P)
