"""Triangular meshes, per-cell linear basis functions and neighbour queries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DegenerateTriangle, NonManifoldError, OrientationError, ParseError

HEADER = "nlfem-mesh 1"
DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class AffineBasis:
    """Affine function ``a . x + b``; restricted to its cell it is a basis function."""

    a: np.ndarray
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.a + self.b


class SpatialIndex:
    """Uniform hash grid over cell centroids."""

    def __init__(self, centroids: np.ndarray, cell_size: float):
        self.cell_size = float(cell_size)
        keys = np.floor(centroids / self.cell_size).astype(np.int64)
        self.buckets: dict[tuple, list] = {}
        for idx, (kx, ky) in enumerate(keys):
            self.buckets.setdefault((int(kx), int(ky)), []).append(idx)

    def query(self, point, reach: float) -> list:
        """Indices of all centroids within ``reach`` of ``point`` (bucket superset)."""
        lo = np.floor((np.asarray(point) - reach) / self.cell_size).astype(np.int64)
        hi = np.floor((np.asarray(point) + reach) / self.cell_size).astype(np.int64)
        found = []
        for kx in range(lo[0], hi[0] + 1):
            for ky in range(lo[1], hi[1] + 1):
                found.extend(self.buckets.get((kx, ky), ()))
        return found


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray  # (nv, 2)
    cells: np.ndarray  # (nt, 3), counterclockwise
    boundary_edges: np.ndarray  # (nb, 2) vertex pairs, domain on the left
    boundary_cells: np.ndarray  # (nb,) owning cell
    boundary_normals: np.ndarray  # (nb, 2) outward unit normals
    centroids: np.ndarray
    radii: np.ndarray  # centroid-to-vertex circumscribing radius
    areas: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_dofs(self) -> int:
        return 3 * len(self.cells)

    def cell_coords(self, cell=None) -> np.ndarray:
        if cell is None:
            return self.vertices[self.cells]
        return self.vertices[self.cells[cell]]

    @property
    def diameter(self) -> float:
        lo, hi = self.vertices.min(axis=0), self.vertices.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def cell_diameters(self) -> np.ndarray:
        tri = self.cell_coords()
        d = [np.linalg.norm(tri[:, (k + 1) % 3] - tri[:, k], axis=1) for k in range(3)]
        return np.max(d, axis=0)

    def edges(self) -> np.ndarray:
        """All distinct (undirected) edges, sorted."""
        e = np.sort(np.concatenate([self.cells[:, [0, 1]], self.cells[:, [1, 2]], self.cells[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    def basis_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Gradients (nt, 3, 2) and offsets (nt, 3) of every cell's basis."""
        if "basis" not in self._cache:
            self._cache["basis"] = _barycentric(self.cell_coords())
        return self._cache["basis"]

    def spatial_index(self, cell_size: float) -> SpatialIndex:
        key = ("grid", float(cell_size))
        if key not in self._cache:
            self._cache[key] = SpatialIndex(self.centroids, cell_size)
        return self._cache[key]

    def index_for_horizon(self, horizon: float) -> SpatialIndex:
        return self.spatial_index(max(horizon, float(np.mean(self.cell_diameters()))))


def _barycentric(tri: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, y = tri[..., 0], tri[..., 1]
    area2 = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (y[:, 1] - y[:, 0]) * (x[:, 2] - x[:, 0])
    grads = np.empty(tri.shape)
    offs = np.empty(tri.shape[:2])
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        grads[:, k, 0] = (y[:, i] - y[:, j]) / area2
        grads[:, k, 1] = (x[:, j] - x[:, i]) / area2
        offs[:, k] = (x[:, i] * y[:, j] - x[:, j] * y[:, i]) / area2
    return grads, offs


def _signed_areas(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    t = vertices[cells]
    return 0.5 * (
        (t[:, 1, 0] - t[:, 0, 0]) * (t[:, 2, 1] - t[:, 0, 1])
        - (t[:, 1, 1] - t[:, 0, 1]) * (t[:, 2, 0] - t[:, 0, 0])
    )


def build_mesh(vertices, cells, boundary: Iterable | None = None) -> Mesh:
    """Validate connectivity, extract the boundary and precompute cell data."""
    vertices = np.ascontiguousarray(np.asarray(vertices, dtype=float).reshape(-1, 2))
    cells = np.ascontiguousarray(np.asarray(cells, dtype=np.int64).reshape(-1, 3))
    if cells.size and (cells.min() < 0 or cells.max() >= len(vertices)):
        raise ValueError("cell references a vertex index out of range")
    areas = _signed_areas(vertices, cells)
    lo, hi = vertices.min(axis=0), vertices.max(axis=0)
    tol = DEGENERACY_TOL * float(np.sum((hi - lo) ** 2))
    for c, a in enumerate(areas):
        if a <= 0.0:
            raise OrientationError(f"cell {c} has nonpositive signed area {a:g} (clockwise or flat)")
        if a < tol:
            raise DegenerateTriangle(f"cell {c} has area {a:g} below the degeneracy threshold")

    owners: dict[tuple, list] = {}
    for c, tri in enumerate(cells):
        for k in range(3):
            v1, v2 = int(tri[k]), int(tri[(k + 1) % 3])
            owners.setdefault((min(v1, v2), max(v1, v2)), []).append((c, v1, v2))
    bverts, bcells = [], []
    for key, own in owners.items():
        if len(own) > 2:
            raise NonManifoldError(f"edge {key} is shared by {len(own)} cells")
        if len(own) == 2 and own[0][1] == own[1][1]:
            raise NonManifoldError(f"edge {key} is traversed in the same direction by cells {own[0][0]} and {own[1][0]}")
        if len(own) == 1:
            c, v1, v2 = own[0]
            bverts.append((v1, v2))
            bcells.append(c)
    order = np.lexsort((np.array([b[1] for b in bverts]), np.array([b[0] for b in bverts]))) if bverts else []
    bverts = np.array(bverts, dtype=np.int64).reshape(-1, 2)[order]
    bcells = np.array(bcells, dtype=np.int64)[order]
    d = vertices[bverts[:, 1]] - vertices[bverts[:, 0]]
    normals = np.stack([d[:, 1], -d[:, 0]], axis=1) / np.linalg.norm(d, axis=1)[:, None]

    if boundary is not None:
        given = {tuple(int(v) for v in e) for e in boundary}
        found = {tuple(e) for e in bverts.tolist()}
        if given != found:
            raise ParseError("boundary edges in file do not match the cell connectivity")

    tri = vertices[cells]
    centroids = tri.mean(axis=1)
    radii = np.linalg.norm(tri - centroids[:, None, :], axis=2).max(axis=1)
    return Mesh(vertices, cells, bverts, bcells, normals, centroids, radii, areas)


def generate_unit_square_mesh(n: int) -> Mesh:
    """Uniform mesh of [0, 1]^2, each lattice square split along its main diagonal."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    g = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(g, g)
    vertices = np.stack([xx.ravel(), yy.ravel()], axis=1)
    cells = []
    for j in range(n):
        for i in range(n):
            v00 = j * (n + 1) + i
            v10, v01, v11 = v00 + 1, v00 + n + 1, v00 + n + 2
            cells.append((v00, v10, v11))
            cells.append((v00, v11, v01))
    return build_mesh(vertices, cells)


def basis_functions(m: Mesh, cell: int) -> list[AffineBasis]:
    """Barycentric coordinate functions of ``cell`` in vertex order."""
    grads, offs = m.basis_arrays()
    return [AffineBasis(grads[cell, k].copy(), float(offs[cell, k])) for k in range(3)]


# --------------------------------------------------------------------------
# distances and neighbour queries


def _point_segment_distance(p, a, b):
    """Broadcasting distance from points ``p`` to segments ``[a, b]``."""
    ab = b - a
    ap = p - a
    denom = np.sum(ab * ab, axis=-1)
    t = np.clip(np.sum(ap * ab, axis=-1) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    d = ap - t[..., None] * ab
    return np.sqrt(np.sum(d * d, axis=-1))


def _points_in_triangle(p, tri):
    """Broadcasting containment test (closed triangle, ccw vertices)."""
    inside = np.ones(np.broadcast_shapes(p.shape[:-1], tri.shape[:-2]), dtype=bool)
    for k in range(3):
        a, b = tri[..., k, :], tri[..., (k + 1) % 3, :]
        cr = (b[..., 0] - a[..., 0]) * (p[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (p[..., 0] - a[..., 0])
        inside &= cr >= 0.0
    return inside


def triangle_distances(tri: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Euclidean distance between triangle ``tri`` (3, 2) and each of ``others`` (m, 3, 2)."""
    best = np.full(len(others), np.inf)
    for k in range(3):
        a, b = others[:, k], others[:, (k + 1) % 3]
        for v in range(3):
            best = np.minimum(best, _point_segment_distance(tri[v][None, :], a, b))
        a1, b1 = tri[k], tri[(k + 1) % 3]
        for v in range(3):
            best = np.minimum(best, _point_segment_distance(others[:, v], a1[None, :], b1[None, :]))
    for v in range(3):
        best[_points_in_triangle(tri[v][None, :], others)] = 0.0
        best[_points_in_triangle(others[:, v], tri[None, :, :])] = 0.0
    return best


def segment_triangle_distances(a, b, tris: np.ndarray) -> np.ndarray:
    """Distance between segment ``[a, b]`` and each triangle in ``tris``."""
    best = np.full(len(tris), np.inf)
    for k in range(3):
        best = np.minimum(best, _point_segment_distance(tris[:, k], a[None, :], b[None, :]))
        best = np.minimum(best, _point_segment_distance(a[None, :], tris[:, k], tris[:, (k + 1) % 3]))
        best = np.minimum(best, _point_segment_distance(b[None, :], tris[:, k], tris[:, (k + 1) % 3]))
    best[_points_in_triangle(a[None, :], tris)] = 0.0
    return best


def cells_within(m: Mesh, cell: int, radius: float) -> list:
    """Superset of the cells closer than ``radius`` to ``cell``.

    Centroid lookup in the hash grid, padded by the circumscribing radii
    so that no interacting cell can be missed.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    index = m.index_for_horizon(radius)
    reach = radius + m.radii[cell] + float(m.radii.max())
    cand = np.array(sorted(index.query(m.centroids[cell], reach)), dtype=np.int64)
    d = np.linalg.norm(m.centroids[cand] - m.centroids[cell], axis=1)
    keep = cand[d <= reach]
    return keep.tolist()


def interacting_cells(m: Mesh, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """CSR lists of cells at exact distance ``< radius`` (self included), sorted."""
    key = ("interact", float(radius))
    if key in m._cache:
        return m._cache[key]
    tri = m.cell_coords()
    ptr = [0]
    idx = []
    for i in range(m.n_cells):
        cand = np.array(cells_within(m, i, radius), dtype=np.int64)
        d = triangle_distances(tri[i], tri[cand])
        keep = np.sort(cand[(d < radius) | (cand == i)])
        idx.append(keep)
        ptr.append(ptr[-1] + len(keep))
    out = (np.array(ptr, dtype=np.int64), np.concatenate(idx) if idx else np.zeros(0, np.int64))
    m._cache[key] = out
    return out


def boundary_edges_near(m: Mesh, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """CSR lists, per cell, of boundary edges at distance ``< radius``."""
    tri = m.cell_coords()
    cells, edges = [], []
    for e, (v1, v2) in enumerate(m.boundary_edges):
        hit = np.nonzero(segment_triangle_distances(m.vertices[v1], m.vertices[v2], tri) < radius)[0]
        cells.append(hit)
        edges.append(np.full(len(hit), e, dtype=np.int64))
    if not cells:
        return np.zeros(m.n_cells + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    cells = np.concatenate(cells)
    edges = np.concatenate(edges)
    order = np.lexsort((edges, cells))
    ptr = np.zeros(m.n_cells + 1, dtype=np.int64)
    np.cumsum(np.bincount(cells, minlength=m.n_cells), out=ptr[1:])
    return ptr, edges[order]


def boundary_runs(m: Mesh, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Maximal straight pieces of the boundary.

    Returns ``runs`` (r, 4) as ``(ax, ay, bx, by)`` with the domain on the
    left and ``edge_run`` mapping each boundary edge to its run.  Consecutive
    edges are merged when they are collinear and equally oriented; at a
    vertex shared by more than two boundary edges nothing is merged.
    """
    nb = len(m.boundary_edges)
    if nb == 0:
        return np.zeros((0, 4)), np.zeros(0, dtype=np.int64)
    starts: dict[int, list] = {}
    for e, (v1, _) in enumerate(m.boundary_edges):
        starts.setdefault(int(v1), []).append(e)
    vec = m.vertices[m.boundary_edges[:, 1]] - m.vertices[m.boundary_edges[:, 0]]
    length = np.hypot(vec[:, 0], vec[:, 1])

    def successor(e):
        nxt = starts.get(int(m.boundary_edges[e, 1]), [])
        return nxt[0] if len(nxt) == 1 and len(starts[int(m.boundary_edges[e, 0])]) == 1 else -1

    def straight(e, f):
        cross = vec[e, 0] * vec[f, 1] - vec[e, 1] * vec[f, 0]
        dot = vec[e, 0] * vec[f, 0] + vec[e, 1] * vec[f, 1]
        return dot > 0.0 and abs(cross) <= tol * length[e] * length[f]

    succ = np.array([successor(e) for e in range(nb)])
    pred = np.full(nb, -1)
    for e, f in enumerate(succ):
        if f >= 0:
            pred[f] = e
    continues = np.array([pred[e] >= 0 and straight(pred[e], e) for e in range(nb)])
    edge_run = np.full(nb, -1, dtype=np.int64)
    runs = []
    for e in range(nb):
        if continues[e]:
            continue
        f = e
        while True:
            edge_run[f] = len(runs)
            g = succ[f]
            if g < 0 or not continues[g] or g == e:
                break
            f = g
        a = m.vertices[m.boundary_edges[e, 0]]
        b = m.vertices[m.boundary_edges[f, 1]]
        runs.append([a[0], a[1], b[0], b[1]])
    # a closed loop without corners cannot occur for a bounded polygon; any
    # edge left over is its own run
    for e in np.nonzero(edge_run < 0)[0]:
        edge_run[e] = len(runs)
        a, b = m.vertices[m.boundary_edges[e]]
        runs.append([a[0], a[1], b[0], b[1]])
    return np.array(runs, dtype=float).reshape(-1, 4), edge_run


def boundary_runs_near(m: Mesh, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``runs`` and CSR lists, per cell, of runs with an edge closer than ``radius``."""
    runs, edge_run = boundary_runs(m)
    ptr, idx = boundary_edges_near(m, radius)
    out_ptr = [0]
    out_idx = []
    for i in range(m.n_cells):
        near = np.unique(edge_run[idx[ptr[i]:ptr[i + 1]]])
        out_idx.append(near)
        out_ptr.append(out_ptr[-1] + len(near))
    idx_arr = np.concatenate(out_idx).astype(np.int64) if out_idx else np.zeros(0, dtype=np.int64)
    return runs, np.array(out_ptr, dtype=np.int64), idx_arr


# --------------------------------------------------------------------------
# text format


def save_mesh(m: Mesh) -> str:
    lines = [HEADER, f"{len(m.vertices)} {len(m.cells)} {len(m.boundary_edges)}"]
    lines += [f"{x!r} {y!r}" for x, y in m.vertices.tolist()]
    lines += [f"{a} {b} {c}" for a, b, c in m.cells.tolist()]
    lines += [f"{a} {b}" for a, b in m.boundary_edges.tolist()]
    return "\n".join(lines) + "\n"


def load_mesh(text: str) -> Mesh:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise ParseError("empty mesh file")
    lineno, head = rows[0]
    if " ".join(head) != HEADER:
        raise ParseError(f"expected header {HEADER!r}", lineno)
    if len(rows) < 2:
        raise ParseError("missing size line", lineno)
    lineno, sizes = rows[1]
    try:
        nv, nt, nb = (int(s) for s in sizes)
    except ValueError:
        raise ParseError("size line must be '<nv> <nt> <nb>'", lineno) from None
    if min(nv, nt, nb) < 0:
        raise ParseError("negative count", lineno)
    body = rows[2:]
    if len(body) != nv + nt + nb:
        last = body[-1][0] if body else lineno
        raise ParseError(f"expected {nv + nt + nb} data lines, found {len(body)}", last)

    def parse(chunk, n, conv, what):
        out = []
        for ln, toks in chunk:
            if len(toks) != n:
                raise ParseError(f"{what} line needs {n} fields", ln)
            try:
                out.append([conv(t) for t in toks])
            except ValueError:
                raise ParseError(f"bad {what} entry {' '.join(toks)!r}", ln) from None
        return out

    verts = parse(body[:nv], 2, float, "vertex")
    cells = parse(body[nv:nv + nt], 3, int, "cell")
    bnd = parse(body[nv + nt:], 2, int, "boundary")
    for ln, toks in body[nv:nv + nt]:
        if any(not 0 <= int(t) < nv for t in toks):
            raise ParseError("cell vertex index out of range", ln)
    if not all(math.isfinite(v) for xy in verts for v in xy):
        raise ParseError("non-finite vertex coordinate")
    return build_mesh(np.array(verts).reshape(-1, 2), np.array(cells, dtype=np.int64).reshape(-1, 3), bnd if nb else None)
