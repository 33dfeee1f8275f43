"""Property suites behind ``nlfem verify``.

Each check returns a :class:`Check`; ``run_suite`` collects them.  The suites
are quick versions of the acceptance properties: kernel normalisation and
tier relations, exact triangle/disk integrals against analytic values and
Monte Carlo, mesh invariants, and reduced assembly against the brute-force
oracle.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, TextIO

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from . import oracle
from .assembly import assemble_operators, assemble_rhs, interpolate
from .exact_integrate import Wedge, secant_power_integral, triangle_disk_poly, wedge_monomial
from .kernel import PRESETS, KernelFamily, Polynomial, eval_scaled, make_kernel_family
from .mesh import generate_unit_square_mesh, interacting_cells, load_mesh, save_mesh

SEED = 7


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


# --------------------------------------------------------------------------
# kernels


def random_kernels(count: int, seed: int = SEED, max_degree: int = 4) -> list[tuple]:
    """Random coefficient tuples whose normalisation moment is positive."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        coeffs = tuple(rng.uniform(-1.0, 1.0, size=rng.integers(1, max_degree + 1)))
        try:
            make_kernel_family(coeffs, 1.0)
        except ValueError:
            continue
        out.append(coeffs)
    return out


def plane_integral(kf: KernelFamily, which: str = "Rbar", points: int = 24) -> float:
    """``int_{R^2} which_delta(|z|) dz`` by Gauss-Legendre in the radius
    (exact: the integrand is a polynomial in r on [0, 2 delta])."""
    x, w = leggauss(points)
    r = kf.horizon * 0.5 * (x + 1.0)
    vals = eval_scaled(kf, which, np.stack([r, np.zeros_like(r)], axis=1), np.zeros(2))
    return float(np.sum(0.5 * kf.horizon * w * vals * 2.0 * math.pi * r))


def check_normalization(tol: float = 1e-12) -> Check:
    kernels = list(PRESETS.values()) + random_kernels(5)
    worst = 0.0
    for coeffs in kernels:
        for delta in (0.05, 0.3, 1.7):
            worst = max(worst, abs(plane_integral(make_kernel_family(coeffs, delta)) - 1.0))
    return Check("kernel normalisation", worst <= tol, f"max |int Rbar_delta - 1| = {worst:.2e} over {len(kernels)} kernels")


def check_tiers(tol: float = 1e-12) -> Check:
    worst = 0.0
    s = np.linspace(0.0, 1.0, 21)
    for coeffs in list(PRESETS.values()) + random_kernels(5, seed=SEED + 1):
        kf = make_kernel_family(coeffs, 1.0)
        for lo, hi in (("R", "Rbar"), ("Rbar", "Rbarbar")):
            # d/ds hi(s) = -lo(s) and hi(1) = 0
            worst = max(worst, float(np.max(np.abs(kf.poly(hi).deriv()(s) + kf.poly(lo)(s)))))
            worst = max(worst, abs(float(kf.poly(hi)(1.0))))
    return Check("tier antiderivatives", worst <= tol, f"max residual {worst:.2e}")


def check_secant(tol: float = 1e-10, intervals: int = 100) -> Check:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n in range(1, 13):
        for _ in range(intervals):
            a, b = np.sort(rng.uniform(-1.4, 1.4, size=2))
            ref, _ = integrate.quad(lambda t: math.cos(t) ** -n, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
            got = secant_power_integral(n, a, b)
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return Check("secant recurrence", worst <= tol, f"max rel err {worst:.2e} (n = 1..12, {intervals} intervals each)")


# --------------------------------------------------------------------------
# geometry


UNIT_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def check_analytic_triangle(tol: float = 1e-12) -> list[Check]:
    full = triangle_disk_poly(Polynomial((1.0,)), 1.0, (0.0, 0.0), UNIT_TRIANGLE)
    second = triangle_disk_poly(Polynomial((0.0, 1.0)), 0.5, (0.0, 0.0), UNIT_TRIANGLE)
    quarter = wedge_monomial(Wedge((0.0, 0.0), (2.0, 0.0), (0.0, 2.0), 1.0), 0)
    return [
        Check("full coverage, p = 1", abs(full - 0.5) <= tol, f"{full!r} vs 1/2"),
        Check("p = s, delta = 1/2", abs(second - 1.0 / 6.0) <= tol, f"{second!r} vs 1/6"),
        Check("quarter-disk wedge", abs(quarter - math.pi / 4) <= tol, f"{quarter!r} vs pi/4"),
    ]


def random_clipped_configs(count: int, seed: int = SEED):
    """Triangles, centres and horizons where the disk cuts the triangle."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        tri = rng.uniform(-1.0, 1.0, size=(3, 2))
        area = 0.5 * abs(_cross(tri[1] - tri[0], tri[2] - tri[0]))
        if area < 0.05:
            continue
        c = rng.uniform(-1.0, 1.0, size=2)
        dist = np.linalg.norm(tri - c, axis=1)
        delta = rng.uniform(0.25, 0.75) * dist.max() / 2.0 + 0.25 * dist.min() / 2.0
        if not dist.min() < 2.0 * delta < dist.max():
            continue
        coeffs = tuple(rng.uniform(-1.0, 1.0, size=rng.integers(1, 4)))
        out.append((tri, c, delta, Polynomial(coeffs)))
    return out


def monte_carlo_triangle_disk(p: Polynomial, delta: float, c, tri, samples: int, rng) -> tuple[float, float]:
    u = rng.random((samples, 2))
    flip = u.sum(axis=1) > 1.0
    u[flip] = 1.0 - u[flip]
    y = tri[0] + u[:, :1] * (tri[1] - tri[0]) + u[:, 1:] * (tri[2] - tri[0])
    s = np.sum((y - c) ** 2, axis=1) / (4.0 * delta**2)
    vals = np.where(s < 1.0, p(np.minimum(s, 1.0)), 0.0)
    area = 0.5 * abs(_cross(tri[1] - tri[0], tri[2] - tri[0]))
    return area * float(vals.mean()), area * float(vals.std(ddof=1)) / math.sqrt(samples)


def check_clipped_monte_carlo(configs: int = 50, samples: int = 10**6, bands: float = 4.0) -> Check:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for tri, c, delta, p in random_clipped_configs(configs):
        exact = triangle_disk_poly(p, delta, c, tri)
        est, se = monte_carlo_triangle_disk(p, delta, c, tri, samples, rng)
        worst = max(worst, abs(exact - est) / se)
    return Check("clipped integrals vs Monte Carlo", worst <= bands,
                 f"max |exact - MC| = {worst:.2f} standard errors ({configs} configs, {samples} samples)")


def check_mesh(n: int = 4) -> list[Check]:
    m = generate_unit_square_mesh(n)
    text = save_mesh(m)
    again = save_mesh(load_mesh(text))
    nv, nt, nb = len(m.vertices), m.n_cells, len(m.boundary_edges)
    ptr, idx = interacting_cells(m, 0.3)
    pairs = {(i, int(j)) for i in range(nt) for j in idx[ptr[i]:ptr[i + 1]]}
    return [
        Check("unit-square counts", (nv, nt, nb) == ((n + 1) ** 2, 2 * n * n, 4 * n),
              f"{nv} vertices, {nt} cells, {nb} boundary edges"),
        Check("cell areas", bool(np.all(m.areas > 0)) and abs(m.areas.sum() - 1.0) <= 1e-14,
              f"sum {float(m.areas.sum())!r}, all counterclockwise"),
        Check("mesh text round trip", again == text, "save(load(save(m))) == save(m)"),
        Check("neighbour lists symmetric", all((j, i) in pairs for i, j in pairs), f"{len(pairs)} ordered pairs"),
    ]


# --------------------------------------------------------------------------
# oracle


def _poly_field(coeffs):
    def field(p):
        p = np.atleast_2d(p)
        x, y = p[:, 0], p[:, 1]
        return coeffs[0] + coeffs[1] * x + coeffs[2] * y + coeffs[3] * x * y + coeffs[4] * x * x
    return field


def oracle_rows(n: int = 2, delta: float = 0.8, kernel: tuple = (1.0,), order: int = 10) -> list[tuple]:
    """``(entry, reduced, oracle, rel_diff)`` for every entry of D, M and b
    against the tensor oracle (no-clipping regime), with random polynomial
    source and flux."""
    m = generate_unit_square_mesh(n)
    kf = make_kernel_family(kernel, delta)
    ops = assemble_operators(m, kf)
    rng = np.random.default_rng(SEED)
    f, g = _poly_field(rng.uniform(-1, 1, 5)), _poly_field(rng.uniform(-1, 1, 5))
    fd = interpolate(f, m)
    b = assemble_rhs(m, kf, f, g, M=ops.M)
    dofs = [(i, k) for i in range(m.n_cells) for k in range(3)]
    D, M = ops.D.toarray(), ops.M.toarray()
    rows = []
    for r, row in enumerate(dofs):
        for c, col in enumerate(dofs):
            for name, mat, fn in (("D", D, oracle.brute_force_diffusion_entry),
                                  ("M", M, oracle.brute_force_zero_order_entry)):
                ref = fn(m, kf, row, col, order=order).value
                rows.append((f"{name}[{r},{c}]", float(mat[r, c]), ref, abs(mat[r, c] - ref) / max(abs(ref), 1e-300)))
        ref = oracle.brute_force_rhs_entry(m, kf, row, fd, g, order=order).value
        rows.append((f"b[{r}]", float(b[r]), ref, abs(b[r] - ref) / max(abs(ref), 1e-300)))
    return rows


def oracle_table(n: int = 2, delta: float = 0.8, kernel: tuple = (1.0,), order: int = 10,
                 stream: Optional[TextIO] = None) -> Check:
    """Every entry of D, M and b against the tensor oracle (no clipping)."""
    rows = oracle_rows(n, delta, kernel, order)
    if stream is not None:
        print(f"{'entry':>10} {'reduced':>24} {'oracle':>24} {'rel-diff':>9}", file=stream)
        for name, red, ref, rel in rows:
            print(f"{name:>10} {red:24.16e} {ref:24.16e} {rel:9.1e}", file=stream)
    worst = max(r[3] for r in rows)
    return Check(f"reduced vs tensor oracle (n={n}, delta={delta})", worst <= 1e-8,
                 f"max rel diff {worst:.2e} over {len(rows)} entries")


def sample_entries(m, horizon: float, count: int, seed: int = SEED) -> list[tuple]:
    """Random ``(row, col)`` dof pairs: a third on diagonal cell blocks, the
    rest on pairs that the kernel support only partly covers (the clipped
    case the closed-form inner integrals exist for)."""
    rng = np.random.default_rng(seed)
    ptr, idx = interacting_cells(m, horizon)
    tri = m.cell_coords()
    clipped = []
    for i in range(m.n_cells):
        for j in idx[ptr[i]:ptr[i + 1]]:
            d = tri[i][:, None, :] - tri[j][None, :, :]
            if j != i and np.sqrt(np.max(np.sum(d * d, axis=-1))) > horizon:
                clipped.append((i, int(j)))
    out = []
    for t in range(count):
        if t % 3 == 0:
            i = j = int(rng.integers(m.n_cells))
        else:
            i, j = clipped[int(rng.integers(len(clipped)))]
        out.append(((i, int(rng.integers(3))), (j, int(rng.integers(3)))))
    return out


@dataclass
class MonteCarloRow:
    entry: str
    reduced: float
    estimate: float
    stderr: float
    seconds: float

    @property
    def z(self) -> float:
        return abs(self.reduced - self.estimate) / self.stderr


def monte_carlo_rows(n: int = 8, ratio: float = 4.0, count: int = 6, samples: int = 10**6,
                     kernel: tuple = (1.0,)) -> tuple[list[MonteCarloRow], float]:
    """Sampled D and M entries against the Monte Carlo oracle (clipped
    regime), alternating D and M.  Also returns the wall time of one full
    reduced assembly of the same configuration."""
    m = generate_unit_square_mesh(n)
    kf = make_kernel_family(kernel, ratio / n)
    ops = assemble_operators(m, kf)
    D, M = ops.D.tocsr(), ops.M.tocsr()
    rows = []
    for t, (row, col) in enumerate(sample_entries(m, kf.horizon, count)):
        name, mat, fn = (("D", D, oracle.brute_force_diffusion_entry) if t % 2 == 0
                         else ("M", M, oracle.brute_force_zero_order_entry))
        t0 = time.perf_counter()
        est = fn(m, kf, row, col, mode="mc", samples=samples)
        dt = time.perf_counter() - t0
        red = float(mat[3 * row[0] + row[1], 3 * col[0] + col[1]])
        rows.append(MonteCarloRow(f"{name}[{row},{col}]", red, est.value, est.stderr, dt))
    return rows, ops.seconds


def monte_carlo_table(n: int = 8, ratio: float = 4.0, count: int = 6, samples: int = 10**6, bands: float = 4.0,
                      kernel: tuple = (1.0,), stream: Optional[TextIO] = None) -> Check:
    """Sampled entries against the Monte Carlo oracle (clipped regime)."""
    rows, _ = monte_carlo_rows(n, ratio, count, samples, kernel)
    if stream is not None:
        print(f"{'entry':>22} {'reduced':>24} {'oracle':>24} {'|diff|/se':>9}", file=stream)
        for r in rows:
            print(f"{r.entry:>22} {r.reduced:24.16e} {r.estimate:24.16e} {r.z:9.2f}", file=stream)
    worst = max(r.z for r in rows)
    return Check(f"reduced vs Monte Carlo (n={n}, delta={ratio}h)", worst <= bands,
                 f"max {worst:.2f} standard errors over {count} entries, {samples} samples each")


# --------------------------------------------------------------------------
# suites


def kernels_suite(stream=None) -> list[Check]:
    return [check_normalization(), check_tiers(), check_secant()]


def geometry_suite(stream=None) -> list[Check]:
    return check_analytic_triangle() + [check_clipped_monte_carlo()] + check_mesh()


def oracle_suite(stream=None) -> list[Check]:
    return [oracle_table(stream=stream), monte_carlo_table(stream=stream)]


SUITES: dict[str, Callable] = {"kernels": kernels_suite, "geometry": geometry_suite, "oracle": oracle_suite}


def run_suite(name: str, stream: Optional[TextIO] = None) -> list[Check]:
    names: Iterable[str] = SUITES if name == "all" else [name]
    checks = []
    for n in names:
        for check in SUITES[n](stream=stream):
            if stream is not None:
                print(check.line(), file=stream)
            checks.append(check)
    return checks
