import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlfem import oracle
from nlfem.assembly import (assemble_boundary, assemble_diffusion, assemble_operators, assemble_rhs,
                            assemble_system, assemble_zero_order, interpolate)
from nlfem.errors import HorizonTooSmall
from nlfem.kernel import PRESETS, make_kernel_family
from nlfem.mesh import build_mesh, generate_unit_square_mesh, triangle_distances
from nlfem.quadrature import QuadratureConfig


def max_abs(A):
    return float(abs(A).max())


def ones(p):
    return np.ones(len(np.atleast_2d(p)))


def zeros(p):
    return np.zeros(len(np.atleast_2d(p)))


# With delta <= h the default 8-point rule leaves |D 1| at a few 1e-8; the
# outer quadrature converges spectrally, so 12 points are used there.
@pytest.mark.parametrize("kernel", sorted(PRESETS))
@pytest.mark.parametrize("n, ratio, points", [(2, 1.0, 12), (4, 1.0, 12), (4, 1.5, 8), (4, 2.5, 8), (6, 4.0, 8)])
def test_null_vector_and_symmetry(kernel, n, ratio, points):
    m = generate_unit_square_mesh(n)
    ops = assemble_operators(m, make_kernel_family(PRESETS[kernel], ratio / n), QuadratureConfig(points, 6))
    D, M = ops.D, ops.M
    assert max_abs(D @ np.ones(m.n_dofs)) <= 1e-8 * max_abs(D)
    assert max_abs(D - D.T) <= 1e-10 * max_abs(D)
    assert max_abs(M - M.T) <= 1e-10 * max_abs(M)


def test_csr_layout(mesh4):
    D = assemble_diffusion(mesh4, make_kernel_family((1.0,), 0.3))
    assert D.shape == (mesh4.n_dofs, mesh4.n_dofs)
    for r in range(D.shape[0]):
        cols = D.indices[D.indptr[r]:D.indptr[r + 1]]
        assert np.all(np.diff(cols) > 0)


@pytest.mark.parametrize("delta", [0.1, 0.2])
def test_sparsity_follows_horizon(mesh8, delta):
    kf = make_kernel_family((1.0, -1.0), delta)
    M = assemble_zero_order(mesh8, kf).tocoo()
    tri = mesh8.cell_coords()
    present = set(zip((M.row // 3).tolist(), (M.col // 3).tolist()))
    for i in range(mesh8.n_cells):
        close = set(np.nonzero(triangle_distances(tri[i], tri) < kf.horizon)[0].tolist())
        assert {j for (a, j) in present if a == i} == close | {i}


def test_interior_row_sums(mesh8):
    # far from the boundary int Rbar_delta(x, .) = 1, so (M 1)_(i,k) = area / 3
    kf = make_kernel_family((1.0, 2.0, -1.0), 0.05)
    ops = assemble_operators(mesh8, kf)
    b = assemble_rhs(mesh8, kf, ones, zeros, M=ops.M)
    Mc = ops.M @ np.ones(mesh8.n_dofs)
    interior = [i for i in range(mesh8.n_cells)
                if np.all((mesh8.cell_coords(i) > kf.horizon) & (mesh8.cell_coords(i) < 1 - kf.horizon))]
    assert interior
    for i in interior:
        np.testing.assert_allclose(Mc[3 * i:3 * i + 3], mesh8.areas[i] / 3, rtol=0, atol=1e-8 * mesh8.areas[i])
        np.testing.assert_allclose(b[3 * i:3 * i + 3], mesh8.areas[i] / 3, rtol=0, atol=1e-8 * mesh8.areas[i])


def test_rhs_zero_data(mesh4):
    kf = make_kernel_family((1.0,), 0.3)
    assert not np.any(assemble_rhs(mesh4, kf, zeros, zeros))
    assert not np.any(assemble_boundary(mesh4, kf, zeros))


def test_interpolate():
    m = generate_unit_square_mesh(2)
    assert np.all(interpolate(ones, m) == 1.0)
    vals = interpolate(lambda p: np.atleast_2d(p)[:, 0], m)
    pts = m.cell_coords().reshape(-1, 2)
    hit = np.nonzero(np.all(pts == (0.5, 0.0), axis=1))[0]
    assert len(hit) and np.all(vals[hit] == 0.5)


def test_interpolate_reproduces_affine(mesh4):
    field = lambda p: 0.3 - 2.0 * np.atleast_2d(p)[:, 0] + 0.7 * np.atleast_2d(p)[:, 1]  # noqa: E731
    c = interpolate(field, mesh4).reshape(-1, 3)
    grads, offs = mesh4.basis_arrays()
    rng = np.random.default_rng(0)
    for i in range(mesh4.n_cells):
        w = rng.dirichlet(np.ones(3))
        x = w @ mesh4.cell_coords(i)
        assert c[i] @ (grads[i] @ x + offs[i]) == pytest.approx(field(x)[0], abs=1e-14)


def test_horizon_too_small(mesh4):
    with pytest.raises(HorizonTooSmall):
        assemble_operators(mesh4, make_kernel_family((1.0,), 0.001))


def test_single_cell_pair_matches_oracle():
    m = generate_unit_square_mesh(1)
    kf = make_kernel_family((1.0,), 2.0)
    ops = assemble_operators(m, kf)
    D, M = ops.D.toarray(), ops.M.toarray()
    for row in [(0, 0), (1, 2)]:
        for col in [(0, 0), (0, 1), (1, 1)]:
            a, b = 3 * row[0] + row[1], 3 * col[0] + col[1]
            ref = oracle.brute_force_diffusion_entry(m, kf, row, col).value
            assert D[a, b] == pytest.approx(ref, rel=1e-8)
            ref = oracle.brute_force_zero_order_entry(m, kf, row, col).value
            assert M[a, b] == pytest.approx(ref, rel=1e-8)


def test_rhs_matches_oracle():
    m = generate_unit_square_mesh(2)
    kf = make_kernel_family((1.0, -1.0), 0.8)
    f = lambda p: 1.0 + np.atleast_2d(p)[:, 0] ** 2 - np.atleast_2d(p)[:, 1]  # noqa: E731
    g = lambda p: 0.5 - np.atleast_2d(p)[:, 0] * np.atleast_2d(p)[:, 1]  # noqa: E731
    b = assemble_rhs(m, kf, f, g)
    fd = interpolate(f, m)
    for r in range(0, m.n_dofs, 5):
        ref = oracle.brute_force_rhs_entry(m, kf, (r // 3, r % 3), fd, g).value
        assert b[r] == pytest.approx(ref, rel=1e-7)


def test_refinement_consistency(mesh8):
    kf = make_kernel_family((1.0,), 4.0 / 8)
    base = assemble_operators(mesh8, kf)
    fine = assemble_operators(mesh8, kf, QuadratureConfig().refined())
    for A, B in ((base.D, fine.D), (base.M, fine.M)):
        assert max_abs(A - B) <= 1e-6 * max_abs(B)


def test_deterministic(mesh4):
    kf = make_kernel_family((1.0, -1.0), 0.3)
    a, b = assemble_operators(mesh4, kf), assemble_operators(mesh4, kf)
    for A, B in ((a.D, b.D), (a.M, b.M)):
        np.testing.assert_array_equal(A.indptr, B.indptr)
        np.testing.assert_array_equal(A.indices, B.indices)
        np.testing.assert_array_equal(A.data, B.data)


@settings(max_examples=8)
@given(st.floats(0.0, 2 * np.pi), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.6, 3.0))
def test_rigid_motion_invariance(angle, sx, sy, ratio):
    m = generate_unit_square_mesh(3)
    kf = make_kernel_family((1.0, -1.0), ratio / 3)
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    moved = build_mesh(m.vertices @ rot.T + (sx, sy), m.cells)
    # the kink-aware decomposition depends on the frame, so agreement is up
    # to the outer quadrature error; 16 points push that below 1e-11
    q = QuadratureConfig(16, 6)
    a, b = assemble_operators(m, kf, q), assemble_operators(moved, kf, q)
    for A, B in ((a.D, b.D), (a.M, b.M)):
        assert max_abs(A - B) <= 1e-10 * max_abs(A)


def test_system_positive_definite(mesh4):
    sys_ = assemble_system(mesh4, make_kernel_family((1.0,), 0.25), ones, zeros)
    np.linalg.cholesky(sys_.S.toarray())
    assert max_abs(sys_.S - sys_.S.T) <= 1e-10 * max_abs(sys_.S)
