import numpy as np
import pytest

from nlfem.mesh import generate_unit_square_mesh
from nlfem.problems import PROBLEMS, get_problem
from nlfem.study import CONVERGENCE_COLUMNS, ConvergenceConfig, SolveConfig, convergence_study, solve


def test_problems():
    p = np.array([[0.0, 0.0], [0.5, 0.25], [1.0, 1.0]])
    assert set(PROBLEMS) == {"constant", "cosine"}
    cos = get_problem("cosine")
    np.testing.assert_allclose(cos.exact(p), np.cos(np.pi * p[:, 0]) * np.cos(np.pi * p[:, 1]))
    np.testing.assert_allclose(cos.f(p), (2 * np.pi**2 + 1) * cos.exact(p))
    assert not np.any(cos.g(p))
    const = get_problem("constant")
    assert np.all(const.f(p) == 1) and np.all(const.exact(p) == 1) and not np.any(const.g(p))
    with pytest.raises(ValueError):
        get_problem("sine")


def test_constant_solution_exact():
    run = solve(generate_unit_square_mesh(4), SolveConfig(delta=0.25))
    assert run.linf <= 1e-6
    assert run.cg.iterations > 0 and run.assembly_seconds > 0


def test_convergence_rows():
    rows = convergence_study(ConvergenceConfig(levels=2, delta_ratio=2.0))
    assert len(rows) == 2 and all(len(r) == len(CONVERGENCE_COLUMNS) for r in rows)
    (l0, n0, h0, d0, e0, *_), (l1, n1, h1, d1, e1, *_) = rows
    assert (l0, n0, h0, d0) == (0, 4, 0.25, 0.5) and (l1, n1, h1, d1) == (1, 8, 0.125, 0.25)
    assert e1 < e0


def test_convergence_needs_two_levels():
    with pytest.raises(ValueError):
        convergence_study(ConvergenceConfig(levels=1))


def test_kernel_family_from_config():
    kf = SolveConfig(kernel="poly:2,-1", delta=0.2).kernel_family()
    assert kf.r_poly.coeffs == (2.0, -1.0) and kf.delta == 0.2
