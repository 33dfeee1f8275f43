import csv

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nlfem.export import (SOLUTION_COLUMNS, VECTOR_HEADER, fmt, read_matrix_market, read_vector, write_csv,
                          write_matrix_market, write_solution_csv, write_vector)
from nlfem.mesh import generate_unit_square_mesh

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite)
def test_fmt_round_trip(x):
    assert float(fmt(x)) == x


def test_fmt_ints():
    assert fmt(3) == "3" and fmt(np.int64(-2)) == "-2" and fmt("const") == "const"


def test_matrix_market(tmp_path):
    rng = np.random.default_rng(0)
    A = sp.random(12, 12, density=0.3, random_state=1)
    A = sp.csr_matrix(A + A.T) + sp.identity(12) * rng.random()
    path = tmp_path / "S.mtx"
    write_matrix_market(path, A, comment=" test")
    assert path.read_text().splitlines()[0] == "%%MatrixMarket matrix coordinate real symmetric"
    B = read_matrix_market(path)
    assert abs(A - B).max() == 0.0


@given(arrays(np.float64, st.integers(0, 30), elements=finite))
def test_vector_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("v") / "b.txt"
    write_vector(path, values)
    lines = path.read_text().splitlines()
    assert lines[0] == VECTOR_HEADER and len(lines) == len(values) + 1
    np.testing.assert_array_equal(read_vector(path), values)


def test_csv(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ("a", "b"), [(1, 0.1), (2, 1 / 3)])
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["a", "b"] and float(rows[2][1]) == 1 / 3


def test_solution_csv(tmp_path):
    m = generate_unit_square_mesh(2)
    c = np.arange(m.n_dofs) / 7.0
    path = tmp_path / "u.csv"
    write_solution_csv(path, m, c)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == SOLUTION_COLUMNS
    assert len(rows) == m.n_dofs + 1
    cell, local, x, y, v = rows[3 * 5 + 2 + 1]
    assert (int(cell), int(local)) == (5, 2)
    np.testing.assert_array_equal([float(x), float(y)], m.cell_coords(5)[2])
    assert float(v) == c[17]


def test_solution_csv_length_check(tmp_path):
    with pytest.raises(ValueError):
        write_solution_csv(tmp_path / "u.csv", generate_unit_square_mesh(1), np.zeros(5))
