"""File outputs: Matrix Market matrices, dof vectors and CSV tables."""
from __future__ import annotations

import csv
import os
from typing import Iterable, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from .mesh import Mesh

VECTOR_HEADER = "# dof (cell,local)"


def fmt(value) -> str:
    """Round-trip text for a float (17 significant digits); ints and strings unchanged."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_matrix_market(path: str | os.PathLike, S: sp.spmatrix, comment: str = "") -> None:
    """Symmetric coordinate storage (lower triangle, 1-based indices)."""
    S = sp.coo_matrix(S)
    scipy.io.mmwrite(os.fspath(path), S, comment=comment, field="real", precision=17, symmetry="symmetric")


def read_matrix_market(path: str | os.PathLike) -> sp.csr_matrix:
    return sp.csr_matrix(scipy.io.mmread(os.fspath(path)))


def write_vector(path: str | os.PathLike, values: np.ndarray) -> None:
    """One value per line, in dof order ``3 * cell + local``."""
    values = np.asarray(values, dtype=float).reshape(-1)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(VECTOR_HEADER + "\n")
        for v in values:
            fh.write(fmt(v) + "\n")


def read_vector(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return np.array([float(line) for line in fh if line.strip() and not line.startswith("#")])


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


SOLUTION_COLUMNS = ("cell", "local", "x", "y", "value")


def solution_rows(m: Mesh, c: np.ndarray):
    coords = m.cell_coords()
    c = np.asarray(c, dtype=float).reshape(-1, 3)
    for cell in range(m.n_cells):
        for k in range(3):
            yield cell, k, coords[cell, k, 0], coords[cell, k, 1], c[cell, k]


def write_solution_csv(path: str | os.PathLike, m: Mesh, c: np.ndarray) -> None:
    write_csv(path, SOLUTION_COLUMNS, solution_rows(m, c))
