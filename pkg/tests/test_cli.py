import csv
import io
import subprocess
import sys
from contextlib import redirect_stdout

import numpy as np
import pytest

from nlfem.cli import main
from nlfem.export import read_matrix_market, read_vector
from nlfem.mesh import load_mesh


def run(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        try:
            code = main(list(argv))
        except SystemExit as e:  # argparse usage errors
            code = e.code
    return code, out.getvalue()


@pytest.fixture
def mesh_file(tmp_path):
    path = tmp_path / "m4.txt"
    assert run("mesh-gen", "--n", "4", "--out", str(path))[0] == 0
    return path


def test_mesh_gen(mesh_file, tmp_path):
    m = load_mesh(mesh_file.read_text())
    assert len(m.vertices) == 25
    again = tmp_path / "again.txt"
    run("mesh-gen", "--n", "4", "--out", str(again))
    assert again.read_bytes() == mesh_file.read_bytes()


@pytest.mark.parametrize("n", ["0", "-3", "two"])
def test_mesh_gen_bad_n(tmp_path, n):
    assert run("mesh-gen", "--n", n, "--out", str(tmp_path / "x.txt"))[0] == 2


def test_solve_constant(mesh_file, tmp_path):
    out = tmp_path / "u.csv"
    code, text = run("solve", "--mesh", str(mesh_file), "--kernel", "const", "--delta", "0.25",
                     "--problem", "constant", "--out", str(out), "--matrix-out", str(tmp_path / "S.mtx"),
                     "--rhs-out", str(tmp_path / "b.txt"), "--solution-out", str(tmp_path / "c.txt"))
    assert code == 0
    vals = dict(line.split() for line in text.splitlines())
    assert float(vals["Linf"]) <= 1e-6
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["cell", "local", "x", "y", "value"] and len(rows) == 97
    S = read_matrix_market(tmp_path / "S.mtx")
    c = read_vector(tmp_path / "c.txt")
    b = read_vector(tmp_path / "b.txt")
    assert np.linalg.norm(S @ c - b) <= 1e-9 * np.linalg.norm(b)
    np.testing.assert_array_equal(c, [float(r[4]) for r in rows[1:]])


def test_solve_cosine_and_cg_log(mesh_file, tmp_path):
    code, text = run("solve", "--mesh", str(mesh_file), "--kernel", "quadratic", "--delta", "0.25",
                     "--problem", "cosine", "--out", str(tmp_path / "u.csv"), "--cg-log",
                     "--edge-quad", "6", "--tri-quad-degree", "4", "--threads", "1")
    assert code == 0
    lines = text.splitlines()
    assert any(line.startswith("iter 1 relres ") for line in lines)
    vals = dict(line.split() for line in lines if not line.startswith("iter"))
    assert np.isfinite(float(vals["L2"])) and np.isfinite(float(vals["Linf"]))


def test_solve_errors(mesh_file, tmp_path):
    out = str(tmp_path / "u.csv")
    assert run("solve", "--mesh", str(tmp_path / "missing.txt"), "--delta", "0.25", "--out", out)[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("nlfem-mesh 1\n3 1 0\n0 0\n0 1\n1 0\n0 1 2\n")  # clockwise
    assert run("solve", "--mesh", str(bad), "--delta", "0.25", "--out", out)[0] == 2
    assert run("solve", "--mesh", str(mesh_file), "--delta", "0.001", "--out", out)[0] == 4
    assert run("solve", "--mesh", str(mesh_file), "--delta", "0.25", "--kernel", "gauss", "--out", out)[0] == 4
    assert run("solve", "--mesh", str(mesh_file), "--delta", "0.25", "--kernel", "poly:0", "--out", out)[0] == 4
    assert run("solve", "--mesh", str(mesh_file), "--delta", "0.25", "--problem", "cosine",
               "--maxiter", "1", "--out", out)[0] == 3
    assert run("solve", "--mesh", str(mesh_file), "--delta", "0.25", "--edge-quad", "40", "--out", out)[0] == 4
    assert run("solve", "--mesh", str(mesh_file), "--delta", "-1", "--out", out)[0] == 2


def test_convergence(tmp_path):
    out = tmp_path / "conv.csv"
    code, _ = run("convergence", "--levels", "2", "--delta-ratio", "2", "--problem", "cosine", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["level", "n", "h", "delta", "l2", "linf", "assembly_seconds", "cg_iters"]
    assert len(rows) == 3
    assert float(rows[2][4]) < float(rows[1][4])


def test_convergence_needs_two_levels(tmp_path):
    assert run("convergence", "--levels", "1", "--delta-ratio", "2", "--out", str(tmp_path / "c.csv"))[0] == 2


def test_verify():
    code, text = run("verify", "--suite", "kernels")
    assert code == 0
    lines = text.splitlines()
    assert lines and all(line.startswith("PASS ") for line in lines)
    assert run("verify", "--suite", "nope")[0] == 2


def test_no_command():
    assert run()[0] == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nlfem.cli", "mesh-gen", "--n", "1", "--out", str(tmp_path / "m.txt")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "nlfem.cli", "solve", "--mesh", str(tmp_path / "nope"),
                           "--delta", "1", "--out", str(tmp_path / "u.csv")], capture_output=True, text=True)
    assert proc.returncode == 2 and "nope" in proc.stderr
