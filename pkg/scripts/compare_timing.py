#!/usr/bin/env python3
"""Reduced assembly vs Monte Carlo oracle: time and accuracy on sampled entries.

For each sampled entry the oracle runs at the given sample count; the
reduced value is compared with it in standard errors.  The extrapolated
column estimates the Monte Carlo time needed to bring the standard error
down to the reduced assembly's own discretisation error (difference from a
refined-quadrature assembly), assuming SE ~ samples^(-1/2).
"""
import argparse
import time

import numpy as np

from nlfem import oracle
from nlfem.assembly import assemble_operators
from nlfem.kernel import PRESETS, make_kernel_family
from nlfem.mesh import generate_unit_square_mesh
from nlfem.quadrature import QuadratureConfig
from nlfem.verify import sample_entries


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--ratio", type=float, default=4.0)
    ap.add_argument("--kernel", default="const", choices=sorted(PRESETS))
    ap.add_argument("--entries", type=int, default=10)
    ap.add_argument("--samples", type=int, default=10**6)
    args = ap.parse_args()

    m = generate_unit_square_mesh(args.n)
    kf = make_kernel_family(PRESETS[args.kernel], args.ratio / args.n)
    assemble_operators(m, kf)  # warm up the compiled kernels
    t0 = time.perf_counter()
    ops = assemble_operators(m, kf)
    t_reduced = time.perf_counter() - t0
    fine = assemble_operators(m, kf, QuadratureConfig().refined())
    print(f"reduced assembly of all {m.n_dofs}x{m.n_dofs} entries: {t_reduced:.3f} s")

    t_mc = t_extra = 0.0
    for t, (row, col) in enumerate(sample_entries(m, kf.horizon, args.entries)):
        which, fn = ("D", oracle.brute_force_diffusion_entry) if t % 2 == 0 else ("M", oracle.brute_force_zero_order_entry)
        a, b = 3 * row[0] + row[1], 3 * col[0] + col[1]
        red, ref = getattr(ops, which)[a, b], getattr(fine, which)[a, b]
        t0 = time.perf_counter()
        est = fn(m, kf, row, col, mode="mc", samples=args.samples)
        dt = time.perf_counter() - t0
        t_mc += dt
        target = max(abs(red - ref), 1e-16 * abs(red))
        t_extra += dt * (est.stderr / target) ** 2
        print(f"{which}[{a},{b}] reduced={red:+.12e} mc={est.value:+.6e}±{est.stderr:.1e} "
              f"z={abs(red - est.value) / est.stderr:5.2f} t={dt:.2f}s")
    print(f"Monte Carlo, {args.entries} entries: {t_mc:.1f} s measured "
          f"({t_mc / t_reduced:.0f}x the full reduced assembly)")
    print(f"Monte Carlo at matching accuracy (extrapolated): {t_extra:.3g} s ({t_extra / t_reduced:.3g}x)")


if __name__ == "__main__":
    main()
