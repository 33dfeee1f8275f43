#!/usr/bin/env python3
"""Convergence sweep for both kernel presets; writes one CSV per kernel.

    python scripts/run_convergence.py --levels 4 --delta-ratio 2 --outdir results/
"""
import argparse
import math
import pathlib

from nlfem.export import write_csv
from nlfem.study import CONVERGENCE_COLUMNS, ConvergenceConfig, convergence_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--delta-ratio", type=float, default=2.0)
    ap.add_argument("--problem", default="cosine")
    ap.add_argument("--kernels", nargs="+", default=["const", "quadratic"])
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for kernel in args.kernels:
        cfg = ConvergenceConfig(levels=args.levels, delta_ratio=args.delta_ratio, problem=args.problem, kernel=kernel)
        rows = convergence_study(cfg)
        path = out / f"convergence_{kernel}_r{args.delta_ratio:g}.csv"
        write_csv(path, CONVERGENCE_COLUMNS, rows)
        print(f"# kernel={kernel} -> {path}")
        prev = None
        for level, n, h, delta, l2, linf, secs, iters in rows:
            rate = "" if prev is None else f"  rate {math.log2(prev / l2):.2f}"
            print(f"n={n:4d} delta={delta:.4f} l2={l2:.4e} linf={linf:.4e} cg={iters:3d} t={secs:.2f}s{rate}")
            prev = l2


if __name__ == "__main__":
    main()
