#!/usr/bin/env python3
"""Compare the bracketing solver against the baseline power method.

Runs both on the bundled 2x3x4 sample for p in {3, 4, 5}, prints a
summary table, and writes one per-iteration CSV per (method, p) so the
convergence curves can be plotted externally.

Usage: python scripts/run_comparison.py [--out OUTDIR]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from tensornorm import (
    PVector,
    SolverConfig,
    estimate_rate,
    oracle_norm,
    read_tensor,
    solve_hgpm,
    solve_pm,
)

DATA = pathlib.Path(__file__).resolve().parents[1] / "data" / "example_2x3x4.tns"


def write_trace(path, result):
    final = next(rec.x for rec in reversed(result.trace) if rec.x is not None)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("k,lambda_minus,lambda_plus,err_vs_final\n")
        for rec in result.trace:
            err = float(np.linalg.norm(rec.x.concat() - final.concat()))
            handle.write(f"{rec.k},{rec.lambda_minus!r},{rec.lambda_plus!r},{err!r}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="directory for trace CSVs")
    parser.add_argument("--eps", type=float, default=1e-12)
    args = parser.parse_args()
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    with open(DATA, "r", encoding="utf-8") as handle:
        f = read_tensor(handle)

    print(f"tensor: dims={f.dims}, nnz={f.nnz}")
    header = f"{'p':>3} {'method':>6} {'lambda':>22} {'iters':>6} {'rate':>8} {'|hgpm-pm|':>10}"
    print(header)
    print("-" * len(header))
    for p in (3, 4, 5):
        pvec = PVector((p,) * f.order)
        hg = solve_hgpm(f, pvec, SolverConfig(epsilon=args.eps, keep_iterates=True))
        pm = solve_pm(f, float(p), epsilon=args.eps, keep_iterates=True)
        lam_ref, _ = oracle_norm(f, pvec, restarts=100, seed=0)
        write_trace(outdir / f"hgpm_p{p}.csv", hg)
        write_trace(outdir / f"pm_p{p}.csv", pm)
        for name, res in (("hgpm", hg), ("pm", pm)):
            final = next(rec.x for rec in reversed(res.trace) if rec.x is not None)
            try:
                rate = f"{estimate_rate(res.trace, final):.4f}"
            except ValueError:
                rate = "--"
            gap = abs(hg.lam - pm.lam)
            print(
                f"{p:>3} {name:>6} {res.lam:>22.13f} {res.iterations:>6} "
                f"{rate:>8} {gap:>10.2e}"
            )
        print(f"    oracle {lam_ref:>22.13f}   (100 restarts)")
    print(f"\ntraces written to {outdir}/")


if __name__ == "__main__":
    main()
