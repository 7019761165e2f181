"""Positivity sweep for momentum boxes of odd width 2k+1.

For each k the spectral series S(0, p) is compared with the closed form
1 + 2/(2k+1) sum_j (2j+1) cos(p (k-j)) and its certified minimum is printed.
Up to ``--full-up-to`` the complete overlap table is integrated; beyond that
only the l1 = 0 column is, since the other columns of an integer-width box
vanish (this is checked on the full tables first).

Usage: python3 scripts/odd_box_positivity_sweep.py --k-max 100
"""

import argparse
import time

import numpy as np

from seedmra import BoxMomentum, OverlapTable, overlap_coefficient, overlap_table, spectral_series
from seedmra.catalog import _example7_closed_form


def column_table(seed, radius):
    vals = np.zeros((2 * radius + 1, 2 * radius + 1), dtype=complex)
    for l2 in range(0, radius + 1):
        v = overlap_coefficient(seed, 0, l2)
        vals[radius, radius + l2] = v
        vals[radius, radius - l2] = np.conj(v)
    ring = np.concatenate([vals[0, :], vals[-1, :], vals[:, 0], vals[:, -1]])
    return OverlapTable(radius, vals, float(np.max(np.abs(ring))), seed=seed.descriptor())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=100)
    ap.add_argument("--full-up-to", type=int, default=20)
    args = ap.parse_args()

    p = np.linspace(0, 2 * np.pi, 4001)
    print(f"{'k':>4} {'table':>6} {'max|S-closed|':>14} {'min S':>12} {'argmin':>9} {'off-column':>11} {'sec':>6}")
    worst = 0.0
    for k in range(args.k_max + 1):
        t = time.perf_counter()
        seed = BoxMomentum(2 * k + 1)
        radius = k + 1
        if k <= args.full_up_to:
            table = overlap_table(seed, radius)
            off = float(np.max(np.abs(np.delete(table.values, radius, axis=0)))) if radius else 0.0
            kind = "full"
        else:
            table = column_table(seed, radius)
            off, kind = float("nan"), "column"
        series = spectral_series(table, grid=max(4096, 64 * radius))
        err = float(np.max(np.abs(series(p) - _example7_closed_form(k, p))))
        worst = max(worst, err)
        print(f"{k:4d} {kind:>6} {err:14.2e} {series.min_value:12.5e} {series.min_location:9.5f} {off:11.1e} "
              f"{time.perf_counter() - t:6.1f}")
    print(f"largest closed-form deviation: {worst:.2e}")


if __name__ == "__main__":
    main()
