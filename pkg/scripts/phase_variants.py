"""Filters produced by the zero, linear and quadratic phase choices.

Linear phases only translate the filter by -2 K0; quadratic phases turn
the synthesis weights into a slowly decaying sequence.

Usage: python3 scripts/phase_variants.py --seed box-momentum:2
"""

import argparse

from seedmra import PhaseSpec, c_weights, parse_seed, run_pipeline
from seedmra.seqtools import classify_decay


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="box-momentum:2")
    ap.add_argument("--radius", type=int, default=4)
    ap.add_argument("--s-max", type=int, default=256, help="weights kept for the quadratic phases")
    args = ap.parse_args()

    seed = parse_seed(args.seed)
    base = run_pipeline(seed, radius=args.radius, with_psf=False)
    print(f"seed {seed.label()}: zero phase filter n={base.H.n_min}..{base.H.n_max} {base.report.verdicts}")
    for k0 in (-2, 1, 3):
        res = run_pipeline(seed, PhaseSpec("linear", k0=k0), radius=args.radius, with_psf=False)
        shift = max(abs(res.H[n - 2 * k0] - base.H[n]) for n in base.H.indices)
        print(f"  linear K0={k0:+d}: n={res.H.n_min}..{res.H.n_max}, max |H'_(n-2K0) - H_n| = {shift:.1e}, "
              f"verdicts {res.report.verdicts}")
    for gamma in (0.5, 1.0, 2.0):
        c = c_weights(base.series, PhaseSpec("quadratic", gamma=gamma), s_max=args.s_max)
        print(f"  quadratic gamma={gamma}: c_s {classify_decay(c.as_sequence())}, "
              f"sum |c_s|^2 = {float((abs(c.values) ** 2).sum()):.6f}")


if __name__ == "__main__":
    main()
