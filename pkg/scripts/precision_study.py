#!/usr/bin/env python3
"""How far the AIM recurrence can go in double precision.

For each model the termination condition delta_k is evaluated at a trial
energy away from any level, once with float64 coefficients and once in
extended precision.  The table lists the relative disagreement per depth
k.  A second table gives the ground-state root found by bisection on
delta_k in both arithmetics, and the number of sign changes of delta_k
along a uniform energy scan of the model's default bracket.

The roots agree because delta_k carries the exact factor d(d+1)...(d+k-1)
for these seeds; what float64 loses at large k is the sign of delta_k
between roots, which is what a scan relies on.
"""

import argparse

import numpy as np

from diatomic_aim import Coulomb, Kratzer, Mie, Pseudoharmonic, aim_seed, delta, iterate
from diatomic_aim.potentials import rel_diff

MODELS = {
    "mie": Mie(1.0, 1.0),
    "kratzer": Kratzer(5.0, 1.0),
    "coulomb": Coulomb(1.0),
    "pseudoharmonic": Pseudoharmonic(1.0, 1.0),
}


def trial_energy(m):
    e0, e1 = m.closed_form_energy(0, 0), m.closed_form_energy(1, 0)
    return 0.5 * (e0 + e1)


def root(m, k, float64, lo, hi, tol=1e-13):
    def f(E):
        sd = aim_seed(m, 0, E)
        return delta(iterate(sd, k, float64=float64), k, sd.eval_point)

    fa = f(lo)
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            lo, fa = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_changes(m, k, float64, points=120):
    lo, hi = m.default_bracket(0, 3)
    signs = []
    for E in np.linspace(lo, hi, points):
        sd = aim_seed(m, 0, float(E))
        v = delta(iterate(sd, k, float64=float64), k, sd.eval_point)
        signs.append((v > 0) - (v < 0))
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=30)
    args = ap.parse_args(argv)
    ks = range(2, args.k_max + 1, 2)

    print("relative difference of delta_k, float64 vs extended precision")
    print("k    " + "  ".join(f"{name:>14}" for name in MODELS))
    states = {}
    for name, m in MODELS.items():
        sd = aim_seed(m, 0, trial_energy(m))
        states[name] = (sd, iterate(sd, args.k_max, float64=True), iterate(sd, args.k_max))
    for k in ks:
        cells = []
        for sd, lo, hi in states.values():
            a, b = delta(lo, k, sd.eval_point), delta(hi, k, sd.eval_point)
            cells.append(f"{abs(a - b) / abs(b):14.2e}" if b else f"{'exact':>14}")
        print(f"{k:<4} " + "  ".join(cells))

    print("\nground-state root of delta_k, relative error vs closed form")
    print(f"{'model':<15} {'k':>3} {'float64':>10} {'extended':>10} {'scan sign changes f64/ext':>26}")
    for name, m in MODELS.items():
        E0 = m.closed_form_energy(0, 0)
        lo, hi = E0 - 0.1 * abs(E0) - 1e-3, E0 + 0.1 * abs(E0) + 1e-3
        for k in (8, 16, 24):
            if k > args.k_max:
                continue
            r64 = root(m, k, True, lo, hi)
            rmp = root(m, k, False, lo, hi)
            sc = f"{sign_changes(m, k, True)}/{sign_changes(m, k, False)}"
            print(f"{name:<15} {k:>3} {rel_diff(r64, E0):10.2e} {rel_diff(rmp, E0):10.2e} {sc:>26}")


if __name__ == "__main__":
    main()
