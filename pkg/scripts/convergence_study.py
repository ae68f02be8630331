#!/usr/bin/env python3
"""Grid convergence of the wavefunction residual and of the reference solver.

Part 1: relative ODE residual of the closed-form R_{n l} against the grid
step; second-order behaviour shows up as a ratio near 4 per halving.
Part 2: error of the finite-difference levels before and after Richardson
extrapolation as the number of grid points grows.
"""

import argparse

import numpy as np

from diatomic_aim import Coulomb, Kratzer, Mie, Pseudoharmonic
from diatomic_aim.oracle import RadialGrid, solve_levels_detailed
from diatomic_aim.potentials import rel_diff
from diatomic_aim.special import sample_radial_wavefunction

MODELS = {
    "mie": Mie(1.0, 1.0),
    "kratzer": Kratzer(5.0, 1.0),
    "coulomb": Coulomb(1.0),
    "pseudoharmonic": Pseudoharmonic(1.0, 1.0),
}


def residual_table(n, l):
    print(f"residual of R_(n={n}, l={l}) vs step h (units of natural length)")
    for name, m in MODELS.items():
        L = m.natural_length
        base = sample_radial_wavefunction(m, n, l).r_grid
        row, prev = [], None
        for factor in (1, 2, 4, 8):
            r = np.linspace(base[0], base[-1], (base.size - 1) * factor // 2 + 1)
            res = sample_radial_wavefunction(m, n, l, r).residual_l2
            h = (r[1] - r[0]) / L
            row.append(f"h={h:.1e}: {res:.2e}" + (f" (x{prev / res:.2f})" if prev else ""))
            prev = res
        print(f"  {name:<15} " + "  ".join(row))


def oracle_table(l, count):
    print(f"\nreference solver, l={l}: max relative error over the lowest {count} levels")
    print(f"  {'model':<15} {'points':>7} {'raw h':>10} {'Richardson':>11}  (box grows if a tail leaks)")
    for name, m in MODELS.items():
        exact = [m.closed_form_energy(n, l) for n in range(count)]
        L = m.natural_length
        for points in (1001, 2001, 4001):
            grid = RadialGrid(0.0, 40 * L, points)
            levels = solve_levels_detailed(m, l, count, grid)
            e_raw = max(rel_diff(lv.coarse, E) for lv, E in zip(levels, exact))
            e_rich = max(rel_diff(lv.energy, E) for lv, E in zip(levels, exact))
            print(f"  {name:<15} {points:>7} {e_raw:10.2e} {e_rich:11.2e}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--l", type=int, default=1)
    ap.add_argument("--count", type=int, default=3)
    args = ap.parse_args(argv)
    residual_table(args.n, args.l)
    oracle_table(args.l, args.count)


if __name__ == "__main__":
    main()
