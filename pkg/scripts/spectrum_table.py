#!/usr/bin/env python3
"""Closed-form, AIM and finite-difference energies for all four models.

Writes one CSV row per (model, n, l) with n, l <= --max.
"""

import argparse
import csv
import sys
import time

from diatomic_aim import Coulomb, Kratzer, Mie, Pseudoharmonic, find_eigenvalues, solve_levels
from diatomic_aim.potentials import rel_diff

MODELS = {
    "mie": Mie(1.0, 1.0),
    "kratzer": Kratzer(5.0, 1.0),
    "coulomb": Coulomb(1.0),
    "pseudoharmonic": Pseudoharmonic(1.0, 1.0),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=2, help="largest n and l (default 2)")
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args(argv)

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["model", "n", "l", "E_closed", "E_aim", "E_oracle", "rel_aim", "rel_oracle", "k_used"])
    for name, m in MODELS.items():
        for l in range(args.max + 1):
            t0 = time.perf_counter()
            aim = find_eigenvalues(m, l, args.max + 1)
            oracle = solve_levels(m, l, args.max + 1)
            for n in range(args.max + 1):
                E = m.closed_form_energy(n, l)
                w.writerow([name, n, l, f"{E:.12g}", f"{aim[n].energy:.12g}", f"{oracle[n]:.12g}",
                            f"{rel_diff(aim[n].energy, E):.2e}", f"{rel_diff(oracle[n], E):.2e}",
                            aim[n].iterations_used])
            print(f"{name} l={l}: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
