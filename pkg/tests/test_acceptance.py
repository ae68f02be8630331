"""Exit criteria for the package, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``
or when the file is run as a script) before asserting.
"""

from __future__ import annotations

import math
import sys

import numpy as np
import pytest
from scipy.integrate import simpson

from diatomic_aim import (
    AimOptions,
    Coulomb,
    Kratzer,
    Mie,
    Pseudoharmonic,
    TridiagonalSystem,
    find_eigenvalues,
    lowest_eigenvalues,
    ode_residual,
    solve_levels,
)
from diatomic_aim.aim import default_eval_point
from diatomic_aim.potentials import rel_diff
from diatomic_aim.special import sample_radial_wavefunction

try:
    from fn_fixtures import GAMMAS, MIE_F, PSEUDO_F, scalar_fit_error
except ImportError:  # run as a script from elsewhere
    sys.path.insert(0, __file__.rsplit("/", 1)[0])
    from fn_fixtures import GAMMAS, MIE_F, PSEUDO_F, scalar_fit_error

MODELS = {
    "mie": Mie(1.0, 1.0),
    "kratzer": Kratzer(5.0, 1.0),
    "coulomb": Coulomb(1.0),
    "pseudoharmonic": Pseudoharmonic(1.0, 1.0),
}
N_MAX = 2
L_MAX = 2


def report(number: int, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    return ok


def criterion_1():
    worst, where = 0.0, ""
    for name, m in MODELS.items():
        for l in range(L_MAX + 1):
            for n, E in enumerate(solve_levels(m, l, N_MAX + 1)):
                d = rel_diff(E, m.closed_form_energy(n, l))
                if d > worst:
                    worst, where = d, f"{name} n={n} l={l}"
    return report(1, worst <= 1e-5, f"oracle vs closed form, max rel diff {worst:.2e} ({where}), tol 1e-5")


def criterion_2():
    worst, where, k_used = 0.0, "", 0
    for name, m in MODELS.items():
        for l in range(L_MAX + 1):
            for rep in find_eigenvalues(m, l, N_MAX + 1):
                d = rel_diff(rep.energy, m.closed_form_energy(rep.level_index, l))
                k_used = max(k_used, rep.iterations_used)
                if d > worst:
                    worst, where = d, f"{name} n={rep.level_index} l={l}"
    ok = worst <= 1e-7 and k_used <= 60
    return report(2, ok, f"AIM vs closed form, max rel diff {worst:.2e} ({where}), max k {k_used}")


def criterion_3():
    m = Coulomb(1.0)
    worst = 0.0
    for n in range(8):
        for l in range(8):
            exact = -1.0 / (2 * (n + l + 1) ** 2)
            worst = max(worst, rel_diff(m.closed_form_energy(n, l), exact))
    degenerate = all(
        m.closed_form_energy(n, s - n) == m.closed_form_energy(0, s) for s in range(8) for n in range(s + 1)
    )
    return report(3, worst <= 1e-14 and degenerate,
                  f"Coulomb closed form max rel err {worst:.1e}, n+l degeneracy exact: {degenerate}")


def criterion_4():
    errors = {}
    for g in GAMMAS:
        for n, f in MIE_F.items():
            errors[f"Mie f{n} gamma={g:.3f}"] = scalar_fit_error(f(g), n, 2 * g + 1)
        errors[f"pseudoharmonic f1 gamma={g:.3f}"] = scalar_fit_error(PSEUDO_F[1](g), 1, 2 * g + 0.5)
    bad = sorted(k for k, e in errors.items() if not e <= 1e-10)
    # documented expected failure, reported but not part of the verdict
    p2 = max(scalar_fit_error(PSEUDO_F[2](g), 2, 2 * g + 0.5) for g in GAMMAS)
    p3 = max(scalar_fit_error(PSEUDO_F[3](g), 3, 2 * g + 0.5) for g in GAMMAS)
    detail = (f"{len(errors) - len(bad)}/{len(errors)} fixtures match; "
              f"mismatched: {', '.join(bad) or 'none'}; "
              f"pseudoharmonic f2 err {p2:.2e} (expected failure), f3 err {p3:.2e}")
    return report(4, not bad, detail)


def _half_step(wf):
    r = wf.r_grid
    return np.linspace(r[0], r[-1], 2 * r.size - 1)


def criterion_5():
    problems, worst_res, ratios = [], 0.0, []
    for name, m in MODELS.items():
        for n in range(N_MAX + 1):
            for l in range(2):
                wf = sample_radial_wavefunction(m, n, l)
                fine = sample_radial_wavefunction(m, n, l, _half_step(wf))
                norm = simpson(fine.values**2 * fine.r_grid**2, x=fine.r_grid)
                ratio = wf.residual_l2 / fine.residual_l2
                worst_res = max(worst_res, fine.residual_l2)
                ratios.append(ratio)
                tag = f"{name} n={n} l={l}"
                if wf.node_count != n or fine.node_count != n:
                    problems.append(f"{tag} nodes={fine.node_count}")
                if abs(norm - 1) > 1e-8:
                    problems.append(f"{tag} norm-1={norm - 1:.1e}")
                if not fine.residual_l2 <= 1e-5:
                    problems.append(f"{tag} residual={fine.residual_l2:.1e}")
                if not 3.5 <= ratio <= 4.5:
                    problems.append(f"{tag} ratio={ratio:.2f}")
    detail = (f"max residual {worst_res:.2e}, step-halving ratios in "
              f"[{min(ratios):.2f}, {max(ratios):.2f}]; " + ("; ".join(problems) or "all checks met"))
    return report(5, not problems, detail)


def criterion_6():
    base_opts = dict(k_min=8, k_step=4, k_max=60)
    rho_gap, scale_gap = 0.0, 0.0
    for m in MODELS.values():
        c, _ = m.seed_coefficients(0, m.closed_form_energy(0, 0))
        x = default_eval_point(c)
        runs = [
            [r.energy for r in find_eigenvalues(m, 0, N_MAX + 1, opts=AimOptions(rho0=x * f, **base_opts))]
            for f in (0.5, 1.0, 2.0)
        ]
        rho_gap = max(rho_gap, float(np.max(np.ptp(np.array(runs), axis=0))))
        low_k = dict(k_min=8, k_step=4, k_max=12)
        on = find_eigenvalues(m, 0, N_MAX + 1, opts=AimOptions(rescale=True, **low_k))
        off = find_eigenvalues(m, 0, N_MAX + 1, opts=AimOptions(rescale=False, **low_k))
        scale_gap = max(scale_gap, max(abs(a.energy - b.energy) for a, b in zip(on, off)))
    ok = rho_gap <= 1e-7 and scale_gap <= 1e-10
    return report(6, ok, f"max spread over rho0 x4 range {rho_gap:.1e}; rescale on/off {scale_gap:.1e}")


def _charpoly_roots(d, e):
    """Roots of det(A - x I) from its coefficients, polished by Newton on the continuant."""
    roots = np.sort(np.roots(np.poly(TridiagonalSystem(d, e).dense())).real)

    def det_and_slope(x):
        p0, p1, q0, q1 = 1.0, d[0] - x, 0.0, -1.0
        for i in range(1, d.size):
            p0, p1, q0, q1 = p1, (d[i] - x) * p1 - e[i - 1] ** 2 * p0, q1, (d[i] - x) * q1 - p1 - e[i - 1] ** 2 * q0
        return p1, q1

    out = []
    for x in roots:
        for _ in range(4):
            p, q = det_and_slope(x)
            if q == 0:
                break
            x -= p / q
        out.append(x)
    return np.array(out)


def criterion_7():
    rng = np.random.default_rng(20240601)
    worst_random = 0.0
    for _ in range(50):
        d = rng.uniform(-5, 5, 5)
        e = rng.uniform(-2, 2, 4)
        ev = lowest_eigenvalues(TridiagonalSystem(d, e), 5, tol=1e-13)
        worst_random = max(worst_random, float(np.max(np.abs(np.array(ev) - _charpoly_roots(d, e)))))
    worst_lap = 0.0
    for N in (5, 20, 100):
        sysN = TridiagonalSystem(np.full(N, 2.0), np.full(N - 1, -1.0))
        exact = 2 - 2 * np.cos(np.arange(1, N + 1) * math.pi / (N + 1))
        worst_lap = max(worst_lap, float(np.max(np.abs(np.array(lowest_eigenvalues(sysN, N, tol=1e-14)) - exact))))
    ok = worst_random <= 1e-10 and worst_lap <= 1e-12
    return report(7, ok, f"random 5x5 max err {worst_random:.1e}; Laplacian max err {worst_lap:.1e}")


def criterion_8():
    m = MODELS["kratzer"]
    adopted, literal = 0.0, math.inf
    for l in range(L_MAX + 1):
        for n, E in enumerate(solve_levels(m, l, N_MAX + 1)):
            adopted = max(adopted, rel_diff(E, m.closed_form_energy(n, l)))
            literal = min(literal, rel_diff(E, m.literal_unsquared_energy(n, l)))
    ok = adopted <= 1e-5 and literal > 0.1
    return report(8, ok, f"Kratzer adopted reading max rel diff {adopted:.1e} (passes); "
                         f"literal reading min rel diff {literal:.2f} (> 0.1, fails)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.slow
@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    sys.exit(0 if all(results) else 1)
