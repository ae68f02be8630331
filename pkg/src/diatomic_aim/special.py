"""Generalized Laguerre polynomials, normalization and ODE residuals.

The radial wavefunctions of all four models share the shape

    R(r) = N * rho**gamma * exp(-rho/2) * L_n^(w)(rho),   rho = 2 alpha r**k,

with a real, generally irrational, Laguerre parameter ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, GridError, QuadratureError
from .ratfun import Polynomial

#: Relative magnitude of |R| at the grid end above which the support is cut off.
TAIL_TOL = 1e-8
#: Relative uniformity required of a grid used with the central-difference stencil.
UNIFORM_TOL = 1e-9
#: Residual is measured on r >= RESIDUAL_CUT * natural length (see ode_residual).
RESIDUAL_CUT = 0.1


@dataclass(frozen=True)
class LaguerreSpec:
    n: int
    w: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Laguerre degree must be a nonnegative integer, got {self.n!r}")
        if not self.w > -1:
            raise DomainError(f"Laguerre parameter must exceed -1, got {self.w!r}")


def laguerre_eval(spec: LaguerreSpec, x):
    """L_n^(w)(x) by the three-term recurrence; ``x`` may be an array."""
    x = np.asarray(x, dtype=float)
    n, w = spec.n, spec.w
    prev, cur = np.ones_like(x), 1.0 + w - x
    if n == 0:
        return prev if prev.ndim else float(prev)
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + w - x) * cur - (k + w) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_polynomial(n: int, w: float) -> Polynomial:
    """Coefficients of L_n^(w) from the same recurrence, lowest power first."""
    LaguerreSpec(n, w)
    x = Polynomial([0.0, 1.0])
    prev, cur = Polynomial([1.0]), Polynomial([1.0 + w, -1.0])
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, (Polynomial([2 * k + 1 + w]) - x) * cur * (1 / (k + 1)) - prev * ((k + w) / (k + 1))
    return cur


@dataclass(frozen=True)
class RadialWavefunction:
    r_grid: np.ndarray
    values: np.ndarray
    n: int
    l: int
    norm_constant: float = 1.0
    node_count: int = 0
    residual_l2: float = float("nan")
    energy: float = float("nan")

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise DomainError("r_grid and values must be 1-D arrays of equal length")
        if r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0:
            raise DomainError("r_grid must be strictly increasing and positive")
        object.__setattr__(self, "r_grid", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "node_count", count_nodes(v))


def count_nodes(values) -> int:
    """Interior sign changes, ignoring values at round-off level."""
    v = np.asarray(values, dtype=float)
    peak = np.max(np.abs(v)) if v.size else 0.0
    s = np.sign(v[np.abs(v) > 1e-14 * peak])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def tail_ok(values, tol: float = TAIL_TOL) -> bool:
    v = np.abs(np.asarray(values, dtype=float))
    return bool(v[-1] < tol * v.max())


def normalize(wf: RadialWavefunction) -> RadialWavefunction:
    """Scale ``wf`` so that the Simpson estimate of int R^2 r^2 dr is 1."""
    if not tail_ok(wf.values):
        raise QuadratureError(
            f"|R(r_max)| / max|R| = {abs(wf.values[-1]) / np.max(np.abs(wf.values)):.3g} "
            f">= {TAIL_TOL:g}: grid ends at r={wf.r_grid[-1]:g} inside the support"
        )
    integral = simpson(wf.values**2 * wf.r_grid**2, x=wf.r_grid)
    if not integral > 0:
        raise DomainError("wavefunction has zero norm")
    f = 1.0 / math.sqrt(integral)
    return replace(wf, values=wf.values * f, norm_constant=wf.norm_constant * f)


def _uniform_step(r: np.ndarray) -> float:
    if r.size < 5:
        raise GridError(f"need at least 5 grid points, got {r.size}")
    d = np.diff(r)
    h = (r[-1] - r[0]) / (r.size - 1)
    if np.max(np.abs(d - h)) > UNIFORM_TOL * max(h, abs(r[-1])):
        raise GridError("central-difference residual needs a uniform grid")
    return h


def ode_residual(model, E: float, wf: RadialWavefunction, r_cut: float | None = None) -> float:
    """Relative residual of the radial equation for sampled R.

    The left side R'' + (2/r) R' + (2 mu/hbar^2)[E - V - l(l+1) hbar^2/(2 mu r^2)] R is
    formed with second-order central differences on interior points, and its
    norm is divided by that of (2 mu/hbar^2) E R.  Both norms use the radial
    measure r^2 dr.

    Points with r < ``r_cut`` (default 0.1 natural lengths) are excluded.
    Near the origin R ~ r^gamma with non-integer gamma, so R''' is singular
    there and the stencil error is not O(h^2); the cut restores
    second-order convergence without hiding any error in the bulk.
    """
    r, R = wf.r_grid, wf.values
    h = _uniform_step(r)
    if not np.any(R):
        raise DomainError("residual of the zero function is undefined")
    u = model.units
    ri, Ri = r[1:-1], R[1:-1]
    d2 = (R[2:] - 2 * Ri + R[:-2]) / h**2
    d1 = (R[2:] - R[:-2]) / (2 * h)
    k2 = 2 * u.mu / u.hbar**2
    centrifugal = wf.l * (wf.l + 1) * u.kinetic / ri**2
    res = d2 + 2 / ri * d1 + k2 * (E - model.value(ri) - centrifugal) * Ri
    ref = k2 * E * Ri
    cut = RESIDUAL_CUT * model.natural_length if r_cut is None else r_cut
    mask = ri >= cut
    den = np.linalg.norm((ri * ref)[mask])
    if not den > 0:
        raise DomainError("reference term (2 mu/hbar^2) E R vanishes on the grid")
    return float(np.linalg.norm((ri * res)[mask]) / den)


def default_grid(model, r_max: float | None = None, points: int = 20000) -> np.ndarray:
    L = model.natural_length
    return np.linspace(1e-4 * L, 40 * L if r_max is None else r_max, points)


def closed_form_values(model, n: int, l: int, r):
    """Unnormalized rho^gamma exp(-rho/2) L_n^(w)(rho) at the closed-form energy."""
    E = model.closed_form_energy(n, l)
    p = model.derive_params(l, E)
    rho = model.rho(r, p.alpha)
    w = model.laguerre_parameter(l)
    # log form keeps rho^gamma exp(-rho/2) finite far out on long grids
    envelope = np.exp(p.gamma * np.log(rho) - rho / 2)
    return E, envelope * laguerre_eval(LaguerreSpec(n, w), rho)


def sample_radial_wavefunction(model, n: int, l: int, grid=None, *, r_max=None, points=20000,
                               extensions: int = 3) -> RadialWavefunction:
    """Normalized closed-form R_{n l} with node count and ODE residual.

    Without an explicit ``grid`` the default grid is used and, if the tail
    condition fails, r_max and the point count are doubled (keeping the step)
    up to ``extensions`` times.  An explicit grid is used as given.
    """
    if grid is not None:
        r = np.asarray(grid, dtype=float)
        if r.ndim != 1 or r.size < 2 or r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise DomainError("grid must be strictly increasing and positive")
        return _build(model, n, l, r)
    r = default_grid(model, r_max, points)
    for attempt in range(extensions + 1):
        try:
            return _build(model, n, l, r)
        except QuadratureError:
            if attempt == extensions:
                raise
            r = np.linspace(r[0], r[0] + 2 * (r[-1] - r[0]), 2 * r.size - 1)
    raise AssertionError("unreachable")


def _build(model, n, l, r):
    E, v = closed_form_values(model, n, l, r)
    wf = normalize(RadialWavefunction(r, v, n, l, energy=E))
    try:
        resid = ode_residual(model, E, wf)
    except GridError:
        resid = float("nan")
    return replace(wf, residual_l2=resid)
