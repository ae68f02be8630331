"""Finite-difference reference solver for the radial equation.

The reduced function u = r R obeys

    -(hbar^2/2mu) u'' + [V(r) + hbar^2 l(l+1)/(2 mu r^2)] u = E u,

which a three-point stencil on a uniform grid with Dirichlet ends turns into
a symmetric tridiagonal eigenproblem.  Its lowest eigenvalues are located by
Sturm-sequence bisection, and the O(h^2) error is removed by Richardson
extrapolation between steps h and h/2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, UnconvergedLevel

log = logging.getLogger(__name__)

#: |u| beyond TAIL_FRACTION * r_max must stay below this fraction of its peak.
TAIL_TOL = 1e-6
TAIL_FRACTION = 0.9
#: Bisection width used by solve_levels, relative to the Gershgorin radius.
#: The generic 1e-12 default leaves ~1e-6 relative error on shallow levels
#: once the centrifugal wall at r = h inflates the radius.
LEVEL_TOL = 1e-15


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_min, r_min + h, ..., r_max; both ends are Dirichlet nodes.

    ``r_min = 0`` is allowed: the node at the origin carries u(0) = 0 and is
    not an unknown, so the centrifugal term is only evaluated at r > 0.
    """

    r_min: float
    r_max: float
    points: int

    def __post_init__(self):
        if not (self.r_min >= 0 and self.r_max > self.r_min and math.isfinite(self.r_max)):
            raise DomainError(f"need 0 <= r_min < r_max, got {self.r_min!r}, {self.r_max!r}")
        if int(self.points) != self.points or self.points < 100:
            raise DomainError(f"need at least 100 grid points, got {self.points!r}")

    @property
    def step(self) -> float:
        return (self.r_max - self.r_min) / (self.points - 1)

    def interior(self) -> np.ndarray:
        return self.r_min + self.step * np.arange(1, self.points - 1)

    def halved(self) -> "RadialGrid":
        return RadialGrid(self.r_min, self.r_max, 2 * self.points - 1)


@dataclass(frozen=True)
class TridiagonalSystem:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1 or e.shape != (d.size - 1,):
            raise DomainError("offdiag must have exactly one entry fewer than diag")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise DomainError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return self.diag.size

    def gershgorin(self) -> tuple[float, float]:
        a = np.abs(self.offdiag)
        rad = np.zeros(self.size)
        rad[:-1] += a
        rad[1:] += a
        return float(np.min(self.diag - rad)), float(np.max(self.diag + rad))

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def discretize(model, l: int, grid: RadialGrid) -> TridiagonalSystem:
    if int(l) != l or l < 0:
        raise DomainError(f"angular momentum must be a nonnegative integer, got {l!r}")
    u = model.units
    h = grid.step
    r = grid.interior()
    t = u.hbar**2 / (2 * u.mu * h * h)
    diag = 2 * t + model.value(r) + l * (l + 1) * u.kinetic / r**2
    if not np.all(np.isfinite(diag)):
        raise DomainError("potential is not finite on the grid")
    return TridiagonalSystem(diag, np.full(r.size - 1, -t))


def sturm_count(sys: TridiagonalSystem, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia)."""
    d = sys.diag.tolist()
    e2 = (sys.offdiag**2).tolist()
    return _sturm(d, e2, x, _pivmin(sys))


def _pivmin(sys: TridiagonalSystem) -> float:
    scale = max(1.0, float(np.max(np.abs(sys.diag))), float(np.max(np.abs(sys.offdiag), initial=0.0)))
    return np.finfo(float).tiny / np.finfo(float).eps * scale


def _sturm(d, e2, x, pivmin) -> int:
    neg = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        neg += 1
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            neg += 1
    return neg


def lowest_eigenvalues(sys: TridiagonalSystem, count: int, tol: float | None = None) -> list[float]:
    """The ``count`` smallest eigenvalues, ascending, by Sturm bisection.

    Each is bracketed to an absolute width of ``tol`` (default 1e-12 times
    the Gershgorin radius of the matrix).
    """
    if not 1 <= count <= sys.size:
        raise ValueError(f"count must be in [1, {sys.size}], got {count}")
    lo0, hi0 = sys.gershgorin()
    if tol is None:
        tol = 1e-12 * max(abs(lo0), abs(hi0), 1e-300)
    d = sys.diag.tolist()
    e2 = (sys.offdiag**2).tolist()
    pivmin = _pivmin(sys)
    out = []
    lo = lo0
    for j in range(count):
        # eigenvalue j is the smallest x with count(x) > j
        a, b = lo, hi0 + tol
        while b - a > tol:
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            if _sturm(d, e2, m, pivmin) > j:
                b = m
            else:
                a = m
        out.append(0.5 * (a + b))
        lo = a
    return out


def eigenvector(sys: TridiagonalSystem, E: float, iterations: int = 3) -> np.ndarray:
    """Unit eigenvector for an eigenvalue ``E`` by shifted inverse iteration."""
    n = sys.size
    lo, hi = sys.gershgorin()
    shift = E + 1e-10 * max(abs(lo), abs(hi))
    ab = np.zeros((3, n))
    ab[0, 1:] = sys.offdiag
    ab[1] = sys.diag - shift
    ab[2, :-1] = sys.offdiag
    v = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    return v


def tail_ratio(grid: RadialGrid, v: np.ndarray) -> float:
    r = grid.interior()
    a = np.abs(v)
    return float(np.max(a[r >= grid.r_min + TAIL_FRACTION * (grid.r_max - grid.r_min)]) / np.max(a))


def default_grid(model, r_max: float | None = None, points: int = 4001) -> RadialGrid:
    """[0, 40 L] with step 0.01 L, L the model's natural length."""
    L = model.natural_length
    return RadialGrid(0.0, 40 * L if r_max is None else r_max, points)


def _level_tol(sys: TridiagonalSystem) -> float:
    lo, hi = sys.gershgorin()
    return LEVEL_TOL * max(abs(lo), abs(hi))


@dataclass(frozen=True)
class OracleLevel:
    energy: float
    coarse: float
    fine: float
    tail: float
    r_max: float


def solve_levels_detailed(model, l: int, count: int, grid: RadialGrid | None = None,
                          extensions: int = 3) -> list[OracleLevel]:
    """Richardson-extrapolated levels with the data used to accept them.

    When a requested level leaks past ``TAIL_FRACTION * r_max`` the grid is
    doubled in length at fixed step, up to ``extensions`` times.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    grid = grid or default_grid(model)
    for attempt in range(extensions + 1):
        sys_h = discretize(model, l, grid)
        # the tail test only needs rough eigenvalues
        rough = lowest_eigenvalues(sys_h, count)
        tails = [tail_ratio(grid, eigenvector(sys_h, E)) for E in rough]
        bad = [j for j, t in enumerate(tails) if not t < TAIL_TOL]
        if not bad:
            sys_f = discretize(model, l, grid.halved())
            E_h = lowest_eigenvalues(sys_h, count, _level_tol(sys_h))
            E_f = lowest_eigenvalues(sys_f, count, _level_tol(sys_f))
            return [
                OracleLevel((4 * f - c) / 3, c, f, t, grid.r_max)
                for c, f, t in zip(E_h, E_f, tails)
            ]
        if attempt == extensions:
            j = bad[0]
            raise UnconvergedLevel(
                f"{model.kind} l={l} level {j}: tail/peak = {tails[j]:.3g} >= {TAIL_TOL:g} "
                f"at r_max={grid.r_max:g}"
            )
        log.debug("extending oracle grid to r_max=%g", 2 * grid.r_max)
        grid = RadialGrid(grid.r_min, grid.r_min + 2 * (grid.r_max - grid.r_min), 2 * grid.points - 1)
    raise AssertionError("unreachable")


def solve_levels(model, l: int, count: int, grid: RadialGrid | None = None,
                 extensions: int = 3) -> list[float]:
    """Lowest ``count`` energies for angular momentum ``l``."""
    return [lv.energy for lv in solve_levels_detailed(model, l, count, grid, extensions)]
