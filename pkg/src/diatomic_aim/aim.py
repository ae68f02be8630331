"""Asymptotic Iteration Method: recurrence, termination condition, quantization.

For ``y'' = lambda0 y' + s0 y`` the coefficient functions are iterated as

    lambda_k = lambda_{k-1}' + s_{k-1} + lambda_{k-1} lambda0
    s_k      = s_{k-1}'      + lambda_{k-1} s0

and bound-state energies are the zeros in E of

    delta_k(x0; E) = lambda_k(x0) s_{k-1}(x0) - lambda_{k-1}(x0) s_k(x0)

that no longer move when k grows.

Coefficients are carried as ``gmpy2.mpfr`` values.  Evaluating
the iterated rational functions at x0 cancels roughly
``k * log10((1 + c/x0) / |1 - c/x0|)`` decimal digits, so double precision is
exhausted around k = 12 for the seeds used here.  The working precision
defaults to ``30 + 2 k`` digits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .errors import BracketTooNarrow, DomainError, NoConvergence
from .ratfun import Polynomial, RationalFunction

log = logging.getLogger(__name__)


def default_eval_point(c: float) -> float:
    """rho0 = max(1, c) + 1, clear of the rho = 0 pole and the zero of lambda0."""
    return max(1.0, c) + 1.0


@dataclass(frozen=True)
class AimSeed:
    lambda0: RationalFunction
    s0: RationalFunction
    eval_point: float
    energy: float = float("nan")

    def __post_init__(self):
        if not self.eval_point > 0:
            raise DomainError(f"evaluation point must be positive, got {self.eval_point!r}")
        if self.lambda0.is_zero():
            raise DomainError("lambda0 must not vanish identically")
        for f in (self.lambda0, self.s0):
            if abs(f.den(self.eval_point)) <= 1e-12:
                raise DomainError(f"evaluation point {self.eval_point!r} is a pole of the seed")


@dataclass
class AimState:
    lambdas: list
    esses: list
    scale_log: float = 0.0
    rescale: bool = True
    ctx: int | None = field(default=None, repr=False)  # working precision in bits

    @property
    def depth(self) -> int:
        return len(self.lambdas) - 1


@dataclass(frozen=True)
class EigenvalueReport:
    energy: float
    level_index: int
    iterations_used: int
    delta_residual: float
    stability_gap: float


@dataclass(frozen=True)
class AimOptions:
    k_min: int = 8
    k_step: int = 4
    k_max: int = 60
    grid_points: int = 400
    energy_tol: float = 1e-10
    stability_tol: float = 1e-9
    rho0: float | None = None
    rescale: bool = True
    digits: int | None = None

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.k_step < 1 or self.grid_points < 3:
            raise ValueError("k_step must be >= 1 and grid_points >= 3")
        if not (self.energy_tol > 0 and self.stability_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.rho0 is not None and not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0!r}")

    def working_digits(self, k: int) -> int:
        return self.digits if self.digits is not None else 30 + 2 * k


def _bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + 4


def _precision(bits: int):
    # thread-local context, so concurrent solves do not interfere
    return gmpy2.context(gmpy2.get_context(), precision=bits)


def _lift(f: RationalFunction) -> RationalFunction:
    def conv(p):
        return Polynomial(np.array([gmpy2.mpfr(float(c)) for c in p.coeffs], dtype=object))

    return RationalFunction(conv(f.num), conv(f.den))


def _start(seed: AimSeed, rescale: bool, digits: int) -> AimState:
    bits = _bits(digits)
    with _precision(bits):
        return AimState([_lift(seed.lambda0)], [_lift(seed.s0)], 0.0, rescale, bits)


def _advance(state: AimState, n_more: int) -> AimState:
    with _precision(state.ctx):
        return _advance_unlocked(state, n_more)


def _advance_unlocked(state: AimState, n_more: int) -> AimState:
    lam0, s0 = state.lambdas[0], state.esses[0]
    for _ in range(n_more):
        lam, s = state.lambdas[-1], state.esses[-1]
        lam_k = lam.derivative() + s + lam * lam0
        s_k = s.derivative() + lam * s0
        if state.rescale:
            f = max(lam_k.max_abs_coeff(), s_k.max_abs_coeff())
            if f > 0:
                lam_k, s_k = lam_k / f, s_k / f
                state.scale_log += float(gmpy2.log(f))
        if not (lam_k.is_finite() and s_k.is_finite()):
            raise OverflowError(f"AIM coefficients became non-finite at k={state.depth + 1}")
        state.lambdas.append(lam_k)
        state.esses.append(s_k)
    return state


def iterate(seed: AimSeed, n: int, *, rescale: bool = True, digits: int | None = None,
            max_iterations: int = 200, float64: bool = False) -> AimState:
    """Run the AIM recurrence ``n`` times from ``seed``.

    With ``rescale`` each new pair (lambda_k, s_k) is divided by its largest
    coefficient magnitude and the logarithm of that factor is accumulated in
    ``scale_log``.  The zero set of delta_k is unaffected.

    ``float64=True`` keeps the coefficients in double precision and ignores
    ``digits``; it exists for precision studies.
    """
    if not 1 <= n <= max_iterations:
        raise ValueError(f"iteration count must be in [1, {max_iterations}], got {n}")
    if float64:
        return _advance_unlocked(AimState([seed.lambda0], [seed.s0], 0.0, rescale), n)
    digits = 30 + 2 * n if digits is None else digits
    return _advance(_start(seed, rescale, digits), n)


def delta(state: AimState, k: int, x0: float) -> float:
    """Termination condition lambda_k s_{k-1} - lambda_{k-1} s_k at x0."""
    return float(_delta_mp(state, k, x0))


def _delta_terms(state: AimState, k: int, x0):
    if not 1 <= k <= state.depth:
        raise ValueError(f"k must be in [1, {state.depth}], got {k}")
    lam, lam1 = state.lambdas[k], state.lambdas[k - 1]
    s, s1 = state.esses[k], state.esses[k - 1]
    if state.ctx is None:
        return lam(x0) * s1(x0), lam1(x0) * s(x0)
    with _precision(state.ctx):
        x = gmpy2.mpfr(x0)
        return lam(x) * s1(x), lam1(x) * s(x)


def _delta_mp(state: AimState, k: int, x0):
    a, b = _delta_terms(state, k, x0)
    if state.ctx is None:
        return a - b
    with _precision(state.ctx):
        return a - b


def relative_delta(state: AimState, k: int, x0: float) -> float:
    """delta_k / (|lambda_k s_{k-1}| + |lambda_{k-1} s_k|), in [-1, 1]; 0 when both vanish."""
    a, b = _delta_terms(state, k, x0)
    with _precision(state.ctx or 53):
        den = abs(a) + abs(b)
        return float((a - b) / den) if den else 0.0


def delta_sequence(seed: AimSeed, k_max: int, *, digits: int | None = None):
    """(delta_k, relative_delta_k) at the seed's evaluation point for k = 1..k_max."""
    state = iterate(seed, k_max, digits=digits, max_iterations=max(200, k_max))
    x0 = seed.eval_point
    return [(float(_delta_mp(state, k, x0)), relative_delta(state, k, x0)) for k in range(1, k_max + 1)]


def laguerre_quantization(c: float, d: float, tol: float = 1e-9) -> int | None:
    """Level n when the seed 1 - c/x, d/x terminates exactly (d = -n), else None."""
    n = round(-d)
    if n >= 0 and abs(d + n) <= tol:
        return int(n)
    return None


class _DeltaScan:
    """Caches per-energy AIM states so that deeper k reuses earlier work."""

    def __init__(self, problem, l, opts, digits):
        self.problem, self.l, self.opts, self.digits = problem, l, opts, digits
        self.cache = {}

    def seed(self, E):
        from .potentials import aim_seed

        return aim_seed(self.problem, self.l, E, self.opts.rho0)

    def value(self, E: float, k: int, keep: bool = True):
        st = self.cache.get(E)
        if st is None:
            seed = self.seed(E)
            st = (_start(seed, self.opts.rescale, self.digits), seed.eval_point)
            if keep:
                self.cache[E] = st
        state, x0 = st
        if state.depth < k:
            _advance(state, k - state.depth)
        return _delta_mp(state, k, x0)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def find_eigenvalues(problem, l: int, count: int, bracket=None, opts: AimOptions | None = None):
    """Lowest ``count`` AIM eigenvalues of ``problem`` inside ``bracket``.

    The termination condition is scanned on a uniform energy grid, sign
    changes are refined by bisection, and k grows from ``k_min`` in steps of
    ``k_step`` until every returned root is reproduced by the previous depth
    within ``stability_tol``.
    """
    opts = opts or AimOptions()
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi = problem.default_bracket(l, count) if bracket is None else bracket
    if not lo < hi:
        raise ValueError(f"empty bracket ({lo!r}, {hi!r})")

    scan = _DeltaScan(problem, l, opts, opts.working_digits(opts.k_max))
    grid = np.linspace(lo, hi, opts.grid_points)
    prev: list[float] = []
    k = opts.k_min
    while k <= opts.k_max:
        vals = [scan.value(float(E), k) for E in grid]
        signs = [_sign(v) for v in vals]
        cells = []
        for i, s in enumerate(signs):
            if s == 0:
                cells.append((float(grid[i]), float(grid[i])))
            elif i + 1 < len(signs) and signs[i + 1] != 0 and signs[i + 1] != s:
                cells.append((float(grid[i]), float(grid[i + 1])))
        log.debug("k=%d: %d sign changes in [%g, %g]", k, len(cells), lo, hi)

        if len(cells) < count:
            if k > count or k + opts.k_step > opts.k_max:
                raise BracketTooNarrow(
                    f"found {len(cells)} sign change(s) of delta_{k} in [{lo!r}, {hi!r}], "
                    f"need {count}"
                )
            k += opts.k_step
            continue

        roots, stable = [], []
        for a, b in cells:
            E, resid = _bisect(scan, k, a, b, opts.energy_tol)
            roots.append(E)
            gaps = [abs(E - p) for p in prev]
            if gaps and min(gaps) < opts.stability_tol:
                stable.append((E, resid, min(gaps)))
                if len(stable) == count:
                    break
            elif not prev and len(roots) >= count + 2:
                # first depth: enough candidates to match against next time
                break
        if len(stable) == count:
            return [
                EigenvalueReport(E, i, k, resid, gap)
                for i, (E, resid, gap) in enumerate(stable)
            ]
        prev = roots
        k += opts.k_step
    raise NoConvergence(
        f"{problem.kind} l={l}: fewer than {count} roots stabilized to "
        f"{opts.stability_tol:g} by k_max={opts.k_max}"
    )


def _bisect(scan: _DeltaScan, k: int, a: float, b: float, tol: float):
    if a == b:
        return a, abs(float(scan.value(a, k)))
    fa = _sign(scan.value(a, k))
    while b - a > tol:
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        fm = _sign(scan.value(m, k, keep=False))
        if fm == 0:
            a = b = m
            break
        if fm == fa:
            a = m
        else:
            b = m
    E = 0.5 * (a + b)
    return E, abs(float(scan.value(E, k, keep=False)))
