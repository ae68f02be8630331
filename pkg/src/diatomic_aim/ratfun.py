"""Univariate polynomials and rational functions.

These are the carriers of the AIM coefficient functions lambda_n(x) and
s_n(x). Coefficients are stored lowest power first, either as float64 or as
an object array of ``gmpy2.mpfr`` values (the AIM engine iterates in extended
precision, see :mod:`diatomic_aim.aim`).  Every operation returns a value in
canonical form:

* polynomials are trimmed, so the leading coefficient is nonzero;
* rational functions have a monic denominator and no common factor ``x**j``.

Trimming only removes a leading coefficient that is exactly zero or that is
cancellation noise from an addition, i.e. ``|a + b| < tol * (|a| + |b|)``.
Comparing against the largest coefficient instead would also drop genuine
leading terms: the iterated AIM numerators routinely span more than 13
orders of magnitude.

Only the monomial factor ``x**j`` is ever cancelled between numerator and
denominator.  That cancellation is exact (it only removes coefficients that
are exactly zero) and keeps the denominator of an iterated derivative at
``x**m`` instead of ``x**(2**m)``.  No general polynomial GCD is computed.
"""

from __future__ import annotations

import math

import gmpy2
import numpy as np

from .errors import PoleError

#: Relative cancellation level (float64) below which a leading sum is zero.
TRIM_TOL = 1e-13
#: |den(x)| at or below this value (denominator monic) counts as a pole.
POLE_TOL = 1e-12


def _cancel_tol(sample):
    if isinstance(sample, gmpy2.mpfr):
        return gmpy2.mpfr(2) ** (10 - sample.precision)
    return TRIM_TOL


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.asarray(coeffs)
    if c.dtype != object:
        c = c.astype(float)
    return c.ravel()


def _strip_zeros(c: np.ndarray) -> np.ndarray:
    if c.size and c[-1]:
        return c
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:0]


def _frozen(c: np.ndarray) -> np.ndarray:
    c.setflags(write=False)
    return c


class Polynomial:
    """Dense real polynomial; ``coeffs[i]`` multiplies ``x**i``.

    The zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _frozen(_strip_zeros(_as_coeffs(coeffs).copy()))

    @classmethod
    def _raw(cls, c: np.ndarray) -> "Polynomial":
        p = cls.__new__(cls)
        p.coeffs = _frozen(_strip_zeros(c))
        return p

    @classmethod
    def monomial(cls, power: int, coeff=1.0) -> "Polynomial":
        c = np.zeros(power + 1, dtype=object if isinstance(coeff, gmpy2.mpfr) else float)
        c[power] = coeff
        return cls._raw(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def is_monomial(self) -> bool:
        return self.coeffs.size > 0 and not np.any(self.coeffs[:-1])

    def low_order_zeros(self) -> int:
        """Number of exactly-zero coefficients at the low-order end."""
        if self.coeffs.size and self.coeffs[0]:
            return 0
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if nz.size else 0

    def shifted_up(self, j: int) -> "Polynomial":
        """Multiply by ``x**j``."""
        if j == 0 or self.is_zero():
            return self
        pad = np.zeros(j, dtype=self.coeffs.dtype)
        return Polynomial._raw(np.concatenate([pad, self.coeffs]))

    def shifted_down(self, j: int) -> "Polynomial":
        """Divide by ``x**j``; the caller guarantees exact divisibility."""
        return Polynomial._raw(self.coeffs[j:].copy()) if j else self

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if a.size < b.size:
            a, b = b, a
        if b.size == 0:
            return Polynomial._raw(a)
        dtype = object if object in (a.dtype, b.dtype) else float
        out = a.astype(dtype, copy=True)
        out[: b.size] = out[: b.size] + b
        if a.size == b.size:
            # drop leading coefficients that are pure cancellation noise
            tol = _cancel_tol(out[-1])
            top = out.size
            while top and abs(out[top - 1]) <= tol * (abs(a[top - 1]) + abs(b[top - 1])):
                top -= 1
            out = out[:top]
        return Polynomial._raw(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(-self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            return Polynomial._raw(np.convolve(self.coeffs, other.coeffs))
        return Polynomial._raw(self.coeffs * other)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        if self.coeffs.size <= 1:
            return Polynomial()
        return Polynomial._raw(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def __call__(self, x):
        # Horner
        acc = 0 * x
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def __repr__(self) -> str:
        return f"Polynomial({[float(c) for c in self.coeffs]})"


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


ONE = Polynomial([1.0])


class RationalFunction:
    """Quotient ``num / den`` of two polynomials in one variable."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        if den is None:
            den = ONE
        elif not isinstance(den, Polynomial):
            den = Polynomial(den)
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        self.num, self.den = _canonical(num, den)

    @classmethod
    def _make(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        f = cls.__new__(cls)
        f.num, f.den = _canonical(num, den)
        return f

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls(Polynomial([value]))

    @classmethod
    def from_inverse_powers(cls, coeffs) -> "RationalFunction":
        """Build ``sum_j coeffs[j] * x**(-j)``."""
        c = _as_coeffs(coeffs)[::-1].copy()
        one = c[-1] * 0 + 1 if c.dtype == object and c.size else 1.0
        return cls(Polynomial(c), Polynomial.monomial(c.size - 1, one))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def normalized(self) -> "RationalFunction":
        return RationalFunction._make(self.num, self.den)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            return RationalFunction._make(self.num + other.num, d1)
        if d1.is_monomial() and d2.is_monomial():
            m = max(d1.degree, d2.degree)
            n1 = self.num.shifted_up(m - d1.degree)
            n2 = other.num.shifted_up(m - d2.degree)
            return RationalFunction._make(n1 + n2, d1 if d1.degree == m else d2)
        return RationalFunction._make(self.num * d2 + other.num * d1, d1 * d2)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._make(-self.num, self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return RationalFunction._make(self.num * other.num, self.den * other.den)
        return RationalFunction._make(self.num * other, self.den)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "RationalFunction":
        return RationalFunction._make(self.num * (1 / scalar), self.den)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        if n.is_zero():
            return self
        if d.is_monomial():
            # d/dx N x^-m = (x N' - m N) / x^(m+1)
            m = d.degree
            top = n.derivative().shifted_up(1) - n * m
            return RationalFunction._make(top, d.shifted_up(1))
        return RationalFunction._make(n.derivative() * d - n * d.derivative(), d * d)

    def max_abs_coeff(self):
        """Largest numerator coefficient magnitude (the denominator is monic)."""
        return max(abs(c) for c in self.num.coeffs) if not self.is_zero() else 0.0

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in self.num.coeffs)

    def __call__(self, x):
        dv = self.den(x)
        if abs(dv) <= POLE_TOL:
            raise PoleError(f"pole at x={float(x)!r} (|den|={float(abs(dv)):.3g})", x=x)
        return self.num(x) / dv

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return (
            f"RationalFunction({[float(c) for c in self.num.coeffs]}, "
            f"{[float(c) for c in self.den.coeffs]})"
        )


def _canonical(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return num, ONE
    j = min(num.low_order_zeros(), den.low_order_zeros())
    if j:
        num, den = num.shifted_down(j), den.shifted_down(j)
    lead = den.coeffs[-1]
    if lead != 1:
        num = Polynomial._raw(num.coeffs / lead)
        den = Polynomial._raw(den.coeffs / lead)
    return num, den


def ratfun_differentiate(f: RationalFunction) -> RationalFunction:
    return f.derivative()


def ratfun_arith(f: RationalFunction, g: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}; expected 'add' or 'mul'")


def ratfun_eval(f: RationalFunction, x):
    return f(x)
