"""Diatomic potentials, their AIM seeds and closed-form spectra.

Every model is solved in the transformed variable ``rho = 2 * alpha * r**k``
with ``R = rho**gamma * exp(-rho/2) * G(rho)``.  Under the choice of gamma
that removes the ``1/rho**2`` term, G obeys

    G'' = (1 - c/rho) G' + (d/rho) G

so the AIM seed is ``lambda0 = 1 - c/rho``, ``s0 = d/rho`` with

* k = 1 (Mie, Kratzer, Coulomb): ``c = 2(gamma+1)``, ``d = gamma + 1 - beta/alpha``,
  where alpha depends on the trial energy;
* k = 2 (pseudoharmonic): ``c = 2 gamma + 3/2``,
  ``d = gamma + 3/4 - mu (E + 2 V0) / (4 hbar^2 alpha)``.

Polynomial G exists exactly when ``d = -n``, which gives the closed forms
implemented in :meth:`PotentialModel.closed_form_energy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .ratfun import RationalFunction


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mu > 0):
            raise DomainError(f"hbar and mu must be positive, got {self}")

    @property
    def kinetic(self) -> float:
        """hbar^2 / (2 mu)."""
        return self.hbar**2 / (2 * self.mu)


@dataclass(frozen=True)
class DerivedParams:
    alpha: float
    beta: float
    gamma: float
    sigma: float
    k: int


@dataclass(frozen=True)
class SpectrumResult:
    n: int
    l: int
    E_closed: float
    E_aim: float | None = None
    E_oracle: float | None = None
    rel_diff_aim: float | None = None
    rel_diff_oracle: float | None = None
    status: str = "ok"

    @classmethod
    def build(cls, n, l, E_closed, E_aim=None, E_oracle=None, status="ok"):
        return cls(
            n, l, E_closed, E_aim, E_oracle,
            None if E_aim is None else rel_diff(E_aim, E_closed),
            None if E_oracle is None else rel_diff(E_oracle, E_closed),
            status,
        )


def rel_diff(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be a positive finite number, got {v!r}")


def _check_l(l):
    if int(l) != l or l < 0:
        raise DomainError(f"angular momentum must be a nonnegative integer, got {l!r}")


def _gamma_k1(sigma: float) -> float:
    # positive branch of gamma (gamma + 1) = sigma
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * sigma))


def _gamma_k2(sigma: float) -> float:
    # positive branch of gamma (gamma + 1/2) = sigma
    return 0.25 * (-1.0 + math.sqrt(1.0 + 16.0 * sigma))


def kernel_energy(units: UnitSystem, beta: float, sigma: float, n: int, threshold: float = 0.0) -> float:
    """Shared k = 1 spectrum: threshold - (hbar^2/2mu) (2 beta)^2 [2n+1+sqrt(1+4 sigma)]^-2."""
    return threshold - units.kinetic * (2 * beta) ** 2 / (2 * n + 1 + math.sqrt(1 + 4 * sigma)) ** 2


@dataclass(frozen=True)
class PotentialModel:
    """Base class; concrete models are the frozen dataclasses below."""

    kind = "abstract"
    k = 1

    def value(self, r):
        raise NotImplementedError

    @property
    def natural_length(self) -> float:
        raise NotImplementedError

    def derive_params(self, l: int, E: float) -> DerivedParams:
        raise NotImplementedError

    def seed_coefficients(self, l: int, E: float) -> tuple[float, float]:
        """(c, d) of the seed lambda0 = 1 - c/rho, s0 = d/rho."""
        raise NotImplementedError

    def closed_form_energy(self, n: int, l: int) -> float:
        raise NotImplementedError

    def laguerre_parameter(self, l: int) -> float:
        """Upper Laguerre parameter w of the radial polynomial factor."""
        c, _ = self.seed_coefficients(l, self.closed_form_energy(0, l))
        return c - 1.0

    def rho(self, r, alpha: float):
        return 2.0 * alpha * np.asarray(r, dtype=float) ** self.k

    def veff_min(self, l: int) -> float:
        """Minimum of V(r) + hbar^2 l(l+1)/(2 mu r^2) over r > 0 (may be -inf)."""
        raise NotImplementedError

    def default_bracket(self, l: int, count: int) -> tuple[float, float]:
        raise NotImplementedError

    def params(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if k != "units"}


class _CoulombLike(PotentialModel):
    """k = 1 models: V_eff = A/r^2 - B/r + threshold."""

    threshold = 0.0

    def _beta(self) -> float:
        raise NotImplementedError

    def _sigma(self, l: int) -> float:
        raise NotImplementedError

    def _AB(self, l):
        raise NotImplementedError

    def alpha(self, E: float) -> float:
        a2 = 2 * self.units.mu * (self.threshold - E) / self.units.hbar**2
        if not a2 > 0:
            raise DomainError(
                f"{self.kind}: trial energy {E!r} gives alpha^2 = {a2!r} <= 0 "
                f"(bound states need E < {self.threshold!r})"
            )
        return math.sqrt(a2)

    def derive_params(self, l, E):
        _check_l(l)
        sigma = self._sigma(l)
        return DerivedParams(self.alpha(E), self._beta(), _gamma_k1(sigma), sigma, 1)

    def seed_coefficients(self, l, E):
        p = self.derive_params(l, E)
        return 2 * (p.gamma + 1), p.gamma + 1 - p.beta / p.alpha

    def closed_form_energy(self, n, l):
        _check_l(l)
        _check_l(n)
        return kernel_energy(self.units, self._beta(), self._sigma(l), n, self.threshold)

    def veff_min(self, l):
        A, B = self._AB(l)
        if A <= 0:
            return -math.inf
        return self.threshold - B * B / (4 * A)

    def default_bracket(self, l, count):
        scale = self.units.kinetic * (2 * self._beta()) ** 2
        lo = max(self.threshold - 1.05 * scale, self.veff_min(l))
        return lo, self.threshold - 1e-6 * scale


@dataclass(frozen=True)
class Mie(_CoulombLike):
    """V(r) = V0 [ (a/r)^2 / 2 - a/r ]."""

    V0: float = 1.0
    a: float = 1.0
    units: UnitSystem = field(default_factory=UnitSystem)
    kind = "mie"

    def __post_init__(self):
        _positive(V0=self.V0, a=self.a)

    def value(self, r):
        x = self.a / np.asarray(r, dtype=float)
        return self.V0 * (0.5 * x * x - x)

    @property
    def natural_length(self):
        return self.a

    def _beta(self):
        return self.units.mu * self.V0 * self.a / self.units.hbar**2

    def _sigma(self, l):
        return l * (l + 1) + self._beta() * self.a

    def _AB(self, l):
        return 0.5 * self.V0 * self.a**2 + l * (l + 1) * self.units.kinetic, self.V0 * self.a


@dataclass(frozen=True)
class Kratzer(_CoulombLike):
    """V(r) = De [ (r - re) / r ]^2."""

    De: float = 1.0
    re: float = 1.0
    units: UnitSystem = field(default_factory=UnitSystem)
    kind = "kratzer"

    def __post_init__(self):
        _positive(De=self.De, re=self.re)

    @property
    def threshold(self):
        return self.De

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.De * ((r - self.re) / r) ** 2

    @property
    def natural_length(self):
        return self.re

    def _beta(self):
        return 2 * self.units.mu * self.De * self.re / self.units.hbar**2

    def _sigma(self, l):
        return l * (l + 1) + self._beta() * self.re

    def _AB(self, l):
        return self.De * self.re**2 + l * (l + 1) * self.units.kinetic, 2 * self.De * self.re

    def literal_unsquared_energy(self, n: int, l: int) -> float:
        """Energy if eps_n = -(2 beta)^2 [..]^-2 is read with eps_n^2 = 2 mu (E - De)/hbar^2.

        Kept only to document why that reading is rejected: it puts every
        level above the dissociation plateau.
        """
        eps = -((2 * self._beta()) ** 2) / (2 * n + 1 + math.sqrt(1 + 4 * self._sigma(l))) ** 2
        return self.De + self.units.kinetic * eps**2


@dataclass(frozen=True)
class Coulomb(_CoulombLike):
    """V(r) = -coupling / r, with coupling = k Z e^2."""

    coupling: float = 1.0
    units: UnitSystem = field(default_factory=UnitSystem)
    kind = "coulomb"

    def __post_init__(self):
        _positive(coupling=self.coupling)

    def value(self, r):
        return -self.coupling / np.asarray(r, dtype=float)

    @property
    def natural_length(self):
        return self.units.hbar**2 / (self.units.mu * self.coupling)

    def _beta(self):
        return self.units.mu * self.coupling / self.units.hbar**2

    def _sigma(self, l):
        return float(l * (l + 1))

    def derive_params(self, l, E):
        p = super().derive_params(l, E)
        # gamma = l exactly; avoid the sqrt round trip
        return DerivedParams(p.alpha, p.beta, float(l), p.sigma, 1)

    def closed_form_energy(self, n, l):
        _check_l(l)
        _check_l(n)
        u = self.units
        return -u.mu * self.coupling**2 / (2 * u.hbar**2 * (n + l + 1) ** 2)

    def _AB(self, l):
        return l * (l + 1) * self.units.kinetic, self.coupling


@dataclass(frozen=True)
class Pseudoharmonic(PotentialModel):
    """V(r) = V0 [ r/r0 - r0/r ]^2, solved with rho = 2 alpha r^2."""

    V0: float = 1.0
    r0: float = 1.0
    units: UnitSystem = field(default_factory=UnitSystem)
    kind = "pseudoharmonic"
    k = 2

    def __post_init__(self):
        _positive(V0=self.V0, r0=self.r0)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        x = r / self.r0
        return self.V0 * (x - 1.0 / x) ** 2

    @property
    def natural_length(self):
        return self.r0

    @property
    def alpha(self) -> float:
        return math.sqrt(self.units.mu * self.V0 / (2 * self.units.hbar**2 * self.r0**2))

    def derive_params(self, l, E=None):
        _check_l(l)
        u = self.units
        beta = u.mu * self.V0 * self.r0**2 / (2 * u.hbar**2)
        sigma = beta + l * (l + 1) / 4
        return DerivedParams(self.alpha, beta, _gamma_k2(sigma), sigma, 2)

    def seed_coefficients(self, l, E):
        p = self.derive_params(l)
        u = self.units
        return 2 * p.gamma + 1.5, p.gamma + 0.75 - u.mu * (E + 2 * self.V0) / (4 * u.hbar**2 * p.alpha)

    def closed_form_energy(self, n, l):
        _check_l(n)
        p = self.derive_params(l)
        u = self.units
        return 2 * u.hbar**2 / u.mu * p.alpha * (2 * n + 1 + 2 * (p.gamma + 0.25)) - 2 * self.V0

    @property
    def spacing(self) -> float:
        return 4 * self.units.hbar**2 * self.alpha / self.units.mu

    def veff_min(self, l):
        a = self.V0 / self.r0**2
        b = self.V0 * self.r0**2 + l * (l + 1) * self.units.kinetic
        return 2 * math.sqrt(a * b) - 2 * self.V0

    def default_bracket(self, l, count):
        eps = 1e-6 * self.spacing
        lo = max(-2 * self.V0 + eps, self.veff_min(l))
        return lo, -2 * self.V0 + 3 * self.spacing * count


MODELS = {cls.kind: cls for cls in (Mie, Kratzer, Coulomb, Pseudoharmonic)}

#: Accepted parameter names per model (lower-cased keys map to fields).
PARAM_NAMES = {
    "mie": ("V0", "a"),
    "kratzer": ("De", "re"),
    "coulomb": ("coupling",),
    "pseudoharmonic": ("V0", "r0"),
}


def make_model(kind: str, params: dict, units: UnitSystem | None = None) -> PotentialModel:
    """Build a model from a kind name and a ``{name: value}`` mapping."""
    kind = kind.lower()
    if kind not in MODELS:
        raise DomainError(f"unknown potential {kind!r}; choose from {sorted(MODELS)}")
    names = {n.lower(): n for n in PARAM_NAMES[kind]}
    kw = {}
    for key, v in params.items():
        if key.lower() not in names:
            raise DomainError(f"{kind} takes parameters {PARAM_NAMES[kind]}, got {key!r}")
        kw[names[key.lower()]] = float(v)
    missing = set(PARAM_NAMES[kind]) - set(kw)
    if missing:
        raise DomainError(f"{kind} is missing parameters {sorted(missing)}")
    return MODELS[kind](**kw, units=units or UnitSystem())


def potential_value(model: PotentialModel, r):
    if np.any(np.asarray(r) <= 0):
        raise DomainError("potential is defined for r > 0 only")
    return model.value(r)


def derive_params(model: PotentialModel, l: int, E_trial: float) -> DerivedParams:
    return model.derive_params(l, E_trial)


def closed_form_energy(model: PotentialModel, n: int, l: int) -> float:
    return model.closed_form_energy(n, l)


def aim_seed(model: PotentialModel, l: int, E_trial: float, rho0: float | None = None):
    """AIM seed (lambda0, s0) of the transformed radial equation at ``E_trial``."""
    from .aim import AimSeed, default_eval_point

    c, d = model.seed_coefficients(l, E_trial)
    lam0 = RationalFunction.from_inverse_powers([1.0, -c])
    s0 = RationalFunction.from_inverse_powers([0.0, d])
    x0 = default_eval_point(c) if rho0 is None else rho0
    return AimSeed(lam0, s0, x0, E_trial)


def radial_wavefunction(model: PotentialModel, n: int, l: int, grid=None):
    """Normalized closed-form radial wavefunction; see :mod:`diatomic_aim.special`."""
    from .special import sample_radial_wavefunction

    return sample_radial_wavefunction(model, n, l, grid)
