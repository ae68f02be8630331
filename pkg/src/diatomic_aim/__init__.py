"""Bound states of diatomic potentials by the asymptotic iteration method.

The package pairs an AIM eigenvalue search with closed-form spectra of the
Mie, Kratzer, Coulomb and pseudoharmonic potentials and with an independent
finite-difference solver used as a reference.
"""

__version__ = "0.1.0"

from .aim import AimOptions, AimSeed, EigenvalueReport, delta, find_eigenvalues, iterate, laguerre_quantization
from .errors import (
    BracketTooNarrow,
    DiatomicAimError,
    DomainError,
    GridError,
    NoConvergence,
    PoleError,
    QuadratureError,
    UnconvergedLevel,
)
from .oracle import RadialGrid, TridiagonalSystem, discretize, lowest_eigenvalues, solve_levels
from .potentials import (
    Coulomb,
    Kratzer,
    Mie,
    Pseudoharmonic,
    SpectrumResult,
    UnitSystem,
    aim_seed,
    closed_form_energy,
    derive_params,
    make_model,
    potential_value,
    radial_wavefunction,
)
from .ratfun import Polynomial, RationalFunction, poly_add, poly_mul, ratfun_arith, ratfun_differentiate, ratfun_eval
from .special import LaguerreSpec, RadialWavefunction, laguerre_eval, normalize, ode_residual

__all__ = [name for name in dir() if not name.startswith("_")]
