"""Exception types shared across the package."""


class DiatomicAimError(Exception):
    """Base class for all package errors."""


class DomainError(DiatomicAimError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class PoleError(DiatomicAimError, ZeroDivisionError):
    """A rational function was evaluated at (or too close to) a pole."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class NoConvergence(DiatomicAimError, RuntimeError):
    """AIM roots did not stabilize before the iteration limit."""


class BracketTooNarrow(DiatomicAimError, ValueError):
    """The energy bracket holds fewer eigenvalues than requested."""


class QuadratureError(DiatomicAimError, ValueError):
    """The sampling grid does not contain the wavefunction's support."""


class GridError(DiatomicAimError, ValueError):
    """A grid does not satisfy the requirements of a stencil."""


class UnconvergedLevel(DiatomicAimError, RuntimeError):
    """A finite-difference level is not a bound state on the grid used."""
