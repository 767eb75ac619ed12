"""Exception hierarchy shared by all fraclap modules."""

from __future__ import annotations


class FracLapError(Exception):
    """Base class for every error raised by fraclap."""


class InvalidAlphaError(FracLapError, ValueError):
    """The fractional order is excluded or belongs to an unsupported regime."""


class NumericalError(FracLapError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach its tolerance within the panel cap."""


class NotPositiveDefiniteError(NumericalError):
    """A Levinson reflection coefficient reached modulus one."""
