"""Fourier coefficients of the symbol ``|1 - e^{i theta}|^{2 alpha}`` and related constants.

The symbol coefficients are produced by the two-term recurrence

    c[0]   = Gamma(2a + 1) / Gamma(a + 1)^2
    c[n+1] = c[n] * (n - a) / (n + 1 + a)

which never touches a pole of the gamma function and stays stable for large
``n``. The coefficients of ``(1 - e^{i theta})^{-a}`` follow the binomial
series recurrence ``b[u] = b[u-1] * (u - 1 + a) / u``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidAlphaError

__all__ = [
    "AlphaParam",
    "BetaCoefficients",
    "Regime",
    "SymbolCoefficients",
    "as_alpha",
    "beta_coeff",
    "c1_constant",
    "c_alpha",
    "phi_hat",
]


class Regime(enum.Enum):
    NEGATIVE = "negative"  # -1/2 < alpha < 0
    SUB_HALF = "sub-half"  # 0 < alpha < 1/2
    SUPER_HALF = "super-half"  # 1/2 < alpha < 1


def _regime_of(value: float) -> Regime:
    if value < 0:
        return Regime.NEGATIVE
    if value < 0.5:
        return Regime.SUB_HALF
    return Regime.SUPER_HALF


@dataclass(frozen=True)
class AlphaParam:
    """A validated fractional order.

    Admissible values are ``(-1/2, 0) U (0, 1/2) U (1/2, 1)``. The regime tag
    is derived from the value.

    :meth:`unchecked` builds an instance that skips validation; it exists only
    so tests can use ``alpha = 1``, where the symbol reduces to the classical
    second-difference stencil ``(2, -1)``.
    """

    value: float
    regime: Regime = field(init=False)
    unchecked_hook: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        value = float(self.value)
        if not self.unchecked_hook:
            if not math.isfinite(value):
                raise InvalidAlphaError(f"alpha must be finite, got {self.value!r}")
            if value in (0.0, 0.5):
                raise InvalidAlphaError(
                    f"alpha = {value:g} is excluded (admissible: (-1/2,0) U (0,1/2) U (1/2,1))"
                )
            if not -0.5 < value < 1.0:
                raise InvalidAlphaError(
                    f"alpha = {value:g} lies outside (-1/2, 1)"
                )
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "regime", _regime_of(value))

    @classmethod
    def unchecked(cls, value: float) -> AlphaParam:
        """Test hook: bypass validation (used with ``value = 1``)."""
        return cls(value, unchecked_hook=True)

    def require(self, *regimes: Regime, what: str = "this operation") -> None:
        """Raise :class:`InvalidAlphaError` unless the regime is one of *regimes*."""
        if self.unchecked_hook or self.regime in regimes:
            return
        allowed = ", ".join(r.value for r in regimes)
        raise InvalidAlphaError(
            f"{what} requires alpha in regime {allowed}; got alpha = {self.value:g} "
            f"({self.regime.value})"
        )

    def __float__(self) -> float:
        return self.value


def as_alpha(alpha: AlphaParam | float) -> AlphaParam:
    """Coerce a plain number into a validated :class:`AlphaParam`."""
    if isinstance(alpha, AlphaParam):
        return alpha
    return AlphaParam(float(alpha))


def c1_constant(alpha: AlphaParam | float) -> float:
    """Normalising constant ``2^{2a} Gamma((1+2a)/2) / (sqrt(pi) |Gamma(-a)|)``."""
    alpha = as_alpha(alpha)
    alpha.require(Regime.SUB_HALF, Regime.SUPER_HALF, what="c1_constant")
    a = alpha.value
    # Gamma(-a) = Gamma(1 - a) / (-a); avoids evaluating gamma at a negative argument.
    gamma_neg = math.gamma(1.0 - a) / (-a)
    return 2.0 ** (2.0 * a) * math.gamma(0.5 + a) / (math.sqrt(math.pi) * abs(gamma_neg))


def c_alpha(beta: float) -> float:
    """Return ``-Gamma(2 beta + 1) sin(pi beta) / pi``.

    Accepts ``beta`` in ``(-1, 0) U (0, 1)`` except ``beta = -1/2``, where
    ``Gamma(2 beta + 1)`` has a pole. Negative ``beta`` is needed for the Riesz
    constant of the inverse operator.
    """
    if isinstance(beta, AlphaParam):
        beta = beta.value
    beta = float(beta)
    if beta == 0.0 or not -1.0 < beta < 1.0:
        raise InvalidAlphaError(f"c_alpha needs beta in (-1,0) U (0,1), got {beta:g}")
    if beta == -0.5:
        raise InvalidAlphaError("c_alpha is singular at beta = -1/2")
    return -math.gamma(2.0 * beta + 1.0) * math.sin(math.pi * beta) / math.pi


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SymbolCoefficients:
    """Coefficients ``c[n]`` for ``n = 0..n_max`` (the symbol is even)."""

    alpha: AlphaParam
    c: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.c) - 1

    def __getitem__(self, n: int) -> float:
        return float(self.c[abs(n)])


@dataclass(frozen=True, eq=False)
class BetaCoefficients:
    """Coefficients of ``(1 - e^{i theta})^{-alpha}`` for ``u = 0..u_max``."""

    alpha: AlphaParam
    b: np.ndarray

    def __getitem__(self, u: int) -> float:
        return float(self.b[u])


@lru_cache(maxsize=64)
def _phi_hat_array(a: float, n_max: int) -> np.ndarray:
    out = np.empty(n_max + 1)
    out[0] = math.gamma(2.0 * a + 1.0) / math.gamma(a + 1.0) ** 2
    if n_max:
        n = np.arange(n_max, dtype=float)
        out[1:] = out[0] * np.cumprod((n - a) / (n + 1.0 + a))
    return _readonly(out)


def phi_hat(alpha: AlphaParam | float, n_max: int) -> SymbolCoefficients:
    """Fourier coefficients of ``|1 - e^{i theta}|^{2 alpha}`` up to index *n_max*."""
    alpha = as_alpha(alpha)
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    return SymbolCoefficients(alpha, _phi_hat_array(alpha.value, n_max))


def beta_coeff(alpha: AlphaParam | float, u_max: int) -> BetaCoefficients:
    """Binomial-series coefficients of ``(1 - z)^{-alpha}`` for ``0 < alpha < 1/2``."""
    alpha = as_alpha(alpha)
    alpha.require(Regime.SUB_HALF, what="beta_coeff")
    u_max = int(u_max)
    if u_max < 0:
        raise ValueError(f"u_max must be >= 0, got {u_max}")
    b = np.ones(u_max + 1)
    if u_max:
        u = np.arange(1, u_max + 1, dtype=float)
        b[1:] = np.cumprod((u - 1.0 + alpha.value) / u)
    return BetaCoefficients(alpha, _readonly(b))
