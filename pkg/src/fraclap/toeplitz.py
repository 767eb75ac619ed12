"""Symmetric Toeplitz matrices ``T_N(phi_alpha)`` and their inverses.

Indices are 0-based throughout: entry ``(k, l)`` here is entry ``(k+1, l+1)``
in the 1-based matrix convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from .errors import NotPositiveDefiniteError
from .symbol import AlphaParam, Regime, as_alpha, phi_hat

__all__ = [
    "LevinsonInfo",
    "PredictorPolynomial",
    "ProbeResult",
    "SymToeplitz",
    "build",
    "grid_index",
    "inverse_entry",
    "levinson_solve",
    "levinson_info",
    "matvec",
    "predictor",
    "scaled_inverse_probe",
]


@dataclass(frozen=True, eq=False)
class SymToeplitz:
    """Symmetric real Toeplitz matrix of order ``N`` (size ``N+1``) stored by its first column."""

    order: int
    first_col: np.ndarray
    alpha: AlphaParam | None = None

    def __post_init__(self) -> None:
        col = np.array(self.first_col, dtype=float)
        if col.ndim != 1 or len(col) != self.order + 1:
            raise ValueError(
                f"first_col must have length order+1 = {self.order + 1}, got {col.shape}"
            )
        col.setflags(write=False)
        object.__setattr__(self, "first_col", col)

    @property
    def size(self) -> int:
        return self.order + 1

    def entry(self, i: int, j: int) -> float:
        return float(self.first_col[abs(i - j)])


def build(alpha: AlphaParam | float, n: int) -> SymToeplitz:
    """``T_n(phi_alpha)``: the ``(n+1) x (n+1)`` matrix of symbol coefficients."""
    alpha = as_alpha(alpha)
    if n < 1:
        raise ValueError(f"matrix order must be >= 1, got {n}")
    return SymToeplitz(n, phi_hat(alpha, n).c, alpha)


def matvec(t: SymToeplitz, v, method: str = "fft") -> np.ndarray:
    """Product ``T v``.

    ``method="fft"`` embeds the matrix in a circulant of length ``2(N+1)`` and
    multiplies in ``O(N log N)``; ``method="direct"`` is the plain ``O(N^2)``
    convolution.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (t.size,):
        raise ValueError(f"vector length {v.shape} does not match matrix size {t.size}")
    c = t.first_col
    if method == "direct":
        kernel = np.concatenate([c[:0:-1], c])
        return np.convolve(v, kernel, mode="full")[t.order : t.order + t.size]
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    m = scipy.fft.next_fast_len(2 * t.size, real=True)
    circ = np.zeros(m)
    circ[: t.size] = c
    circ[m - t.order :] = c[:0:-1]
    prod = scipy.fft.irfft(scipy.fft.rfft(circ) * scipy.fft.rfft(v, m), m)
    return prod[: t.size]


@dataclass(frozen=True, eq=False)
class LevinsonInfo:
    """Reflection coefficients and normalised prediction-error variances."""

    reflection: np.ndarray
    error_variance: np.ndarray


def _levinson(col: np.ndarray, rhs: np.ndarray | None):
    """Levinson recursion for a symmetric positive definite Toeplitz system.

    Returns ``(x, reflection, variances)``; ``x`` is ``None`` when *rhs* is.
    Works on the matrix normalised to unit diagonal.
    """
    r0 = col[0]
    if not r0 > 0:
        raise NotPositiveDefiniteError(f"diagonal entry {r0} is not positive")
    r = col / r0
    n = len(r)
    refl = np.empty(max(n - 1, 0))
    var = np.empty(n)
    var[0] = 1.0
    y = np.empty(n)
    x = None
    if rhs is not None:
        b = rhs / r0
        x = np.empty(n)
        x[0] = b[0]
    if n == 1:
        return x, refl, var
    k = -r[1]
    y[0] = k
    refl[0] = k
    beta = 1.0
    for m in range(1, n):
        beta *= 1.0 - k * k
        if not beta > 0 or abs(k) >= 1.0:
            raise NotPositiveDefiniteError(
                f"reflection coefficient {k:.6g} at step {m} has modulus >= 1"
            )
        var[m] = beta
        if x is not None:
            mu = (b[m] - np.dot(r[1 : m + 1], x[m - 1 :: -1])) / beta
            x[:m] += mu * y[m - 1 :: -1]
            x[m] = mu
        if m < n - 1:
            k = -(r[m + 1] + np.dot(r[1 : m + 1], y[m - 1 :: -1])) / beta
            refl[m] = k
            y[:m] += k * y[m - 1 :: -1]
            y[m] = k
    return x, refl, var


def levinson_solve(t: SymToeplitz, rhs) -> np.ndarray:
    """Solve ``T x = rhs`` in ``O(N^2)`` time and ``O(N)`` memory."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (t.size,):
        raise ValueError(f"rhs length {rhs.shape} does not match matrix size {t.size}")
    x, _, _ = _levinson(t.first_col, rhs)
    return x


def levinson_info(t: SymToeplitz) -> LevinsonInfo:
    """Reflection coefficients and prediction-error variances of the factorisation."""
    _, refl, var = _levinson(t.first_col, None)
    return LevinsonInfo(refl, var)


@dataclass(frozen=True, eq=False)
class PredictorPolynomial:
    """Predictor polynomial ``P_N(z) = sum_u gamma[u] z^u``.

    ``gamma[u] = (T^{-1})_{u,0} / sqrt((T^{-1})_{0,0})`` and ``norm_head`` is
    ``(T^{-1})_{0,0}``.
    """

    degree: int
    gamma: np.ndarray
    norm_head: float

    def __call__(self, theta) -> np.ndarray:
        """Evaluate ``P_N(e^{i theta})``."""
        z = np.exp(1j * np.asarray(theta, dtype=float))
        return np.polynomial.polynomial.polyval(z, self.gamma)


def predictor(t: SymToeplitz) -> PredictorPolynomial:
    e0 = np.zeros(t.size)
    e0[0] = 1.0
    col = levinson_solve(t, e0)
    head = float(col[0])
    gamma = col / math.sqrt(head)
    gamma.setflags(write=False)
    return PredictorPolynomial(t.order, gamma, head)


def inverse_entry(p: PredictorPolynomial, k: int, l: int) -> float:
    """Entry ``(k, l)`` of ``T_N^{-1}`` by the Gohberg-Semencul formula.

    ``sum_{u=0}^{k} g[k-u] g[l-u] - sum_{u=1}^{k} g[u+N-l] g[u+N-k]`` for
    ``k <= l`` (swapped otherwise); costs ``O(min(k, l))``.
    """
    n = p.degree
    if not (0 <= k <= n and 0 <= l <= n):
        raise IndexError(f"indices ({k}, {l}) outside 0..{n}")
    if k > l:
        k, l = l, k
    g = p.gamma
    head = np.dot(g[: k + 1], g[l - k : l + 1])
    if k == 0:
        return float(head)
    tail = np.dot(g[n + 1 - l : n + 1 - l + k], g[n + 1 - k : n + 1])
    return float(head - tail)


def grid_index(n: int, x: float) -> int:
    """``[n x]`` as ``floor``, snapping values within 1e-12 of an integer."""
    nx = n * x
    r = round(nx)
    if abs(nx - r) <= 1e-12:
        return int(r)
    return int(math.floor(nx))


@lru_cache(maxsize=16)
def _cached_predictor(alpha: AlphaParam, n: int) -> PredictorPolynomial:
    return predictor(build(alpha, n))


@dataclass(frozen=True)
class ProbeResult:
    raw: float
    scaled_green: float
    riesz_split: float


def scaled_inverse_probe(alpha: AlphaParam | float, n: int, x: float, y: float) -> ProbeResult:
    """Inverse entry at ``([n x], [n y])`` with the two ``n^{1-2 alpha}`` rescalings.

    ``scaled_green`` is comparable with the Green kernel at ``(x, y)``,
    ``riesz_split`` with the correction kernel.
    """
    alpha = as_alpha(alpha)
    alpha.require(Regime.SUB_HALF, what="scaled_inverse_probe")
    if not (0 < x < 1 and 0 < y < 1):
        raise ValueError("x and y must lie in (0, 1)")
    if x == y:
        raise ValueError("x == y is not allowed: the kernels are singular on the diagonal")
    k, l = grid_index(n, x), grid_index(n, y)
    raw = inverse_entry(_cached_predictor(alpha, n), k, l)
    scale = n ** (1.0 - 2.0 * alpha.value)
    whole_line = phi_hat(-alpha.value, abs(k - l))[abs(k - l)]
    return ProbeResult(raw, raw * scale, (whole_line - raw) * scale)
