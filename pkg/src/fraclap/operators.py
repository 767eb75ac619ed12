"""The fractional Laplacian on ``]0, 1[``: discrete and continuous evaluations.

``apply_discrete`` computes ``N^{2a} (T_N(phi_a) f)_{[Nx]}`` from grid samples.
``reference_pv`` evaluates the interval operator

    C1(a) * ( PV int_0^1 (f(x) - f(y)) / |x-y|^{1+2a} dy
              + f(x) / (2a) * (x^{-2a} + (1-x)^{-2a}) )

and ``riesz_integral`` the weakly singular integral that the discrete operator
converges to when ``-1/2 < a < 0``.

Callables handed to these functions may be invoked from several threads at
once and must be safe for that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .quadrature import DEFAULT_MAX_PANELS, adaptive_gl
from .symbol import AlphaParam, Regime, as_alpha, c1_constant, c_alpha, phi_hat
from .toeplitz import build, grid_index, matvec

# Radius of the innermost ball, relative to the cutoff, below which the paired
# difference is replaced by its fitted expansion.
INNER_SUB = 1e-4
INNER_SUPER = 1e-3
INNER_TERMS = 3

__all__ = [
    "GridFunction",
    "PvQuadratureConfig",
    "apply_discrete",
    "apply_discrete_grid",
    "reference_pv",
    "rescale_interval",
    "riesz_integral",
    "vectorized",
]


def vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap *f* so it maps float arrays to float arrays of the same shape."""
    scalar = np.vectorize(f, otypes=[float])

    def call(y):
        y = np.asarray(y, dtype=float)
        try:
            out = np.asarray(f(y), dtype=float)
        except (TypeError, ValueError):
            return scalar(y)
        if out.shape != y.shape:
            out = np.broadcast_to(out, y.shape).copy() if out.ndim == 0 else scalar(y)
        return out

    return call


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[k] = f(k/n)`` on the uniform grid of ``[0, 1]``.

    *source* optionally keeps the sampled callable for off-grid evaluation.
    With ``compact=True`` the samples must vanish at both ends and outside a
    closed sub-interval of ``(0, 1)``.
    """

    n: int
    values: np.ndarray
    source: Callable | None = None
    compact: bool = False

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.n + 1,):
            raise ValueError(f"expected {self.n + 1} samples for n = {self.n}, got {vals.shape}")
        if self.compact:
            nz = np.flatnonzero(vals)
            if vals[0] != 0.0 or vals[-1] != 0.0:
                raise ValueError("compactly supported samples must vanish at 0 and 1")
            if nz.size and not (0 < nz[0] and nz[-1] < self.n):
                raise ValueError("support of the samples is not inside (0, 1)")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, f: Callable, n: int, compact: bool = False) -> GridFunction:
        grid = np.arange(n + 1) / n
        return cls(n, vectorized(f)(grid), source=f, compact=compact)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    def interpolant(self) -> Callable[[np.ndarray], np.ndarray]:
        """Piecewise-linear interpolant, extended by zero outside ``[0, 1]``."""
        grid, vals = self.grid, self.values
        return lambda y: np.interp(y, grid, vals, left=0.0, right=0.0)


@dataclass(frozen=True)
class PvQuadratureConfig:
    """Quadrature settings for :func:`reference_pv`.

    ``cutoff`` is the radius of the symmetric ball around the singular point;
    ``None`` selects ``min(x, 1-x) / 4``.
    """

    cutoff: float | None = None
    panels: int = 8
    tol: float = 1e-10
    max_panels: int = DEFAULT_MAX_PANELS

    def __post_init__(self) -> None:
        if self.cutoff is not None and not 0.0 < self.cutoff < 0.1:
            raise ValueError(f"cutoff must lie in (0, 0.1), got {self.cutoff}")
        if self.panels < 8:
            raise ValueError(f"panels must be >= 8, got {self.panels}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def _check_point(x: float) -> float:
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"evaluation point {x!r} must lie in (0, 1)")
    return x


def apply_discrete(alpha: AlphaParam | float, f: GridFunction, x: float) -> float:
    """``N^{2a}`` times row ``[Nx]`` of ``T_N(phi_a)`` applied to the samples.

    Off-grid ``x`` is snapped to the row ``floor(N x)``; no interpolation.
    """
    alpha = as_alpha(alpha)
    x = _check_point(x)
    if f.n < 2:
        raise ValueError(f"grid order must be >= 2, got {f.n}")
    k = grid_index(f.n, x)
    c = phi_hat(alpha, f.n).c
    row = c[np.abs(k - np.arange(f.n + 1))]
    return float(f.n ** (2.0 * alpha.value) * np.dot(row, f.values))


def apply_discrete_grid(alpha: AlphaParam | float, f: GridFunction) -> np.ndarray:
    """``N^{2a} T_N(phi_a) f`` at every grid point (FFT product)."""
    alpha = as_alpha(alpha)
    return f.n ** (2.0 * alpha.value) * matvec(build(alpha, f.n), f.values)


def reference_pv(
    alpha: AlphaParam | float,
    f: Callable,
    x: float,
    cfg: PvQuadratureConfig | None = None,
    *,
    breakpoints: Iterable[float] = (),
) -> float:
    """Interval fractional Laplacian of *f* at *x* by principal-value quadrature.

    Outside the ball ``|y - x| < cutoff`` the integrand is regular. Inside,
    the two sides are paired into ``2 f(x) - f(x+h) - f(x-h)`` and
    ``h = cutoff * u^p`` is substituted, with ``p`` chosen so that a kink
    (``0 < a < 1/2``) or a smooth extremum (``1/2 < a < 1``) at ``x`` gives a
    bounded integrand. Very close to *x* the second difference is replaced by
    a three-term local fit. *f* must be Holder of order above ``2a`` near *x*
    (smooth apart from a possible kink at *x* when ``a < 1/2``); this is not
    checked. *breakpoints* lists kinks of *f* that should start panels.
    """
    alpha = as_alpha(alpha)
    alpha.require(Regime.SUB_HALF, Regime.SUPER_HALF, what="reference_pv")
    cfg = cfg or PvQuadratureConfig()
    x = _check_point(x)
    a = alpha.value
    fv = vectorized(f)
    eps = cfg.cutoff if cfg.cutoff is not None else min(x, 1.0 - x) / 4.0
    if not eps < min(x, 1.0 - x):
        raise ValueError(f"cutoff {eps} leaves the interval around x = {x}")
    fx = float(fv(np.array([x]))[0])
    bps = [float(p) for p in breakpoints]
    tol = cfg.tol / 3.0

    def far(y):
        return (fx - fv(y)) * np.abs(x - y) ** (-1.0 - 2.0 * a)

    kw = dict(panels=cfg.panels, max_panels=cfg.max_panels)
    total = adaptive_gl(far, 0.0, x - eps, tol, breakpoints=bps, **kw)
    total += adaptive_gl(far, x + eps, 1.0, tol, breakpoints=bps, **kw)

    # Innermost ball |h| < h0: the second difference is fitted by three terms
    # of its local expansion and integrated exactly, which avoids the
    # cancellation in 2 f(x) - f(x+h) - f(x-h) for tiny h.
    sub = a < 0.5
    q = 1.0 if sub else 2.0
    powers = q + (1.0 if sub else 2.0) * np.arange(INNER_TERMS)
    h0 = eps * (INNER_SUB if sub else INNER_SUPER)
    near = [abs(b - x) for b in bps if 0.0 < abs(b - x)]
    if near:
        h0 = min(h0, min(near) / 8.0)
    ratios = 2.0 ** np.arange(INNER_TERMS)
    pair = 2.0 * fx - fv(x + h0 * ratios) - fv(x - h0 * ratios)
    coef = np.linalg.solve(ratios[:, None] ** powers[None, :], pair)
    total += h0 ** (-2.0 * a) * float(np.sum(coef / (powers - 2.0 * a)))

    p = 1.0 / (q - 2.0 * a)
    expo = -2.0 * a * p - 1.0

    def ball(u):
        h = eps * u**p
        return (2.0 * fx - fv(x + h) - fv(x - h)) * u**expo

    def ball_noise(u):
        return 4.0 * abs(fx) * u**expo

    u0 = (h0 / eps) ** (1.0 / p)
    ball_bps = [(abs(b - x) / eps) ** (1.0 / p) for b in bps if h0 < abs(b - x) < eps]
    ball_tol = tol * eps ** (2.0 * a) / p
    total += p * eps ** (-2.0 * a) * adaptive_gl(
        ball, u0, 1.0, ball_tol, breakpoints=ball_bps, noise=ball_noise, **kw
    )

    total += fx / (2.0 * a) * (x ** (-2.0 * a) + (1.0 - x) ** (-2.0 * a))
    return float(c1_constant(alpha) * total)


def riesz_integral(
    alpha_neg: AlphaParam | float,
    h: Callable,
    x: float,
    *,
    tol: float = 1e-10,
    breakpoints: Iterable[float] = (),
    max_panels: int = DEFAULT_MAX_PANELS,
) -> float:
    """``c_alpha(a) * int_0^1 h(t) |t-x|^{-1-2a} dt`` for ``-1/2 < a < 0``.

    On each side of *x* the substitution ``s = |t-x|^{-2a} / (-2a)`` turns the
    weight into ``ds``.
    """
    alpha = as_alpha(alpha_neg)
    alpha.require(Regime.NEGATIVE, what="riesz_integral")
    x = _check_point(x)
    e = -2.0 * alpha.value
    hv = vectorized(h)

    def side(sign):
        def integrand(s):
            return hv(x + sign * (e * s) ** (1.0 / e))

        return integrand

    total = 0.0
    for sign, reach in ((-1.0, x), (1.0, 1.0 - x)):
        bps = [abs(b - x) ** e / e for b in breakpoints if 0.0 < sign * (b - x) < reach]
        total += adaptive_gl(
            side(sign), 0.0, reach**e / e, tol / 2.0,
            breakpoints=bps, panels=4, max_panels=max_panels,
        )
    return float(c_alpha(alpha.value) * total)


def rescale_interval(
    alpha: AlphaParam | float,
    a: float,
    b: float,
    h: Callable,
    u: float,
    operator: Callable[[AlphaParam, Callable, float], float] | None = None,
) -> float:
    """Evaluate the operator transported to ``]a, b[``.

    Pulls *h* back to ``h_ab(x) = h(a + (b-a) x)`` and applies the unit-interval
    *operator* at ``(u-a)/(b-a)``. No ``(b-a)^{-2 alpha}`` factor is applied.
    The default operator is :func:`riesz_integral` for negative orders and
    :func:`reference_pv` otherwise.
    """
    alpha = as_alpha(alpha)
    if not a < b:
        raise ValueError(f"need a < b, got a = {a}, b = {b}")
    if not a < u < b:
        raise ValueError(f"u = {u} must lie in ({a}, {b})")
    if operator is None:
        operator = riesz_integral if alpha.regime is Regime.NEGATIVE else reference_pv
    hv = vectorized(h)
    width = b - a

    def pulled_back(x):
        return hv(a + width * np.asarray(x, dtype=float))

    return operator(alpha, pulled_back, (u - a) / width)
