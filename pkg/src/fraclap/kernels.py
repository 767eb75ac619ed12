"""Green kernel ``G``, correction kernel ``K`` and their combination ``H``.

For ``0 < a < 1/2`` and ``x, y`` in ``(0, 1)``::

    G(x, y) = (xy)^a / Gamma(a)^2 * int_{max(x,y)}^1 (t-x)^{a-1} (t-y)^{a-1} t^{-2a} dt
    K(u, y) = (uy)^a / Gamma(a)^2 * ( int_1^inf (t-u)^{a-1} (t-y)^{a-1} t^{-2a} dt
                                     + int_0^inf (t+u)^{a-1} (t+y)^{a-1} t^{-2a} dt )
    H(x, y) = c_alpha(-a) |x-y|^{2a-1} - K(x, y)

Algebraic endpoint singularities are removed by power substitutions and the
infinite tails by ``w = 1/t``; what remains is integrated with adaptive
Gauss-Legendre panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import thread_map
from .quadrature import DEFAULT_MAX_PANELS, adaptive_gl, fixed_gl
from .symbol import AlphaParam, Regime, as_alpha, c_alpha

__all__ = [
    "KernelEvaluator",
    "KernelTable",
    "green_G",
    "green_regular",
    "green_row",
    "kernel_H",
    "kernel_K",
    "kernel_K_row",
    "tabulate",
]


@dataclass(frozen=True)
class KernelEvaluator:
    """Quadrature configuration for the kernels of a fixed ``alpha``."""

    alpha: AlphaParam
    tol: float = 1e-7
    max_panels: int = DEFAULT_MAX_PANELS

    def __post_init__(self) -> None:
        alpha = as_alpha(self.alpha)
        alpha.require(Regime.SUB_HALF, what="KernelEvaluator")
        object.__setattr__(self, "alpha", alpha)
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_panels < 64:
            raise ValueError(f"max_panels must be >= 64, got {self.max_panels}")

    @property
    def a(self) -> float:
        return self.alpha.value

    @property
    def prefactor(self) -> float:
        return 1.0 / math.gamma(self.a) ** 2


def _check_unit(*vals: float, closed: bool) -> None:
    for v in vals:
        ok = 0.0 <= v <= 1.0 if closed else 0.0 < v < 1.0
        if not ok:
            span = "[0, 1]" if closed else "(0, 1)"
            raise ValueError(f"kernel argument {v!r} outside {span}")


def green_G(ev: KernelEvaluator, x: float, y: float) -> float:
    """Green kernel at ``(x, y)`` in ``[0, 1]^2``.

    The diagonal is singular for ``a <= 1/2`` and raises there, except at the
    corners where the kernel vanishes.
    """
    x, y = float(x), float(y)
    _check_unit(x, y, closed=True)
    if x == y and 0.0 < x < 1.0 and ev.a <= 0.5:
        raise ValueError(f"green_G is singular on the diagonal (x = y = {x})")
    lo, hi = min(x, y), max(x, y)
    if hi == 1.0 or lo == 0.0:
        return 0.0
    a = ev.a
    scale = (lo * hi) ** a * ev.prefactor
    inv_a = 1.0 / a
    gap = hi - lo

    def integrand(s):
        # t = hi + s^{1/a} absorbs (t - hi)^{a-1}; t - lo is formed without cancellation
        r = s**inv_a
        return inv_a * (gap + r) ** (a - 1.0) * (hi + r) ** (-2.0 * a)

    top = (1.0 - hi) ** a
    knee = gap**a
    val = adaptive_gl(
        integrand, 0.0, top, ev.tol / scale,
        breakpoints=(knee,), max_panels=ev.max_panels,
    )
    return float(scale * val)


def green_row(alpha: AlphaParam | float, x: float, ys) -> np.ndarray:
    """``G(x, y)`` for many ``y`` at once by a fixed graded rule.

    Agrees with :func:`green_G` to ~1e-12 relative for ``y != x``.
    """
    alpha = as_alpha(alpha)
    a = alpha.value
    ys = np.asarray(ys, dtype=float)
    hi = np.maximum(x, ys)
    lo = np.minimum(x, ys)
    d = hi - lo
    out = np.zeros_like(ys)
    live = (d > 0) & (hi < 1.0) & (lo > 0.0)
    if live.any():
        out[live] = green_regular(a, lo[live], hi[live], d[live]) * d[live] ** (2.0 * a - 1.0)
    return out


def green_regular(a: float, lo: np.ndarray, hi: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``G(lo, hi) |hi - lo|^{1-2a}``, bounded as ``hi - lo -> 0``.

    The gap *d* is passed separately so callers can supply it exactly.
    After ``t = hi + d rho`` the integrand is
    ``rho^{a-1} (rho+1)^{a-1} (hi + d rho)^{-2a}``; ``[0, 1]`` is handled by
    ``rho = sigma^{1/a}`` and the rest by dyadic panels ``[2^j, 2^{j+1}]``.
    Requires ``0 < lo``, ``hi < 1`` and ``d > 0``.
    """
    lo, hi, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (lo, hi, d)))
    lo, hi, d = lo.ravel(), hi.ravel(), d.ravel()
    if lo.size == 0:
        return np.zeros(0)
    length = (1.0 - hi) / d
    inv_a = 1.0 / a

    hi_c, d_c = hi[:, None, None], d[:, None, None]
    edge = np.minimum(length, 1.0) ** a
    panels = np.linspace(0.0, 1.0, 5)

    def near(sig):
        rho = sig**inv_a
        return inv_a * (rho + 1.0) ** (a - 1.0) * (hi_c + d_c * rho) ** (-2.0 * a)

    part = fixed_gl(near, edge[:, None] * panels[None, :-1], edge[:, None] * panels[None, 1:])

    n_dyadic = int(np.ceil(np.log2(max(length.max(), 1.0)))) + 1
    starts = 2.0 ** np.arange(n_dyadic)
    p_lo = np.minimum(starts[None, :], length[:, None])
    p_hi = np.minimum(2.0 * starts[None, :], length[:, None])

    def far(rho):
        return rho ** (a - 1.0) * (rho + 1.0) ** (a - 1.0) * (hi_c + d_c * rho) ** (-2.0 * a)

    part = part + fixed_gl(far, p_lo, p_hi)
    return (lo * hi) ** a / math.gamma(a) ** 2 * part


def _k_parts(a: float, u, y):
    """Integrands of the correction kernel, broadcasting over ``u`` and ``y``.

    Returns ``(tail, head, head_top)``: ``tail`` integrates over ``w`` in
    ``[0, 1]`` (both ``t >= 1`` pieces with ``w = 1/t``), ``head`` over ``s`` in
    ``[0, head_top]`` (``t`` in ``[0, 1]`` with ``s = t^{1-2a}/(1-2a)``).
    """
    e = 1.0 - 2.0 * a

    def tail(w):
        return (1.0 - u * w) ** (a - 1.0) * (1.0 - y * w) ** (a - 1.0) + (
            1.0 + u * w
        ) ** (a - 1.0) * (1.0 + y * w) ** (a - 1.0)

    def head(s):
        t = (e * s) ** (1.0 / e)
        return (t + u) ** (a - 1.0) * (t + y) ** (a - 1.0)

    return tail, head, 1.0 / e


def _check_k_alpha(ev: KernelEvaluator) -> None:
    if not 0.0 < ev.a < 0.5:
        raise ValueError("the correction kernel needs 0 < alpha < 1/2")


def kernel_K(ev: KernelEvaluator, u: float, y: float) -> float:
    """Correction kernel at ``(u, y)`` in ``(0, 1)^2``."""
    u, y = float(u), float(y)
    _check_unit(u, y, closed=False)
    _check_k_alpha(ev)
    a = ev.a
    lo, hi = min(u, y), max(u, y)
    scale = (lo * hi) ** a * ev.prefactor
    tail, head, top = _k_parts(a, lo, hi)
    e = 1.0 - 2.0 * a
    tol = 0.5 * ev.tol / scale
    knees = tuple(v**e / e for v in (lo, hi))
    val = adaptive_gl(tail, 0.0, 1.0, tol, max_panels=ev.max_panels)
    val += adaptive_gl(head, 0.0, top, tol, breakpoints=knees, max_panels=ev.max_panels)
    return float(scale * val)


def kernel_K_row(ev: KernelEvaluator, u: float, ys) -> np.ndarray:
    """``K(u, y)`` for an array of ``y`` (shared adaptive partition)."""
    _check_k_alpha(ev)
    a = ev.a
    ys = np.asarray(ys, dtype=float)
    if ys.size == 0:
        return np.zeros(0)
    _check_unit(float(u), float(ys.min()), float(ys.max()), closed=False)
    scale = (u * ys) ** a * ev.prefactor
    tail, head, top = _k_parts(a, u, ys[:, None])
    e = 1.0 - 2.0 * a
    tol = 0.5 * ev.tol / scale.max()
    knees = (u**e / e, ys.min() ** e / e)
    val = adaptive_gl(tail, 0.0, 1.0, tol, max_panels=ev.max_panels)
    val = val + adaptive_gl(head, 0.0, top, tol, breakpoints=knees, max_panels=ev.max_panels)
    return scale * val


def kernel_H(ev: KernelEvaluator, x: float, y: float) -> float:
    """Riesz kernel minus correction kernel; equals ``G`` off the diagonal."""
    x, y = float(x), float(y)
    _check_unit(x, y, closed=False)
    if x == y:
        raise ValueError(f"kernel_H is singular on the diagonal (x = y = {x})")
    return c_alpha(-ev.a) * abs(x - y) ** (2.0 * ev.a - 1.0) - kernel_K(ev, x, y)


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Kernel values on a tensor grid; diagonal entries hold ``nan``."""

    alpha: float
    xs: np.ndarray
    ys: np.ndarray
    G: np.ndarray
    K: np.ndarray
    H: np.ndarray

    def rows(self):
        """Yield ``(x, y, G, K, H)`` in row-major order."""
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                yield float(x), float(y), float(self.G[i, j]), float(self.K[i, j]), float(self.H[i, j])

    def to_dict(self) -> dict:
        def enc(m):
            return [[None if math.isnan(v) else float(v) for v in row] for row in m]

        return {
            "alpha": self.alpha,
            "xs": [float(v) for v in self.xs],
            "ys": [float(v) for v in self.ys],
            "G": enc(self.G),
            "K": enc(self.K),
            "H": enc(self.H),
        }

    @classmethod
    def from_dict(cls, data: dict) -> KernelTable:
        def dec(m):
            return np.array([[np.nan if v is None else v for v in row] for row in m], dtype=float)

        return cls(
            float(data["alpha"]),
            np.array(data["xs"], dtype=float),
            np.array(data["ys"], dtype=float),
            dec(data["G"]),
            dec(data["K"]),
            dec(data["H"]),
        )

    def equals(self, other: KernelTable) -> bool:
        return self.alpha == other.alpha and all(
            np.array_equal(getattr(self, f), getattr(other, f), equal_nan=True)
            for f in ("xs", "ys", "G", "K", "H")
        )


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("kernel grids must be non-empty 1-D sequences")
    if not (grid.min() > 0.0 and grid.max() < 1.0):
        raise ValueError("kernel grids must lie strictly inside (0, 1)")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("kernel grids must be strictly increasing")
    return grid


def tabulate(ev: KernelEvaluator, xs, ys) -> KernelTable:
    """Evaluate ``G``, ``K`` and ``H`` on ``xs x ys``, sharing symmetric pairs."""
    xs, ys = _check_grid(xs), _check_grid(ys)
    rc = c_alpha(-ev.a)

    pairs: dict[tuple[float, float], None] = {}
    for x in xs:
        for y in ys:
            if x != y:
                pairs[(min(x, y), max(x, y))] = None
    keys = list(pairs)

    def work(key):
        lo, hi = key
        return green_G(ev, lo, hi), kernel_K(ev, lo, hi)

    values = dict(zip(keys, thread_map(work, keys)))
    shape = (len(xs), len(ys))
    G, K, H = np.full(shape, np.nan), np.full(shape, np.nan), np.full(shape, np.nan)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if x == y:
                continue
            g, k = values[(min(x, y), max(x, y))]
            G[i, j], K[i, j] = g, k
            H[i, j] = rc * abs(x - y) ** (2.0 * ev.a - 1.0) - k
    return KernelTable(ev.a, xs, ys, G, K, H)
