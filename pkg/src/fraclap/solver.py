"""Solve ``(-Delta)^a g = f`` on ``]0, 1[`` with ``g = 0`` outside, for ``0 < a < 1/2``.

Three independent routes are provided:

* ``solve_green``: ``g(x) = int G(x, y) f(y) dy``;
* ``solve_riesz_correction``: the Riesz potential of ``f`` minus
  ``int K(x, y) f(y) dy``;
* ``solve_discrete``: ``N^{-2a} T_N(phi_a)^{-1}`` applied to the grid samples.

``full_solve`` runs all three on one grid and cross-checks them.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ._parallel import thread_map
from .kernels import KernelEvaluator, green_regular, kernel_K_row
from .operators import GridFunction, PvQuadratureConfig, reference_pv, riesz_integral, vectorized
from .quadrature import adaptive_gl
from .symbol import AlphaParam, Regime, as_alpha
from .toeplitz import build, levinson_solve

__all__ = [
    "FunctionKind",
    "SolveReport",
    "TestFunctionSpec",
    "full_solve",
    "residual_check",
    "solve_discrete",
    "solve_green",
    "solve_riesz_correction",
]


class FunctionKind(enum.Enum):
    HAT = "hat"
    BUMP = "bump"


def _bump_profile(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@lru_cache(maxsize=1)
def _bump_slope() -> float:
    """``max |d/ds exp(-1/(1-s^2))|`` over ``(-1, 1)``."""

    def neg_slope(s):
        return -2.0 * s / (1.0 - s * s) ** 2 * math.exp(-1.0 / (1.0 - s * s))

    res = minimize_scalar(neg_slope, bounds=(0.0, 1.0 - 1e-9), method="bounded",
                          options={"xatol": 1e-14})
    return -float(res.fun)


@dataclass(frozen=True)
class TestFunctionSpec:
    """A contracting right-hand side supported on ``[a, b]``, ``0 < a < b < 1``.

    ``HAT`` is ``max(0, min(x-a, b-x))`` and ``BUMP`` is
    ``c exp(-1/(1-s^2))`` with ``s = (2x-a-b)/(b-a)``, ``c`` chosen so the
    Lipschitz constant is 1. Both are multiplied by ``scale`` (default 1;
    ``|scale| <= 1`` keeps the function contracting).
    """

    __test__ = False  # not a pytest class

    kind: FunctionKind
    a: float
    b: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FunctionKind(self.kind))
        if not 0.0 < self.a < self.b < 1.0:
            raise ValueError(f"support [{self.a}, {self.b}] must satisfy 0 < a < b < 1")
        if not math.isfinite(self.scale):
            raise ValueError(f"scale must be finite, got {self.scale}")

    @classmethod
    def hat(cls, a: float, b: float, scale: float = 1.0) -> TestFunctionSpec:
        return cls(FunctionKind.HAT, a, b, scale)

    @classmethod
    def bump(cls, a: float, b: float, scale: float = 1.0) -> TestFunctionSpec:
        return cls(FunctionKind.BUMP, a, b, scale)

    @property
    def amplitude(self) -> float:
        """Bump height ``c`` (unscaled); the hat has unit slope instead."""
        if self.kind is FunctionKind.HAT:
            return 1.0
        return 0.5 * (self.b - self.a) / _bump_slope()

    @property
    def lipschitz(self) -> float:
        return abs(self.scale)

    @property
    def sup_norm(self) -> float:
        if self.kind is FunctionKind.HAT:
            return abs(self.scale) * 0.5 * (self.b - self.a)
        return abs(self.scale) * self.amplitude * math.exp(-1.0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.kind is FunctionKind.HAT:
            return (self.a, 0.5 * (self.a + self.b), self.b)
        return (self.a, self.b)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is FunctionKind.HAT:
            val = np.maximum(0.0, np.minimum(x - self.a, self.b - x))
        else:
            s = (2.0 * x - self.a - self.b) / (self.b - self.a)
            val = self.amplitude * _bump_profile(s)
        return self.scale * val

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "a": self.a, "b": self.b, "scale": self.scale}


def _require_sub_half(alpha) -> AlphaParam:
    alpha = as_alpha(alpha)
    alpha.require(Regime.SUB_HALF, what="the solvers")
    return alpha


def _grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if grid.size and not (grid.min() >= 0.0 and grid.max() <= 1.0):
        raise ValueError("grid points must lie in [0, 1]")
    return grid


def solve_green(
    alpha: AlphaParam | float,
    f: TestFunctionSpec,
    grid,
    *,
    tol: float = 1e-10,
) -> np.ndarray:
    """``int_a^b G(x, y) f(y) dy`` at every grid point.

    The integral is split at ``y = x`` and each side uses ``s = |y - x|^{2a}``,
    which makes the ``|x - y|^{2a-1}`` behaviour of the kernel bounded.
    """
    alpha = _require_sub_half(alpha)
    grid = _grid(grid)
    a = alpha.value
    e = 2.0 * a
    fv = vectorized(f)
    lo, hi = f.a, f.b
    bps = getattr(f, "breakpoints", ())

    def point(x):
        if not 0.0 < x < 1.0:
            return 0.0
        total = 0.0
        for sign, r_lo, r_hi in ((-1.0, max(x - hi, 0.0), x - lo), (1.0, max(lo - x, 0.0), hi - x)):
            if r_hi <= r_lo:
                continue

            # G |y-x|^{1-2a} times the Jacobian r^{1-2a} / (2a s) of s = r^{2a}.
            def integrand(s, sign=sign):
                r = s ** (1.0 / e)
                y = x + sign * r
                pair = (y, x) if sign < 0 else (x, y)
                return green_regular(a, *pair, r) * fv(y) / e

            knees = [abs(p - x) ** e for p in bps if r_lo < abs(p - x) < r_hi]
            total += adaptive_gl(integrand, r_lo**e, r_hi**e, tol / 2.0, breakpoints=knees)
        return float(total)

    return np.array(thread_map(point, grid.tolist()), dtype=float)


def solve_riesz_correction(
    alpha: AlphaParam | float,
    f: TestFunctionSpec,
    grid,
    *,
    tol: float = 1e-10,
) -> np.ndarray:
    """``D_{-a} f - int K(x, y) f(y) dy`` at every grid point (0 at ``x`` in ``{0, 1}``)."""
    alpha = _require_sub_half(alpha)
    grid = _grid(grid)
    ev = KernelEvaluator(alpha, tol=tol * 1e-2)
    neg = AlphaParam(-alpha.value)
    fv = vectorized(f)
    bps = tuple(getattr(f, "breakpoints", ()))

    def point(x):
        if not 0.0 < x < 1.0:
            return 0.0
        riesz = riesz_integral(neg, fv, x, tol=tol / 2.0, breakpoints=bps)

        def integrand(y):
            return kernel_K_row(ev, x, y) * fv(y)

        corr = adaptive_gl(integrand, f.a, f.b, tol / 2.0, breakpoints=bps)
        return float(riesz - corr)

    return np.array(thread_map(point, grid.tolist()), dtype=float)


def solve_discrete(alpha: AlphaParam | float, f, n: int) -> np.ndarray:
    """``N^{-2a} T_N(phi_a)^{-1} (f(k/N))_k``, one value per grid point ``k/N``."""
    alpha = _require_sub_half(alpha)
    if n < 64:
        raise ValueError(f"n must be >= 64, got {n}")
    samples = vectorized(f)(np.arange(n + 1) / n)
    x = levinson_solve(build(alpha, n), samples)
    return n ** (-2.0 * alpha.value) * x


def _window(window) -> tuple[float, float]:
    w1, w2 = (float(w) for w in window)
    if not 0.0 < w1 < w2 < 1.0:
        raise ValueError(f"window ({w1}, {w2}) must satisfy 0 < w1 < w2 < 1")
    return w1, w2


def residual_check(
    alpha: AlphaParam | float,
    g: GridFunction,
    f,
    window=(0.2, 0.8),
    *,
    points: Sequence[float] | None = None,
    cfg: PvQuadratureConfig | None = None,
) -> float:
    """``sup |(-Delta)^a g - f| / sup |f|`` over points of *window*.

    *g* is taken as the piecewise-linear interpolant of its samples, extended
    by zero, so the attainable residual is limited by the grid spacing.
    *points* defaults to 13 equispaced points spanning the window. When
    ``sup |f| = 0`` the unnormalised sup is returned.
    """
    alpha = as_alpha(alpha)
    w1, w2 = _window(window)
    pts = np.linspace(w1, w2, 13) if points is None else np.asarray(points, dtype=float)
    gi = g.interpolant()
    fv = vectorized(f)
    cfg = cfg or PvQuadratureConfig(max_panels=max(4096, 16 * (g.n + 1)))
    bps = tuple(g.grid[1:-1])

    def point(x):
        return reference_pv(alpha, gi, x, cfg, breakpoints=bps)

    applied = np.array(thread_map(point, pts.tolist()))
    diff = float(np.max(np.abs(applied - fv(pts)))) if pts.size else 0.0
    norm = getattr(f, "sup_norm", None)
    if norm is None:
        norm = float(np.max(np.abs(fv(np.linspace(0.0, 1.0, 4097)))))
    return diff / norm if norm > 0 else diff


@dataclass(frozen=True)
class SolveReport:
    """Solutions of the three routes on a common grid and their discrepancies.

    ``pairwise_sup`` holds sup-norm differences on the window grid for the
    pairs discrete/green (``dg``), discrete/riesz (``dr``) and green/riesz
    (``gr``). ``residual_sup`` is :func:`residual_check` of the discrete
    solution.
    """

    alpha: float
    n: int
    window: tuple[float, float]
    grid: tuple[float, ...]
    g_discrete: tuple[float, ...]
    g_green: tuple[float, ...]
    g_riesz: tuple[float, ...]
    pairwise_sup: dict = field(hash=False)
    residual_sup: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> SolveReport:
        data = json.loads(text)
        return cls(
            alpha=float(data["alpha"]),
            n=int(data["n"]),
            window=tuple(data["window"]),
            grid=tuple(data["grid"]),
            g_discrete=tuple(data["g_discrete"]),
            g_green=tuple(data["g_green"]),
            g_riesz=tuple(data["g_riesz"]),
            pairwise_sup={k: float(data["pairwise_sup"][k]) for k in ("dg", "dr", "gr")},
            residual_sup=float(data["residual_sup"]),
        )

    def rows(self):
        """``(x, g_discrete, g_green, g_riesz)`` per grid point."""
        return zip(self.grid, self.g_discrete, self.g_green, self.g_riesz)


def full_solve(
    alpha: AlphaParam | float,
    f: TestFunctionSpec,
    n: int,
    window=(0.2, 0.8),
    *,
    max_points: int = 257,
    tol: float = 1e-10,
) -> SolveReport:
    """Run the three routes on the grid points ``k/n`` inside *window*.

    The grid is thinned by a constant stride to at most *max_points* points.
    """
    alpha = _require_sub_half(alpha)
    w1, w2 = _window(window)
    ks = np.arange(math.ceil(w1 * n - 1e-9), math.floor(w2 * n + 1e-9) + 1)
    stride = max(1, math.ceil(len(ks) / max_points))
    ks = ks[::stride]
    grid = ks / n

    disc_full = solve_discrete(alpha, f, n)
    g_d = disc_full[ks]
    g_g = solve_green(alpha, f, grid, tol=tol)
    g_r = solve_riesz_correction(alpha, f, grid, tol=tol)

    def sup(u, v):
        return float(np.max(np.abs(u - v))) if len(u) else 0.0

    pairwise = {"dg": sup(g_d, g_g), "dr": sup(g_d, g_r), "gr": sup(g_g, g_r)}
    residual = residual_check(alpha, GridFunction(n, disc_full), f, (w1, w2))
    return SolveReport(
        alpha=alpha.value,
        n=int(n),
        window=(w1, w2),
        grid=tuple(grid.tolist()),
        g_discrete=tuple(g_d.tolist()),
        g_green=tuple(g_g.tolist()),
        g_riesz=tuple(g_r.tolist()),
        pairwise_sup=pairwise,
        residual_sup=residual,
    )
