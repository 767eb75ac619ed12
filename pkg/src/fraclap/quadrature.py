"""Adaptive composite Gauss-Legendre quadrature.

Every panel is integrated with a 16-point Gauss-Legendre rule and compared
with the sum over its two halves; panels whose difference exceeds their share
of the tolerance are bisected. All panels of one refinement level are
evaluated in a single vectorised call of the integrand.

Integrands receive a 1-D array of nodes and may return either an array of the
same shape or an array with leading batch dimensions ``(..., n_nodes)``. In
the batched case the partition is shared and a panel is accepted only when
every batch member passes its error test.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import QuadratureError

__all__ = ["adaptive_gl", "fixed_gl", "gl_rule"]

GL_ORDER = 16
DEFAULT_MAX_PANELS = 4096
ROUNDOFF = 50.0 * np.finfo(float).eps


@lru_cache(maxsize=8)
def gl_rule(order: int = GL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_sums(func, lo: np.ndarray, hi: np.ndarray, noise=None):
    """Panel integrals and a roundoff bound for each panel."""
    x, w = gl_rule()
    width = hi - lo
    nodes = lo[:, None] + width[:, None] * x[None, :]
    vals = np.asarray(func(nodes.ravel()), dtype=float)
    vals = vals.reshape(vals.shape[:-1] + nodes.shape)
    mag = np.abs(vals)
    if noise is not None:
        mag = mag + np.asarray(noise(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return (vals @ w) * width, (mag @ w) * width * ROUNDOFF


def adaptive_gl(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    breakpoints: Iterable[float] = (),
    panels: int = 1,
    max_panels: int = DEFAULT_MAX_PANELS,
    rtol: float = 1e-14,
    noise: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float | np.ndarray:
    """Integrate *func* over ``[a, b]`` to tolerance ``max(tol, rtol * |I|)``.

    The initial partition is the uniform subdivision into *panels* pieces
    merged with the *breakpoints* that fall inside ``(a, b)``. A panel is also accepted once its
    error is at roundoff level, judged from ``|func|`` plus the optional
    pointwise *noise* estimate (for integrands that cancel internally).
    Raises :class:`QuadratureError` when the number of panels would exceed
    *max_panels*.
    """
    a = float(a)
    b = float(b)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if b == a:
        probe = np.asarray(func(np.array([a])), dtype=float)
        return 0.0 if probe.ndim <= 1 else np.zeros(probe.shape[:-1])
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    cuts = [np.linspace(a, b, max(int(panels), 1) + 1)]
    cuts.append([p for p in map(float, breakpoints) if a < p < b])
    edges = np.unique(np.concatenate(cuts))
    lo, hi = edges[:-1], edges[1:]
    length = b - a

    total = None
    n_panels = len(lo)
    coarse, _ = _panel_sums(func, lo, hi, noise)
    while True:
        mid = 0.5 * (lo + hi)
        fine_left, round_left = _panel_sums(func, lo, mid, noise)
        fine_right, round_right = _panel_sums(func, mid, hi, noise)
        fine = fine_left + fine_right
        estimate = np.abs(fine.sum(axis=-1) + (0.0 if total is None else total))
        scale = np.maximum(tol, rtol * estimate)[..., None] * ((hi - lo) / length)
        err = np.abs(fine - coarse)
        done = err <= np.maximum(scale, round_left + round_right)
        if done.ndim > 1:
            done = done.reshape(-1, done.shape[-1]).all(axis=0)
        done |= (hi - lo) <= 8.0 * np.finfo(float).eps * max(abs(a), abs(b), 1.0)
        accepted = fine[..., done].sum(axis=-1)
        total = accepted if total is None else total + accepted
        if done.all():
            break
        keep = ~done
        n_panels += int(keep.sum())
        if n_panels > max_panels:
            raise QuadratureError(
                f"adaptive quadrature on [{a:g}, {b:g}] exceeded {max_panels} panels "
                f"(worst panel error {err.max():.3e}, tol {tol:.3e})"
            )
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        coarse = np.concatenate([fine_left[..., keep], fine_right[..., keep]], axis=-1)
    return sign * total


def fixed_gl(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
) -> np.ndarray:
    """Sum of 16-point Gauss-Legendre rules over panels ``[lo, hi]``.

    *lo* and *hi* are broadcast together; the last axis indexes panels and is
    summed out. *func* is called once with nodes of shape ``lo.shape + (16,)``.
    """
    x, w = gl_rule()
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    width = hi - lo
    nodes = lo[..., None] + width[..., None] * x
    vals = func(nodes)
    return ((vals @ w) * width).sum(axis=-1)
