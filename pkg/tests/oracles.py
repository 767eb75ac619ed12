"""Independent reference computations used by the tests.

Nothing here calls into ``fraclap`` numerics: values come from mpmath closed
forms, scipy's QUADPACK wrappers, dense linear algebra or brute-force rules.
"""

from __future__ import annotations

import math
import warnings

import mpmath as mp
import numpy as np
from scipy import integrate, special

mp.mp.dps = 30


def phi_hat_mp(alpha: float, n: int) -> float:
    """``(-1)^n Gamma(2a+1) / (Gamma(a+n+1) Gamma(a-n+1))`` by the reflection formula."""
    a = mp.mpf(alpha)
    n = abs(n)
    # 1/Gamma(a-n+1) = Gamma(n-a) sin(pi (a-n+1)) / pi ... use rgamma for poles.
    return float((-1) ** n * mp.gamma(2 * a + 1) * mp.rgamma(a + n + 1) * mp.rgamma(a - n + 1))


def phi_hat_fourier(alpha: float, n: int) -> float:
    """Fourier coefficient of ``|2 sin(theta/2)|^{2a}`` by QUADPACK.

    Uses evenness and factors ``t^{2a}`` into an algebraic weight on ``[0, pi]``.
    """
    def smooth(t):
        ratio = 2.0 * math.sin(t / 2.0) / t if t > 0 else 1.0
        return ratio ** (2.0 * alpha) * math.cos(n * t)

    val, _ = integrate.quad(smooth, 0.0, math.pi, weight="alg", wvar=(2.0 * alpha, 0.0),
                            epsabs=1e-13, epsrel=1e-12)
    return val / math.pi


def binom_mp(alpha: float, u: int) -> float:
    """Coefficient of ``z^u`` in ``(1 - z)^{-a}``: ``Gamma(u+a) / (Gamma(a) u!)``."""
    a = mp.mpf(alpha)
    return float(mp.gamma(u + a) / (mp.gamma(a) * mp.factorial(u)))


def c1_mp(alpha: float) -> float:
    a = mp.mpf(alpha)
    return float(2 ** (2 * a) * mp.gamma(mp.mpf(1) / 2 + a) / (mp.sqrt(mp.pi) * abs(mp.gamma(-a))))


def c_alpha_mp(beta: float) -> float:
    b = mp.mpf(beta)
    return float(-mp.gamma(2 * b + 1) * mp.sin(mp.pi * b) / mp.pi)


def dense_toeplitz(col) -> np.ndarray:
    col = np.asarray(col, dtype=float)
    idx = np.abs(np.subtract.outer(np.arange(len(col)), np.arange(len(col))))
    return col[idx]


def green_mp(alpha: float, x: float, y: float) -> float:
    """Green kernel by mpmath tanh-sinh after ``s = (t - max)^a``."""
    a = mp.mpf(alpha)
    x, y = mp.mpf(x), mp.mpf(y)
    hi, lo = max(x, y), min(x, y)
    g = lambda s: (s ** (1 / a) + hi - lo) ** (a - 1) / (s ** (1 / a) + hi) ** (2 * a) / a
    val = mp.quad(g, [0, (hi - lo) ** a, (1 - hi) ** a])
    return float((x * y) ** a / mp.gamma(a) ** 2 * val)


def kernel_k_simpson(alpha: float, u: float, y: float, nodes: int = 1_000_000) -> float:
    """Correction kernel by composite Simpson rules on transformed integrands.

    ``int_1^inf`` is mapped by ``t = 1/w``; ``int_0^inf`` is split at 1, the
    head uses ``s = t^{1-2a}/(1-2a)`` and the tail ``t = 1/w``.
    """
    a = alpha
    e = 1.0 - 2.0 * a

    def simpson(f, lo, hi):
        n = nodes if nodes % 2 == 0 else nodes + 1
        x = np.linspace(lo, hi, n + 1)
        fx = f(x)
        h = (hi - lo) / n
        return h / 3.0 * (fx[0] + fx[-1] + 4.0 * fx[1:-1:2].sum() + 2.0 * fx[2:-1:2].sum())

    def tail_first(w):
        return (1.0 - u * w) ** (a - 1) * (1.0 - y * w) ** (a - 1)

    def tail_second(w):
        return (1.0 + u * w) ** (a - 1) * (1.0 + y * w) ** (a - 1)

    def head(s):
        t = (e * s) ** (1.0 / e)
        return (t + u) ** (a - 1) * (t + y) ** (a - 1)

    total = simpson(tail_first, 0.0, 1.0) + simpson(tail_second, 0.0, 1.0)
    total += simpson(head, 0.0, 1.0 / e)
    return (u * y) ** a / math.gamma(a) ** 2 * total


def pv_mp(alpha: float, f, x: float, kinks=()) -> float:
    """Interval fractional Laplacian in 30-digit arithmetic.

    *f* must accept mpmath numbers. The part symmetric around ``x`` is paired
    into ``2 f(x) - f(x+h) - f(x-h)``, where extended precision makes the
    cancellation harmless; tanh-sinh copes with the algebraic endpoint.
    """
    with mp.workdps(50):
        a = mp.mpf(alpha)
        x = mp.mpf(x)
        r = min(x, 1 - x)
        fx = f(x)

        def paired(h):
            return (2 * fx - f(x + h) - f(x - h)) * h ** (-1 - 2 * a)

        # On [0, h_min] use 2f(x) - f(x+h) - f(x-h) ~ -jump h - curv h^2.
        h_min = mp.mpf("1e-15")
        jump = mp.diff(f, x, 1, direction=1) - mp.diff(f, x, 1, direction=-1)
        curv = (mp.diff(f, x, 2, direction=1) + mp.diff(f, x, 2, direction=-1)) / 2
        inner = -curv * h_min ** (2 - 2 * a) / (2 - 2 * a)
        if jump != 0:
            inner -= jump * h_min ** (1 - 2 * a) / (1 - 2 * a)
        cuts = sorted({abs(mp.mpf(k) - x) for k in kinks if h_min < abs(mp.mpf(k) - x) < r})
        sym = inner + mp.quad(paired, [h_min, *cuts, r])
        far_lo, far_hi = (x + r, mp.mpf(1)) if x < mp.mpf(1) / 2 else (mp.mpf(0), x - r)
        far = 0
        if far_hi > far_lo:
            mids = sorted(mp.mpf(k) for k in kinks if far_lo < k < far_hi)
            far = mp.quad(lambda t: (fx - f(t)) * abs(x - t) ** (-1 - 2 * a), [far_lo, *mids, far_hi])
        boundary = fx / (2 * a) * (x ** (-2 * a) + (1 - x) ** (-2 * a))
        return float(c1_mp(alpha) * (sym + far + boundary))


def bump_mp(a: float, b: float):
    """mpmath version of the unit-Lipschitz bump on ``[a, b]``."""
    from fraclap.solver import TestFunctionSpec

    c = mp.mpf(TestFunctionSpec.bump(a, b).amplitude)
    a, b = mp.mpf(a), mp.mpf(b)

    def f(t):
        s = (2 * t - a - b) / (b - a)
        return c * mp.exp(-1 / (1 - s * s)) if abs(s) < 1 else mp.mpf(0)

    return f


def riesz_scipy(alpha_neg: float, h, x: float) -> float:
    """``C_a int_0^1 h(t) |t-x|^{-1-2a} dt`` with QUADPACK's algebraic weights."""
    p = -1.0 - 2.0 * alpha_neg
    left = integrate.quad(h, 0.0, x, weight="alg", wvar=(0.0, p), epsabs=1e-13)[0]
    right = integrate.quad(h, x, 1.0, weight="alg", wvar=(p, 0.0), epsabs=1e-13)[0]
    return c_alpha_mp(alpha_neg) * (left + right)



def green_regular_beta(alpha: float, x: float, y: float) -> float:
    """``G(x, y) |x-y|^{1-2a}`` from the closed form of the interval Green function.

    On ``(-1, 1)``, ``G = kappa |X-Y|^{2a-1} int_0^r t^{a-1} (1+t)^{-1/2} dt`` with
    ``r = (1-X^2)(1-Y^2)/(X-Y)^2``; the integral is an incomplete beta function.
    """
    a = alpha
    X, Y = 2.0 * x - 1.0, 2.0 * y - 1.0
    num = (1.0 - X * X) * (1.0 - Y * Y)
    gap = (X - Y) ** 2
    z = num / (num + gap)
    kappa = 1.0 / (2.0 ** (2.0 * a) * math.gamma(a) ** 2)
    # near the diagonal z -> 1, so use the complement with 1 - z formed exactly
    inc = special.betaincc(0.5 - a, a, gap / (num + gap)) if z > 0.5 else special.betainc(a, 0.5 - a, z)
    inc *= special.beta(a, 0.5 - a)
    # rescaling (-1, 1) to (0, 1) multiplies G by 2^{1-2a}; |X-Y| = 2 |x-y|
    return kappa * inc


def green_beta(alpha: float, x: float, y: float) -> float:
    if min(x, y) <= 0.0 or max(x, y) >= 1.0:
        return 0.0
    return green_regular_beta(alpha, x, y) * abs(x - y) ** (2.0 * alpha - 1.0)


def green_solution_quadpack(alpha: float, f, x: float, support, kinks=()) -> float:
    """``int G(x, y) f(y) dy`` by QUADPACK on the closed-form kernel.

    Pieces touching ``y = x`` carry ``|x-y|^{2a-1}`` as an algebraic weight.
    """
    a = alpha
    lo, hi = support
    cuts = sorted({lo, hi, *[k for k in kinks if lo < k < hi], *([x] if lo < x < hi else [])})
    opts = dict(epsabs=1e-12, epsrel=1e-10, limit=200)
    total = 0.0
    # betainc near z = 1 adds a |x-y|^{1-2a} component that QAWS reports as roundoff
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for p, q in zip(cuts, cuts[1:]):
            total += _piece(a, f, x, p, q, opts)
    return total


def _piece(a, f, x, p, q, opts):
    def reg(y):
        return green_regular_beta(a, x, y) * float(f(y))

    if q == x:
        return integrate.quad(reg, p, q, weight="alg", wvar=(0.0, 2.0 * a - 1.0), **opts)[0]
    if p == x:
        return integrate.quad(reg, p, q, weight="alg", wvar=(2.0 * a - 1.0, 0.0), **opts)[0]
    return integrate.quad(lambda y: reg(y) * abs(y - x) ** (2.0 * a - 1.0), p, q, **opts)[0]
