import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclap.errors import InvalidAlphaError
from fraclap.operators import (
    GridFunction,
    PvQuadratureConfig,
    apply_discrete,
    apply_discrete_grid,
    reference_pv,
    rescale_interval,
    riesz_integral,
    vectorized,
)
from fraclap.solver import TestFunctionSpec
from fraclap.symbol import AlphaParam

from oracles import bump_mp, pv_mp, riesz_scipy

BUMP = TestFunctionSpec.bump(0.3, 0.7)
HAT = TestFunctionSpec.hat(0.3, 0.7)


def hat_mp(t):
    return max(mp.mpf(0), min(t - mp.mpf("0.3"), mp.mpf("0.7") - t))


def torsion_value(alpha):
    # (-Delta)^a of (x(1-x))^a on (0, 1) is constant
    return 4.0**alpha * math.gamma(1.0 + alpha) * math.gamma(0.5 + alpha) / math.sqrt(math.pi)


# discrete operator


def test_alpha_one_gives_second_difference_of_parabola():
    # -f'' = 2 for f = x(1-x); the second difference is exact on quadratics
    f = GridFunction.from_callable(lambda x: x * (1.0 - x), 64)
    one = AlphaParam.unchecked(1.0)
    for k in range(1, 64):
        assert apply_discrete(one, f, k / 64) == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(apply_discrete_grid(one, f)[1:-1], 2.0, rtol=1e-11)


def test_zero_function_maps_to_zero():
    f = GridFunction(32, np.zeros(33))
    assert apply_discrete(0.25, f, 0.5) == 0.0
    assert np.all(apply_discrete_grid(0.75, f) == 0.0)


@given(
    st.sampled_from([0.25, -0.25, 0.75]),
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.integers(0, 2**32 - 1),
    st.floats(0.01, 0.99),
)
def test_discrete_operator_is_linear(alpha, s, t, seed, x):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, 65))
    lhs = apply_discrete(alpha, GridFunction(64, s * u + t * v), x)
    rhs = s * apply_discrete(alpha, GridFunction(64, u), x) + t * apply_discrete(alpha, GridFunction(64, v), x)
    scale = 64 ** (2 * alpha) * (abs(s) + abs(t) + 1) * 10
    assert lhs == pytest.approx(rhs, abs=1e-12 * scale)


def test_grid_and_pointwise_agree():
    f = GridFunction.from_callable(BUMP, 256, compact=True)
    full = apply_discrete_grid(0.25, f)
    for k in (10, 77, 128, 200):
        assert apply_discrete(0.25, f, k / 256) == pytest.approx(full[k], rel=1e-10, abs=1e-12)


def test_off_grid_point_uses_floor_row():
    f = GridFunction.from_callable(BUMP, 100, compact=True)
    assert apply_discrete(0.25, f, 0.456) == apply_discrete(0.25, f, 0.45)


def test_apply_discrete_validation():
    with pytest.raises(ValueError):
        apply_discrete(0.25, GridFunction(1, [0.0, 0.0]), 0.5)
    with pytest.raises(ValueError):
        apply_discrete(0.25, GridFunction(4, np.zeros(5)), 1.0)


def test_discrete_converges_to_reference():
    ref = reference_pv(0.25, BUMP, 0.5, breakpoints=BUMP.breakpoints)
    errs = [abs(apply_discrete(0.25, GridFunction.from_callable(BUMP, n), 0.5) - ref)
            for n in (512, 1024, 2048, 4096)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    slope = np.polyfit(np.log([512, 1024, 2048, 4096]), np.log(errs), 1)[0]
    assert slope < -1.5


def test_discrete_error_uniform_over_interior():
    xs = [0.3, 0.4, 0.5, 0.6, 0.7]
    worst = []
    for n in (512, 2048):
        f = GridFunction.from_callable(BUMP, n)
        worst.append(max(
            abs(apply_discrete(0.25, f, x) - reference_pv(0.25, BUMP, x, breakpoints=BUMP.breakpoints))
            for x in xs
        ))
    assert worst[1] < worst[0]


# principal-value reference


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.4, 0.6, 0.75, 0.9])
def test_reference_on_torsion_function(alpha):
    def f(x):
        return np.clip(x * (1.0 - x), 0.0, None) ** alpha

    for x in (0.2, 0.5, 0.85):
        assert reference_pv(alpha, f, x) == pytest.approx(torsion_value(alpha), rel=1e-8)


def test_reference_of_constant():
    # only the boundary term survives: C_1 / (2a) (x^{-2a} + (1-x)^{-2a})
    got = reference_pv(0.25, lambda x: np.ones_like(x), 0.5)
    assert got == pytest.approx(1.1283791670955126, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.4, 0.75])
@pytest.mark.parametrize("x", [0.35, 0.5, 0.62])
def test_reference_bump_vs_mpmath(alpha, x):
    got = reference_pv(alpha, BUMP, x, breakpoints=BUMP.breakpoints)
    assert got == pytest.approx(pv_mp(alpha, bump_mp(0.3, 0.7), x, kinks=(0.3, 0.7)), abs=1e-9)


@pytest.mark.parametrize("alpha", [0.15, 0.25, 0.4])
@pytest.mark.parametrize("x", [0.2, 0.4, 0.5])
def test_reference_hat_vs_mpmath(alpha, x):
    got = reference_pv(alpha, HAT, x, breakpoints=HAT.breakpoints)
    ref = pv_mp(alpha, hat_mp, x, kinks=HAT.breakpoints)
    assert got == pytest.approx(ref, abs=1e-9)


def test_reference_cutoff_does_not_matter():
    vals = [reference_pv(0.25, BUMP, 0.45, PvQuadratureConfig(cutoff=c), breakpoints=BUMP.breakpoints)
            for c in (0.01, 0.05, 0.09)]
    assert max(vals) - min(vals) < 1e-9


def test_reference_regime_and_point():
    with pytest.raises(InvalidAlphaError):
        reference_pv(-0.25, BUMP, 0.5)
    with pytest.raises(ValueError):
        reference_pv(0.25, BUMP, 0.0)
    with pytest.raises(ValueError):
        reference_pv(0.25, BUMP, 0.05, PvQuadratureConfig(cutoff=0.08))


@pytest.mark.parametrize("kwargs", [dict(cutoff=0.1), dict(cutoff=0.0), dict(panels=4), dict(tol=0.0)])
def test_pv_config_validation(kwargs):
    with pytest.raises(ValueError):
        PvQuadratureConfig(**kwargs)


# negative order


def test_riesz_of_constant():
    got = riesz_integral(-0.25, lambda t: np.ones_like(t), 0.5)
    assert got == pytest.approx(1.1283791670955126, rel=1e-10)


def test_riesz_of_zero():
    assert riesz_integral(-0.25, lambda t: np.zeros_like(t), 0.3) == 0.0


@pytest.mark.parametrize("alpha", [-0.1, -0.25, -0.4])
@pytest.mark.parametrize("x", [0.2, 0.5, 0.66])
def test_riesz_vs_quadpack(alpha, x):
    h = lambda t: np.cos(3.0 * t) + t**2  # noqa: E731
    assert riesz_integral(alpha, h, x) == pytest.approx(riesz_scipy(alpha, h, x), rel=1e-9)


def test_riesz_with_kinks():
    got = riesz_integral(-0.25, HAT, 0.4, breakpoints=HAT.breakpoints)
    ref = riesz_scipy(-0.25, lambda t: float(HAT(t)), 0.4)
    assert got == pytest.approx(ref, rel=1e-8)


def test_riesz_regime():
    with pytest.raises(InvalidAlphaError):
        riesz_integral(0.25, np.cos, 0.5)


# transport to another interval


def test_rescale_unit_interval_is_identity():
    h = lambda t: np.cos(t)  # noqa: E731
    assert rescale_interval(-0.25, 0.0, 1.0, h, 0.4) == riesz_integral(-0.25, h, 0.4)


def test_rescale_pulls_back():
    h = lambda t: np.exp(-t)  # noqa: E731
    got = rescale_interval(-0.25, 1.0, 3.0, h, 2.5)
    assert got == pytest.approx(riesz_integral(-0.25, lambda x: np.exp(-(1.0 + 2.0 * x)), 0.75), rel=1e-14)


def test_rescale_positive_order_uses_reference():
    f = lambda t: BUMP((t - 1.0) / 2.0)  # noqa: E731
    got = rescale_interval(0.25, 1.0, 3.0, f, 2.2)
    assert got == pytest.approx(reference_pv(0.25, BUMP, 0.6), rel=1e-12)


def test_rescale_validation():
    with pytest.raises(ValueError):
        rescale_interval(-0.25, 1.0, 1.0, np.cos, 1.0)
    with pytest.raises(ValueError):
        rescale_interval(-0.25, 0.0, 1.0, np.cos, 1.0)


# function wrappers


def test_vectorized_accepts_scalar_only_callables():
    f = vectorized(math.sin)
    np.testing.assert_array_equal(f(np.array([0.0, 1.0])), np.sin([0.0, 1.0]))
    g = vectorized(lambda x: 3.0)
    np.testing.assert_array_equal(g(np.zeros(4)), np.full(4, 3.0))


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction(4, np.zeros(4))
    with pytest.raises(ValueError):
        GridFunction(4, [1.0, 0.0, 0.0, 0.0, 0.0], compact=True)
    f = GridFunction.from_callable(HAT, 10, compact=True)
    with pytest.raises(ValueError):
        f.values[3] = 1.0


def test_grid_function_interpolant():
    f = GridFunction.from_callable(HAT, 10)
    interp = f.interpolant()
    np.testing.assert_allclose(interp(f.grid), f.values)
    assert interp(0.45) == pytest.approx(0.5 * (HAT(0.4) + HAT(0.5)))
    assert interp(-0.1) == 0.0 and interp(1.1) == 0.0
