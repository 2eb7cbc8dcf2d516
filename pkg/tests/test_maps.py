import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from viana_lab.errors import (
    BoundViolated,
    BudgetExceeded,
    ConfigError,
    MonotonicityViolated,
    NoBracket,
    NotInvariant,
)
from viana_lab.maps import (
    Forcing,
    MapSpec,
    SkewProduct,
    build_bridge,
    build_map,
    calibrate_preperiodic,
    check_map,
    default_skew,
    evaluate,
    invariant_domain,
    make_perturbed_skew,
    sample_map,
    skew_apply,
    skew_jacobian,
    solve_amplitude,
)


@pytest.fixture(scope="module")
def odd3():
    return build_map(MapSpec())


@pytest.fixture(scope="module")
def even4():
    return build_map(MapSpec(parity="even", order=4))


# amplitude: D * A * w**(D-1) = slope, checked with exact rationals


@pytest.mark.parametrize(
    "order,w,expected",
    [(3, "0.1", Fraction(175, 3)), (2, "7/8", Fraction(1)), (5, "0.1", Fraction(3500))],
)
def test_solve_amplitude_examples(order, w, expected):
    A = solve_amplitude(order, float(Fraction(w)), 7 / 4)
    assert A == pytest.approx(float(expected), rel=1e-14)


@given(st.integers(2, 9), st.floats(0.01, 0.9), st.floats(0.5, 3.0))
def test_solve_amplitude_slope_property(order, w, slope):
    A = solve_amplitude(order, w, slope)
    assert order * A * w ** (order - 1) == pytest.approx(slope, rel=1e-12)


def test_solve_amplitude_rejects_bad_width():
    with pytest.raises(ConfigError):
        solve_amplitude(3, 0.0)


# bridges


def test_bridge_equal_jets_is_the_shared_line():
    br = build_bridge((1.0, 2.0, 0.0), (3.0, 2.0, 0.0), (0.0, 1.0))
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(br(x), 1.0 + 2.0 * x, atol=1e-13)
    np.testing.assert_allclose(br.coeffs[2:], 0.0, atol=1e-12)


@given(
    st.tuples(*[st.floats(-3, 3) for _ in range(6)]),
    st.floats(0.1, 2.0),
)
def test_bridge_matches_both_jets(vals, length):
    left, right = vals[:3], vals[3:]
    br = build_bridge(left, right, (0.5, 0.5 + length), check_monotone=False)
    for x, jet in ((0.5, left), (0.5 + length, right)):
        for nu in range(3):
            assert br(x, nu) == pytest.approx(jet[nu], abs=1e-9 * (1 + abs(jet[nu])))


def test_bridge_adversarial_jets_rejected():
    # slope must go 1 -> 1 with second derivative +5 at both ends: h'' changes sign
    with pytest.raises(MonotonicityViolated):
        build_bridge((0.0, 1.0, 5.0), (1.0, 1.0, 5.0), (0.0, 1.0))


# odd family


def test_odd_map_exact_values(odd3):
    assert evaluate(odd3, 0.5) == 0.0
    assert evaluate(odd3, 0.0) == 0.0
    assert evaluate(odd3, 0.25, 1) == 2.0
    assert evaluate(odd3, 0.5, 1) == 0.0


def test_odd_map_inner_formula(odd3):
    # A = 175/3, u = 0.05
    assert evaluate(odd3, 0.55) == pytest.approx(175 / 3 * 0.05 ** 3, rel=1e-12)
    assert evaluate(odd3, 0.55) == pytest.approx(0.0072916666666666, rel=1e-12)


@pytest.mark.parametrize("order", [3, 5])
def test_odd_endpoint_slopes(order):
    m = build_map(MapSpec(order=order))
    w = m.spec.inner_half_width
    for x in (0.5 - w, 0.5 + w):
        assert evaluate(m, x, 1) == pytest.approx(7 / 4, abs=1e-9)


def test_odd_outer_piece_doubling(odd3):
    xs = np.linspace(-0.2499, 0.2499, 1001) % 1.0
    np.testing.assert_array_equal(odd3.derivative(xs), 2.0)
    np.testing.assert_array_equal(odd3(xs), np.mod(2 * xs, 1.0))


def test_odd_reference_orbit(odd3):
    ref = odd3.reference_orbit
    assert (ref.target, ref.multiplier, ref.landing_time, ref.residual) == (0.0, 2.0, 1, 0.0)


def test_derivatives_match_finite_differences(odd3, even4):
    rng = np.random.default_rng(1)
    for m in (odd3, even4):
        lo, hi = (0.0, 1.0) if m.is_circle else (-1.5, 1.5)
        xs = rng.uniform(lo + 0.01, hi - 0.01, 400)
        h = 1e-6
        fd1 = (m(xs + h) - m(xs - h)) / (2 * h)
        if m.is_circle:
            fd1 = (np.mod(m(xs + h) - m(xs - h) + 0.5, 1.0) - 0.5) / (2 * h)
        fd2 = (m.derivative(xs + h) - m.derivative(xs - h)) / (2 * h)
        np.testing.assert_allclose(m.derivative(xs), fd1, rtol=1e-5, atol=1e-6)
        np.testing.assert_allclose(m.derivative(xs, 2), fd2, rtol=1e-4, atol=1e-3)


def test_odd_map_is_continuous_at_piece_joins(odd3):
    w, W = odd3.spec.inner_half_width, odd3.spec.outer_half_width
    for u in (w, W, -w, -W):
        x = 0.5 + u
        for nu in range(3):
            a = evaluate(odd3, x - 1e-12, nu)
            b = evaluate(odd3, x + 1e-12, nu)
            assert a == pytest.approx(b, abs=1e-8 * max(1.0, abs(a)))


def test_hard_checks_hold(odd3, even4):
    for m in (odd3, even4, build_map(MapSpec(order=5))):
        chk = check_map(m)
        for name in ("endpoint_slope", "max_abs_h1", "inner_slope", "outer_slope"):
            assert chk[name].ok, name


def test_strict_build_raises_on_soft_failures():
    with pytest.raises((BoundViolated, MonotonicityViolated)):
        build_map(MapSpec(), strict=True)


def test_spec_validation():
    with pytest.raises(ConfigError):
        MapSpec(order=4).resolved()
    with pytest.raises(ConfigError):
        MapSpec(inner_half_width=0.3).resolved()
    with pytest.raises(ConfigError):
        MapSpec(parity="even", order=4, a0=2.5).resolved()


# even family


def test_even_map_value_at_critical_point(even4):
    assert evaluate(even4, 0.0) == even4.spec.a0
    assert evaluate(even4, 0.0, 1) == 0.0


def test_even_reference_orbit_lands(even4):
    ref = even4.reference_orbit
    x = 0.0
    for _ in range(ref.landing_time):
        x = evaluate(even4, x)
    assert abs(x - ref.target) < 1e-9
    assert evaluate(even4, ref.target) == pytest.approx(ref.target, abs=1e-12)
    assert 1.0 < ref.multiplier <= 4.0
    assert ref.landing_time == 3


def test_quadratic_limit_oracle():
    # pure quadratic a - x^2: third iterate of 0 equals the positive fixed point
    f = lambda a: a - (a - a * a) ** 2 - (-1 + math.sqrt(1 + 4 * a)) / 2  # noqa: E731
    a = optimize.brentq(f, 1.5, 1.6, xtol=1e-15)
    assert a == pytest.approx(1.543689, abs=1e-6)
    x = 0.0
    for _ in range(3):
        x = a - x * x
    assert x == pytest.approx((-1 + math.sqrt(1 + 4 * a)) / 2, abs=1e-12)


def test_calibrate_preperiodic_no_bracket():
    with pytest.raises(NoBracket):
        calibrate_preperiodic(MapSpec(parity="even", order=4), 3, bracket=(1.0, 1.1))


def test_even_invariant_domain():
    sp = SkewProduct(16, 1e-3, build_map(MapSpec(parity="even", order=4)))
    dom = invariant_domain(sp)
    a0 = sp.map.spec.a0
    # max of sin over the sampling grid is within 2e-7 of 1
    assert dom.hi == pytest.approx(a0 + 1e-3 + 1e-3, abs=1e-9)
    xs = np.linspace(dom.lo, dom.hi, 2001)
    img = sp.map(xs)
    assert img.max() + 1e-3 < dom.hi and img.min() - 1e-3 > dom.lo


def test_invariant_domain_breaks_for_large_alpha():
    sp = SkewProduct(16, 0.6, build_map(MapSpec(parity="even", order=4)))
    with pytest.raises(NotInvariant):
        invariant_domain(sp)


def test_odd_invariant_domain_is_circle():
    dom = invariant_domain(default_skew())
    assert dom.circle and (dom.lo, dom.hi) == (0.0, 1.0)


# skew product


def test_skew_apply_examples():
    sp = default_skew(1e-3)
    t, x = skew_apply(sp, 0.0, 0.3)
    assert t == 0.0 and x == evaluate(sp.map, 0.3)
    t, x = skew_apply(sp, 0.25, 0.1)
    assert t == 0.0
    assert x == pytest.approx(evaluate(sp.map, 0.1) + 1e-3, abs=1e-16)


@given(st.floats(0, 1, exclude_max=True))
def test_skew_apply_base_is_multiplication(theta):
    sp = default_skew(1e-3)
    t, _ = skew_apply(sp, theta, 0.3)
    gap = abs(t - (16 * theta) % 1.0)
    assert min(gap, 1.0 - gap) < 1e-12


def test_skew_jacobian_examples():
    sp = default_skew(1e-3)
    g1, dth, dx = skew_jacobian(sp, 0.0, 0.5)
    assert g1 == 16.0
    assert dth == pytest.approx(2 * math.pi * 1e-3, rel=1e-14)
    assert dx == 0.0


def test_skew_jacobian_matches_finite_differences():
    sp = default_skew(1e-3)
    rng = np.random.default_rng(5)
    th = rng.uniform(0.01, 0.05, 1000)
    xs = rng.uniform(0.0, 1.0, 1000)
    h = 1e-7
    _, dth, dx = skew_jacobian(sp, th, xs)

    def f(t, x):
        return sp.alpha * sp.forcing.jet(t)[0] + sp.map(x)

    fd_t = (f(th + h, xs) - f(th - h, xs)) / (2 * h)
    fd_x = (f(th, xs + h) - f(th, xs - h)) / (2 * h)
    fd_x = np.where(np.abs(fd_x) > 10, fd_x - np.sign(fd_x) / (2 * h), fd_x)
    np.testing.assert_allclose(dth, fd_t, rtol=1e-6)
    np.testing.assert_allclose(dx, fd_x, rtol=1e-6, atol=1e-8)


def test_skew_derivative_budget():
    sp = default_skew(1e-3)
    th = np.linspace(0, 1, 4097)
    b, b1, b2 = sp.forcing.jet(th)
    assert np.abs(sp.alpha * b1).max() <= 8 * sp.alpha
    assert np.abs(sp.alpha * b2).max() <= 50 * sp.alpha


def test_perturbation_budget():
    sp = default_skew(1e-3)
    assert make_perturbed_skew(sp, []) is sp
    with pytest.raises(BudgetExceeded):
        make_perturbed_skew(sp, [(2, 0.0, 0.1)])
    small = make_perturbed_skew(sp, [(2, 0.0, 1e-4)])
    assert small.forcing.ks == (1, 2)
    assert Forcing((2,), (0.0,), (1e-4,)).cd_norm(3) <= 1.0


def test_skew_product_rejects_small_d():
    with pytest.raises(ConfigError):
        SkewProduct(8, 1e-3, build_map(MapSpec()))


def test_sample_map_shape(odd3):
    rows = sample_map(odd3, 65)
    assert rows.shape == (65, 4)
    assert rows[0, 0] == 0.0


ODD3 = build_map(MapSpec())


@settings(max_examples=50)
@given(st.floats(0.0, 1.0, exclude_max=True))
def test_circle_values_in_unit_interval(x):
    v = ODD3(np.array([x]))[0]
    assert 0.0 <= v < 1.0
