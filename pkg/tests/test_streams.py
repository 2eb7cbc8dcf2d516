import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from viana_lab.streams import BasePoint, base_point, check_seed, stream, window_digits


def test_stream_is_keyed_by_seed_index_and_purpose():
    a = stream(7, 3, "census").random(4)
    assert np.array_equal(a, stream(7, 3, "census").random(4))
    assert not np.array_equal(a, stream(7, 4, "census").random(4))
    assert not np.array_equal(a, stream(8, 3, "census").random(4))
    assert not np.array_equal(a, stream(7, 3, "b2").random(4))


def test_seed_range():
    assert check_seed(2 ** 64 - 1) == 2 ** 64 - 1
    for bad in (-1, 2 ** 64):
        with pytest.raises(ValueError):
            check_seed(bad)


def test_window_digits():
    assert window_digits(16) == 13
    assert window_digits(17) == 12
    assert 17 ** window_digits(17) <= 2 ** 53 < 17 ** (window_digits(17) + 1)


def test_from_float_exact_digits():
    bp = BasePoint.from_float(0.25, 16, 5)
    assert list(bp.digits[:3]) == [4, 0, 0]
    assert bp.theta == 0.25
    assert bp.horizon() == 6


@given(st.integers(0, 2 ** 52 - 1))
def test_from_float_round_trip(k):
    theta = k / 2 ** 52
    bp = BasePoint.from_float(theta, 16, 10)
    assert bp.theta == theta
    value = sum(Fraction(int(dg), 16 ** (i + 1)) for i, dg in enumerate(bp.digits))
    assert value == Fraction(theta)


def test_random_tail_keeps_leading_digits():
    rng = np.random.default_rng(0)
    bp = BasePoint.from_float(0.1, 16, 40, rng=rng)
    exact = BasePoint.from_float(0.1, 16, 40)
    assert np.array_equal(bp.digits[:13], exact.digits[:13])
    assert bp.digits[13:].any()


def test_shifted_windows_follow_the_base_map():
    # theta_j = frac(16^j theta) from the exact digit string
    rng = np.random.default_rng(3)
    bp = BasePoint.random(rng, 16, 30)
    value = sum(Fraction(int(dg), 16 ** (i + 1)) for i, dg in enumerate(bp.digits))
    for j in range(30):
        shifted = BasePoint(16, bp.digits[j:])
        exact = (value * 16 ** j) % 1
        assert abs(shifted.theta - float(exact)) < 16.0 ** -12


def test_base_point_horizon_check():
    bp = BasePoint.random(np.random.default_rng(1), 16, 5)
    assert base_point(bp, 16, 5) is bp
    with pytest.raises(ValueError):
        base_point(bp, 16, bp.horizon() + 1)
    with pytest.raises(ValueError):
        base_point(bp, 17, 1)
    assert math.isclose(base_point(0.5, 16, 3).theta, 0.5)
