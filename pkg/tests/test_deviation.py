import math

import mpmath as mp
import numpy as np
import pytest

from urnlab.engines import deviation, exact, kernel
from urnlab.engines.moments import asymptotic_moments
from urnlab.engines.urn import UrnSpec
from urnlab.errors import OutOfRange, ToleranceNotMet

MEAN = 4 / 7
VARIANCE_SLOPE = 432 / 637


def test_k_prime_at_one_is_minus_mean_slope(t23):
    assert float(deviation.K_prime(t23, 1)) == pytest.approx(-MEAN, abs=1e-14)


def test_k_prime_matches_central_difference(t23):
    step = mp.mpf("1e-8")
    for lam in (0.3, 0.5, 0.85):
        with mp.workdps(50):
            numeric = (kernel.K(t23, lam + step) - kernel.K(t23, lam - step)) / (2 * step)
            assert abs(deviation.K_prime(t23, lam) - numeric) < 1e-8


def test_k_prime_series_and_ode_meet(t23):
    # just inside and outside the Taylor window around 1
    window = deviation.series_window(t23)
    inside = deviation.K_prime(t23, 1 - window + 1e-6)
    outside = deviation.K_prime(t23, 1 - window - 1e-6)
    assert abs(inside - outside) < 1e-5


def test_series_window_shrinks_with_balance(t23):
    assert deviation.series_window(t23) == deviation.SERIES_WINDOW
    assert deviation.series_window(UrnSpec(a=1, b=1, s=61, a0=1, b0=0)) == pytest.approx(math.sin(math.pi / 63))


def test_large_balance_urn_rate():
    wide = UrnSpec(a=1, b=1, s=61, a0=1, b0=0)
    step = mp.mpf("1e-8")
    with mp.workdps(50):
        numeric = (kernel.K(wide, 0.905 + step) - kernel.K(wide, 0.905 - step)) / (2 * step)
        assert abs(deviation.K_prime(wide, 0.905) - numeric) < 1e-6

    xi = 0.9 * float(asymptotic_moments(wide).mean_slope)
    point = deviation.rate_function(wide, xi)
    direct = deviation.rate_function_golden(wide, xi)
    assert point.rate >= 0
    assert point.rate == pytest.approx(direct.rate, abs=1e-8)
    assert point.rate == pytest.approx(0.014412, rel=1e-3)
    assert point.lambda0 == pytest.approx(0.990566, abs=1e-3)


def test_rate_rejects_a_root_below_the_direct_maximum(monkeypatch):
    wide = UrnSpec(a=1, b=1, s=61, a0=1, b0=0)
    # a window past the radius of convergence gives a wrong K'
    monkeypatch.setattr(deviation, "series_window", lambda spec: 0.1)
    with pytest.raises(ToleranceNotMet):
        deviation.rate_function(wide, 0.9 * float(asymptotic_moments(wide).mean_slope))


def test_rate_root_and_direct_maximum_agree(t23):
    root = deviation.rate_function(t23, 0.3)
    direct = deviation.rate_function_golden(t23, 0.3)
    assert root.rate == pytest.approx(direct.rate, abs=1e-9)
    assert root.lambda0 == pytest.approx(direct.lambda0, abs=1e-4)
    assert 0 < root.lambda0 < 1
    assert 0 < root.rate < math.log(float(kernel.rho(t23)))


def test_rate_is_decreasing_and_convex(t23):
    levels = np.linspace(0.05 * MEAN, 0.95 * MEAN, 9)
    rates = np.array([deviation.rate_function(t23, float(xi)).rate for xi in levels])
    assert np.all(np.diff(rates) < 0)
    assert np.all(np.diff(rates, 2) > 0)


def test_rate_vanishes_quadratically_at_the_mean(t23):
    for fraction in (0.99, 0.995):
        xi = fraction * MEAN
        gaussian = (MEAN - xi) ** 2 / (2 * VARIANCE_SLOPE)
        point = deviation.rate_function(t23, xi)
        assert point.rate == pytest.approx(gaussian, rel=0.05)


def test_rate_tends_to_log_rho(t23):
    log_rho = math.log(float(kernel.rho(t23)))
    gaps = [abs(deviation.rate_function(t23, f * MEAN).rate - log_rho) for f in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_level_outside_range(t23):
    with pytest.raises(OutOfRange):
        deviation.rate_function(t23, MEAN)
    with pytest.raises(OutOfRange):
        deviation.rate_function(t23, 0)
    with pytest.raises(OutOfRange):
        deviation.rate_curve(t23, 0)


def test_rate_curve(t23):
    points = deviation.rate_curve(t23, 3)
    assert [p.xi for p in points] == pytest.approx([MEAN / 4, MEAN / 2, 3 * MEAN / 4])
    assert len(points[0].as_row()) == 3


def test_right_rate_uses_white_count(t23):
    white_mean = float(t23.swapped().s * (t23.swapped().s + t23.swapped().b)) / (t23.s + t23.h)
    point = deviation.right_rate_function(t23, 0.5 * white_mean)
    assert point.rate > 0


@pytest.mark.parametrize("n", [10, 13, 16])
def test_extreme_deviation(t23, n):
    exact_zero = exact.exact_distribution(t23, n).probs[0]
    approx = deviation.extreme_deviation(t23, n)
    assert abs(float(exact_zero) / float(approx) - 1) < 2.0 ** -(n - 4)


@pytest.mark.parametrize("n", [9, 11, 12])
def test_extreme_deviation_off_class(t23, n):
    assert deviation.extreme_deviation(t23, n) == 0
    assert 0 not in exact.exact_distribution(t23, n).probs


@pytest.mark.slow
@pytest.mark.parametrize("xi", [0.2, 0.4])
def test_empirical_rate_approaches_rate_function(t23, xi):
    decay = deviation.rate_function(t23, xi).rate
    gap = {n: abs(deviation.empirical_rate(t23, n, xi) - decay) for n in (100, 200, 400)}
    assert gap[400] < gap[100]
    assert gap[200] < gap[100]
