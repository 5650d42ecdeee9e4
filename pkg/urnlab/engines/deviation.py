"""Large deviations of the black count: rate function and extreme deviations."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import mpmath as mp
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from urnlab.engines import kernel
from urnlab.engines.exact import left_tail
from urnlab.engines.moments import asymptotic_moments
from urnlab.engines.series import k_series_at_one
from urnlab.engines.urn import UrnSpec, validate
from urnlab.errors import OutOfRange, RootNotBracketed, ToleranceNotMet
from urnlab.utils import powerseries as ps
from urnlab.utils.config import working_precision

logger = logging.getLogger(__name__)

SERIES_WINDOW = 0.1
CROSS_CHECK_TOL = 1e-8
SERIES_ORDER = 40
LAMBDA_FLOOR = 1e-9
ROOT_XTOL = 1e-14


@dataclass(frozen=True)
class RatePoint:
    xi: float
    lambda0: float
    rate: float

    def as_row(self) -> Tuple[float, float, float]:
        return (self.xi, self.lambda0, self.rate)


@lru_cache(maxsize=32)
def _k_derivative_coeffs(spec: UrnSpec) -> Tuple:
    with mp.workdps(working_precision()):
        coeffs = k_series_at_one(spec, SERIES_ORDER).coeffs
        return tuple(mp.mpf(c.numerator) / c.denominator for c in ps.derivative(list(coeffs)))


def series_window(spec: UrnSpec) -> float:
    """Half the radius 2 sin(pi/h) of the Taylor series of K at 1, capped at SERIES_WINDOW."""
    return min(SERIES_WINDOW, math.sin(math.pi / spec.h))


def K_prime(spec: UrnSpec, lam):
    """K'(lambda) from (1 - u^h) K' = s u^(h-1) K - u^(a-1); Taylor series close to 1."""
    with mp.workdps(working_precision()):
        lam = mp.mpf(lam)
        if abs(lam - 1) < series_window(spec):
            return ps.evaluate(list(_k_derivative_coeffs(spec)), lam - 1)
        k = kernel.K(spec, lam)
        h = spec.h
        return (spec.s * mp.power(lam, h - 1) * k - mp.power(lam, spec.a - 1)) / (1 - mp.power(lam, h))


def _check_level(spec: UrnSpec, xi: float) -> float:
    mean = float(asymptotic_moments(spec).mean_slope)
    if not 0 < xi < mean:
        raise OutOfRange(f"xi must lie in (0, {mean:.6g}) for {spec.label()}, got {xi}")
    return mean


def _tilt_equation(spec: UrnSpec, xi: float):
    def g(lam: float) -> float:
        with mp.workdps(working_precision()):
            return float(lam * K_prime(spec, lam) / kernel.K(spec, lam) + xi)

    return g


def _log_tilted(spec: UrnSpec, xi: float, lam: float) -> float:
    with mp.workdps(working_precision()):
        return float(mp.log(spec.s * mp.power(lam, xi) * kernel.K(spec, lam)))


def rate_function(spec: UrnSpec, xi: float) -> RatePoint:
    """R(xi) = max over lambda in (0,1) of log(s lambda^xi K(lambda)), via the stationarity root."""
    validate(spec)
    _check_level(spec, xi)
    g = _tilt_equation(spec, xi)
    lo, hi = LAMBDA_FLOOR, 1.0
    g_lo, g_hi = g(lo), g(hi)
    if g_lo * g_hi > 0:
        raise RootNotBracketed(f"g({lo}) = {g_lo:.3g} and g({hi}) = {g_hi:.3g} share a sign")
    lam0 = brentq(g, lo, hi, xtol=ROOT_XTOL)
    rate = _log_tilted(spec, xi, lam0)
    logger.debug("R(%s) for %s: lambda0 = %.12g, rate = %.12g", xi, spec.label(), lam0, rate)

    # A wrong stationary point can only undershoot the maximum.
    direct = rate_function_golden(spec, xi)
    if rate < -CROSS_CHECK_TOL or direct.rate - rate > CROSS_CHECK_TOL:
        raise ToleranceNotMet(
            f"R({xi}) for {spec.label()}: root gives {rate:.12g} at lambda {lam0:.9g}, "
            f"direct maximum {direct.rate:.12g} at lambda {direct.lambda0:.9g}"
        )
    return RatePoint(xi=float(xi), lambda0=float(lam0), rate=rate)


def rate_function_golden(spec: UrnSpec, xi: float) -> RatePoint:
    """Direct bounded maximization of log(s lambda^xi K(lambda)); cross-check route."""
    validate(spec)
    _check_level(spec, xi)
    result = minimize_scalar(
        lambda lam: -_log_tilted(spec, xi, lam),
        bounds=(LAMBDA_FLOOR, 1.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return RatePoint(xi=float(xi), lambda0=float(result.x), rate=float(-result.fun))


def right_rate_function(spec: UrnSpec, xi: float) -> RatePoint:
    """Rate of P(W_n <= xi n) for the white count, by exchanging the colors."""
    return rate_function(spec.swapped(), xi)


def rate_curve(spec: UrnSpec, grid: int) -> List[RatePoint]:
    """R on grid equispaced interior points of (0, mean_slope)."""
    if grid < 1:
        raise OutOfRange(f"grid must be >= 1, got {grid}")
    mean = float(asymptotic_moments(spec).mean_slope)
    levels = np.linspace(0.0, mean, grid + 2)[1:-1]
    return [rate_function(spec, float(xi)) for xi in levels]


def extreme_deviation(spec: UrnSpec, n: int):
    """P(X_n = 0) ~ (h/a) (s rho)^(-n - t0/s) on the reachable residue class, else 0."""
    validate(spec)
    period = spec.h // spec.a
    if n % period != (spec.a0 // spec.a) % period:
        return 0
    with mp.workdps(working_precision()):
        return period * mp.power(spec.s * kernel.rho(spec), -n - mp.mpf(spec.t0) / spec.s)


def empirical_rate(spec: UrnSpec, n: int, xi: float) -> float:
    """-(1/n) log P(X_n <= xi n) from the float DP."""
    tail = left_tail(spec, n, xi)
    if tail <= 0:
        return math.inf
    return -math.log(tail) / n
