"""Numeric side of psi: delta, the Abelian integral I, rho, K and the kite.

All quadratures run under mpmath at URNLAB_PRECISION digits. Near t = 1 the
integrand of I has the algebraic singularity (1 - t)^(-(a+b)/h); it is removed
by the substitution 1 - t = tau^h, after which the integrand is analytic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import mpmath as mp
import numpy as np

from urnlab.engines.urn import UrnSpec, validate
from urnlab.errors import BranchTrackingFailure, OutOfRange, ToleranceNotMet
from urnlab.utils.config import working_precision

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-12
RHO_AGREEMENT = 1e-10
BRANCH_JUMP = np.pi / 4
BRANCH_NODES = 64
SPLIT = mp.mpf(1) / 2


@dataclass(frozen=True)
class AnalyticProfile:
    rho: object
    rho_quadrature: object
    a: int
    b: int
    s: int
    h: int
    t0: int
    puiseux_exponent: Fraction
    singular_exponent: Fraction

    def to_dict(self) -> dict:
        return {
            "rho": mp.nstr(self.rho, 20),
            "rho_quadrature": mp.nstr(self.rho_quadrature, 20),
            "h": self.h,
            "t0": self.t0,
            "puiseux_exponent": str(self.puiseux_exponent),
            "singular_exponent": str(self.singular_exponent),
        }


@dataclass(frozen=True)
class KiteGeometry:
    """Images under I of 0, 1, +infinity and e^(2 i pi / h)."""

    vertices: Tuple[complex, complex, complex, complex]
    angles: Tuple[float, float, float, float]
    polygon_vertex_count: int
    branch_phase: float

    def to_dict(self) -> dict:
        return {
            "vertices": [[z.real, z.imag] for z in self.vertices],
            "angles": list(self.angles),
            "polygon_vertex_count": self.polygon_vertex_count,
            "branch_phase": self.branch_phase,
        }


def _quad(f, interval, what: str):
    value, err = mp.quad(f, interval, error=True)
    if err > QUAD_TOLERANCE * max(1, abs(value)):
        raise ToleranceNotMet(f"{what}: quadrature error estimate {mp.nstr(err, 3)}")
    return value


def delta(spec: UrnSpec, u):
    """delta(u) = (1 - u^h)^(1/h), principal branch."""
    with mp.workdps(working_precision()):
        w = 1 - mp.power(mp.mpmathify(u), spec.h)
        if w == 0:
            return mp.mpf(0)
        return mp.power(w, mp.mpf(1) / spec.h)


def _integrand(spec: UrnSpec):
    alpha = -mp.mpf(spec.a + spec.b) / spec.h
    return lambda t: mp.power(t, spec.a - 1) * mp.power(1 - mp.power(t, spec.h), alpha)


def _tau_integrand(spec: UrnSpec):
    """The integrand of I after t = 1 - tau^h, singular factor cancelled.

    1 - (1 - y)^h = y * q(y) with q a polynomial, so the tau^(-(a+b)) from the
    singular factor meets h tau^(h-1) from dt and leaves h tau^(s-1).
    """
    h = spec.h
    # q(y) = sum_k C(h, k+1) (-y)^k, highest degree first for polyval
    q_coeffs = [mp.binomial(h, k + 1) * (-1) ** k for k in range(h)][::-1]
    alpha = -mp.mpf(spec.a + spec.b) / h

    def f(tau):
        y = mp.power(tau, h)
        return h * mp.power(tau, spec.s - 1) * mp.power(1 - y, spec.a - 1) * mp.power(mp.polyval(q_coeffs, y), alpha)

    return f


def _tail(spec: UrnSpec, x):
    """Integral of the I integrand over [x, 1] for x >= 1/2."""
    top = mp.power(1 - x, mp.mpf(1) / spec.h)
    return _quad(_tau_integrand(spec), [0, top], f"I tail from {mp.nstr(x, 6)}")


def abelian_I(spec: UrnSpec, u):
    """I(u) for real 0 <= u <= 1."""
    validate(spec)
    with mp.workdps(working_precision()):
        u = mp.mpf(u)
        if u < 0 or u > 1:
            raise OutOfRange(f"abelian_I needs 0 <= u <= 1, got {u}")
        if u == 0:
            return mp.mpf(0)
        if u <= SPLIT:
            return _quad(_integrand(spec), [0, u], f"I({mp.nstr(u, 6)})")
        total = _quad(_integrand(spec), [0, SPLIT], "I(1/2)") + _tail(spec, SPLIT)
        return total if u == 1 else total - _tail(spec, u)


def abelian_I_complex(spec: UrnSpec, u):
    """I(u) for |u| < 1, integrating along the segment [0, u]."""
    validate(spec)
    with mp.workdps(working_precision()):
        u = mp.mpmathify(u)
        if abs(u) >= 1:
            raise OutOfRange(f"abelian_I_complex needs |u| < 1, got {u}")
        if u == 0:
            return mp.mpc(0)
        f = _integrand(spec)
        return _quad(lambda r: f(u * r) * u, [0, 1], "I along a ray")


def rho(spec: UrnSpec):
    """rho = I(1) = (1/h) B(a/h, s/h)."""
    validate(spec)
    with mp.workdps(working_precision()):
        return mp.beta(mp.mpf(spec.a) / spec.h, mp.mpf(spec.s) / spec.h) / spec.h


def rho_quadrature(spec: UrnSpec):
    return abelian_I(spec, 1)


def K(spec: UrnSpec, lam):
    """K(lambda) = delta(lambda)^(-s) * integral of the I integrand over [lambda, 1]."""
    validate(spec)
    with mp.workdps(working_precision()):
        lam = mp.mpf(lam)
        if lam < 0 or lam > 1:
            raise OutOfRange(f"K needs 0 <= lambda <= 1, got {lam}")
        if lam == 1:
            return mp.mpf(1) / spec.s
        if lam >= SPLIT:
            integral = _tail(spec, lam)
        else:
            integral = _quad(_integrand(spec), [lam, SPLIT], "K head") + _tail(spec, SPLIT)
        return integral / mp.power(delta(spec, lam), spec.s)


def K_complex(spec: UrnSpec, u):
    """K(u) = (rho - I(u)) / delta(u)^s for |u| < 1."""
    with mp.workdps(working_precision()):
        u = mp.mpmathify(u)
        if u == 0:
            return rho(spec)
        return (rho(spec) - abelian_I_complex(spec, u)) / mp.power(delta(spec, u), spec.s)


def J(spec: UrnSpec, u):
    """J(u) = u^a0 / delta(u)^t0, the value psi takes at I(u)."""
    with mp.workdps(working_precision()):
        return mp.power(u, spec.a0) / mp.power(delta(spec, u), spec.t0)


def psi_numeric(spec: UrnSpec, z):
    """psi(z) for real 0 <= z < rho, by solving I(u) = z on [0, 1)."""
    validate(spec)
    with mp.workdps(working_precision()):
        z = mp.mpf(z)
        r = rho(spec)
        if z < 0 or z >= r:
            raise OutOfRange(f"psi_numeric needs 0 <= z < rho = {mp.nstr(r, 10)}, got {z}")
        if z == 0:
            return J(spec, mp.mpf(0))
        # Solve in tau = (1 - u)^(1/h), where rho - I is smooth
        def gap(tau):
            return r - _quad(_tau_integrand(spec), [0, tau], "psi inversion") - z

        top = mp.power(1 - mp.mpf(1) / 10 ** 12, mp.mpf(1) / spec.h)
        try:
            tau = mp.findroot(gap, (mp.mpf(0), top), solver="anderson")
        except (ValueError, ZeroDivisionError) as e:
            raise ToleranceNotMet(f"cannot invert I at z = {mp.nstr(z, 10)}: {e}")
        u = 1 - mp.power(tau, spec.h)
        return J(spec, u)


def analytic_profile(spec: UrnSpec) -> AnalyticProfile:
    """rho by both routes, checked against each other, plus the exponents at rho."""
    validate(spec)
    with mp.workdps(working_precision()):
        by_beta = rho(spec)
        by_quad = rho_quadrature(spec)
        if abs(by_beta - by_quad) > RHO_AGREEMENT:
            raise ToleranceNotMet(
                f"rho routes disagree: Beta {mp.nstr(by_beta, 15)} vs quadrature {mp.nstr(by_quad, 15)}"
            )
    logger.info("rho for %s: %s", spec.label(), mp.nstr(by_beta, 15))
    return AnalyticProfile(
        rho=by_beta,
        rho_quadrature=by_quad,
        a=spec.a, b=spec.b, s=spec.s, h=spec.h, t0=spec.t0,
        puiseux_exponent=Fraction(spec.h, spec.s),
        singular_exponent=Fraction(-spec.t0, spec.s),
    )


def continued_phase(spec: UrnSpec, nodes: int = BRANCH_NODES, radius: float = 1e-3) -> float:
    """Argument of 1 - u^h after going round u = 1 from above.

    Starts at arg 0 on the real segment just left of 1, follows the half circle
    u = 1 + radius e^(i theta), theta from pi down to 0.
    """
    theta = np.linspace(np.pi, 0.0, nodes)
    u = 1.0 + radius * np.exp(1j * theta)
    raw = np.angle(1.0 - u ** spec.h)
    tracked = np.unwrap(raw)
    jumps = np.abs(np.diff(tracked))
    if jumps.size and jumps.max() > BRANCH_JUMP:
        raise BranchTrackingFailure(
            f"argument of 1 - u^h jumps by {jumps.max():.3f} between adjacent nodes"
        )
    return float(tracked[-1] - tracked[0])


def ray_length(spec: UrnSpec, x=1):
    """Integral of t^(a-1) |1 - t^h|^(-(a+b)/h) over [1, t(x)], t^h = 1/(1-x).

    x = 1 is the whole ray [1, infinity) and gives (1/h) B(s/h, b/h).
    """
    with mp.workdps(working_precision()):
        p, q = mp.mpf(spec.s) / spec.h, mp.mpf(spec.b) / spec.h
        return mp.betainc(p, q, 0, x) / spec.h


def kite(spec: UrnSpec) -> KiteGeometry:
    """Vertices and interior angles of the elementary kite."""
    validate(spec)
    h = spec.h
    phase = continued_phase(spec)
    with mp.workdps(working_precision()):
        r = rho(spec)
        # 1/delta^(a+b) picks up exp(-i (a+b)/h * phase) on the ray beyond 1
        direction = mp.expj(-phase * mp.mpf(spec.a + spec.b) / h)
        infinity = r + direction * ray_length(spec)
        rotated = r * mp.expj(2 * mp.pi * spec.a / h)
    vertices = (0j, complex(r), complex(infinity), complex(rotated))
    angles = (
        2 * np.pi * spec.a / h,
        np.pi * spec.s / h,
        2 * np.pi * spec.b / h,
        np.pi * spec.s / h,
    )
    logger.debug("kite for %s: I(inf) = %s", spec.label(), vertices[2])
    return KiteGeometry(vertices, angles, h // spec.a, phase)


def polygon_boundary(spec: UrnSpec, samples: int) -> List[Tuple[complex, str]]:
    """Boundary of the fundamental polygon as (point, segment label) pairs.

    Each kite contributes its two outer edges, rho -> I(inf) -> rho e^(2 i pi a/h);
    the h/a kites are rotations of one another.
    """
    if samples < 8:
        raise OutOfRange(f"need at least 8 samples per edge, got {samples}")
    geometry = kite(spec)
    _, start, tip, end = geometry.vertices
    with mp.workdps(working_precision()):
        total = ray_length(spec)
        fractions = [float(ray_length(spec, x) / total) for x in np.linspace(0.0, 1.0, samples)]

    points: List[Tuple[complex, str]] = []
    for k in range(geometry.polygon_vertex_count):
        turn = np.exp(2j * np.pi * spec.a * k / spec.h)
        outgoing = [(start + (tip - start) * f) * turn for f in fractions]
        incoming = [(end + (tip - end) * f) * turn for f in reversed(fractions)]
        points.extend((z, f"kite{k}:out") for z in outgoing)
        points.extend((z, f"kite{k}:in") for z in incoming[1:])
    return points


def polygon_boundary_points(spec: UrnSpec, samples: int) -> List[complex]:
    return [z for z, _ in polygon_boundary(spec, samples)]
