"""Elliptic urns: classification, the Weierstrass function, and the lattice form of the PGF."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import mpmath as mp
import numpy as np

from urnlab.engines import kernel
from urnlab.engines.urn import T23, UrnSpec, arithmetically_irreducible, validate
from urnlab.errors import OutOfRange, PoleAt, TailTooLarge, ToleranceNotMet
from urnlab.utils.config import working_precision

logger = logging.getLogger(__name__)

# (min(a, b), max(a, b), s) of the six irreducible elliptic urns
ELLIPTIC_CASES: Dict[str, Tuple[int, int, int]] = {
    "A": (2, 3, 1),
    "B": (1, 2, 1),
    "C": (1, 1, 1),
    "D": (1, 1, 2),
    "E": (1, 3, 2),
    "F": (1, 2, 3),
}

LAURENT_TERMS = 48
POLE_EPS = 1e-14
PSI_AGREEMENT = 1e-8
LATTICE_RADIUS = 30
TAIL_FACTOR = 8
TAIL_TOLERANCE = 1e-10
FFT_RADIUS = 0.9
FFT_POINTS = 32


@dataclass(frozen=True)
class EllipticVerdict:
    is_elliptic: bool
    matched_case: Optional[str]
    reason: str
    spec: Optional[Dict[str, int]] = None

    def to_dict(self) -> dict:
        return {
            "is_elliptic": self.is_elliptic,
            "matched_case": self.matched_case,
            "reason": self.reason,
            "spec": self.spec,
        }


def canonical_spec(case: str) -> UrnSpec:
    """Case urn started from a0 = lcm(a, s) black balls, so t0/s is integral."""
    try:
        a, b, s = ELLIPTIC_CASES[case]
    except KeyError:
        raise OutOfRange(f"unknown elliptic case {case!r}; expected one of {', '.join(ELLIPTIC_CASES)}")
    return UrnSpec(a=a, b=b, s=s, a0=a * s // math.gcd(a, s), b0=0)


def classify(spec: UrnSpec) -> EllipticVerdict:
    """Irreducible, h/s integral and one of the six cases."""
    validate(spec)
    record = spec.to_dict()
    if not arithmetically_irreducible(spec):
        g = math.gcd(spec.a, math.gcd(spec.b, spec.s))
        return EllipticVerdict(False, None, f"not arithmetically irreducible (gcd {g})", record)
    if spec.h % spec.s:
        return EllipticVerdict(False, None, f"h/s = {Fraction(spec.h, spec.s)} fractional", record)
    key = (min(spec.a, spec.b), max(spec.a, spec.b), spec.s)
    for label, case in ELLIPTIC_CASES.items():
        if case == key:
            return EllipticVerdict(True, label, f"case {label}, h/s = {spec.h // spec.s}", record)
    return EllipticVerdict(False, None, f"h/s = {spec.h // spec.s} integral but not a listed case", record)


def solve_triples(bound: int) -> List[Tuple[int, int, int]]:
    """x <= y <= z <= bound, gcd 1, each dividing the sum of the other two."""
    if bound < 3:
        raise OutOfRange(f"bound must be >= 3, got {bound}")
    out = []
    for x in range(1, bound + 1):
        for y in range(x, bound + 1):
            for z in range(y, bound + 1):
                if math.gcd(x, math.gcd(y, z)) != 1:
                    continue
                if (y + z) % x == 0 and (z + x) % y == 0 and (x + y) % z == 0:
                    out.append((x, y, z))
    return out


def enumerate_elliptic(s_max: int) -> List[UrnSpec]:
    """All elliptic urns with balance <= s_max, colors ordered a <= b.

    Tenability with a <= b forces b <= 3s, so the search is finite.
    """
    if s_max < 1:
        raise OutOfRange(f"s_max must be >= 1, got {s_max}")
    found = []
    for s in range(1, s_max + 1):
        for b in range(1, 3 * s + 1):
            for a in range(1, b + 1):
                candidate = UrnSpec(a=a, b=b, s=s, a0=a * s // math.gcd(a, s), b0=0)
                if (b + s) % a or (a + s) % b:
                    continue
                if classify(candidate).is_elliptic:
                    found.append(candidate)
    logger.info("elliptic urns with s <= %d: %d", s_max, len(found))
    return found


# Weierstrass function

def _hex_region(lattice: "Lattice", radius: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points with max(|n1|, |n2|, |n1 + n2|) <= radius, and that norm for each."""
    n1, n2 = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1))
    norm = np.maximum(np.maximum(np.abs(n1), np.abs(n2)), np.abs(n1 + n2))
    inside = norm <= radius
    w = n1[inside] * lattice.gen1 + n2[inside] * lattice.gen2
    return w, norm[inside]


@dataclass(frozen=True)
class Lattice:
    gen1: complex
    gen2: complex

    def __post_init__(self):
        if abs((self.gen1.conjugate() * self.gen2).imag) < 1e-15:
            raise ValueError("lattice generators are linearly dependent over the reals")

    def scaled(self, c: complex) -> "Lattice":
        return Lattice(self.gen1 * c, self.gen2 * c)

    def points(self, radius: int) -> np.ndarray:
        """Nonzero n1 gen1 + n2 gen2 with max(|n1|, |n2|, |n1 + n2|) <= radius.

        For the hexagonal lattice these are whole hexagonal shells, on which
        sums of w^-k vanish unless 6 divides k.
        """
        w, norm = _hex_region(self, radius)
        return w[norm > 0]

    def reduce(self, z: complex) -> Tuple[complex, complex]:
        """Nearest lattice point to z and the offset z - point."""
        basis = np.array([[self.gen1.real, self.gen2.real], [self.gen1.imag, self.gen2.imag]])
        x1, x2 = np.linalg.solve(basis, [z.real, z.imag])
        r1, r2 = round(x1), round(x2)
        best = None
        for d1 in (-1, 0, 1):
            for d2 in (-1, 0, 1):
                w = (r1 + d1) * self.gen1 + (r2 + d2) * self.gen2
                if best is None or abs(z - w) < abs(z - best):
                    best = w
        return best, z - best


HEX = Lattice(complex(np.exp(1j * np.pi / 6)), complex(np.exp(-1j * np.pi / 6)))


@dataclass(frozen=True)
class WeierstrassParams:
    g2: complex
    g3: complex
    laurent_coeffs: Tuple = field(default_factory=tuple)


def laurent_coefficients(g2, g3, count: int = LAURENT_TERMS) -> List:
    """c_2 .. c_count with wp(z) = z^-2 + sum_k c_k z^(2k-2); exact for rational g2, g3."""
    exact = isinstance(g2, (int, Fraction)) and isinstance(g3, (int, Fraction))
    zero = Fraction(0) if exact else 0j
    c = {2: Fraction(g2) / 20 if exact else g2 / 20, 3: Fraction(g3) / 28 if exact else g3 / 28}
    for k in range(4, count + 1):
        acc = sum((c[m] * c[k - m] for m in range(2, k - 1)), zero)
        c[k] = Fraction(3, (2 * k + 1) * (k - 3)) * acc if exact else 3 * acc / ((2 * k + 1) * (k - 3))
    return [c[k] for k in range(2, count + 1)]


def weierstrass_params(g2, g3, count: int = LAURENT_TERMS) -> WeierstrassParams:
    coeffs = tuple(complex(c) for c in laurent_coefficients(g2, g3, count))
    return WeierstrassParams(complex(g2), complex(g3), coeffs)


def _offset(z: complex, lattice: Lattice) -> complex:
    _, zeta = lattice.reduce(complex(z))
    scale = min(abs(lattice.gen1), abs(lattice.gen2))
    if abs(zeta) < POLE_EPS * scale:
        raise PoleAt(f"z = {z} is a lattice point")
    return zeta


def wp(z: complex, params: WeierstrassParams, lattice: Lattice) -> complex:
    """wp(z) from the Laurent series at the nearest lattice point."""
    zeta = _offset(z, lattice)
    sq = zeta * zeta
    acc = 0j
    for c in reversed(params.laurent_coeffs):
        acc = acc * sq + c
    return 1 / sq + acc * sq


def wp_derivative(z: complex, params: WeierstrassParams, lattice: Lattice) -> complex:
    zeta = _offset(z, lattice)
    sq = zeta * zeta
    acc = 0j
    for k in range(len(params.laurent_coeffs) + 1, 1, -1):
        acc = acc * sq + (2 * k - 2) * params.laurent_coeffs[k - 2]
    return -2 / (sq * zeta) + acc * zeta


def wp_lattice_sum(z: complex, lattice: Lattice, radius: int = LATTICE_RADIUS) -> complex:
    """z^-2 + sum over nonzero w of (z - w)^-2 - w^-2, truncated; slow, for checking."""
    w = lattice.points(radius)
    return complex(1 / z ** 2 + np.sum(1 / (z - w) ** 2 - 1 / w ** 2))


def eisenstein_invariants(lattice: Lattice, radius: int = LATTICE_RADIUS) -> Tuple[complex, complex]:
    """g2 = 60 sum w^-4 and g3 = 140 sum w^-6 over nonzero lattice points."""
    w = lattice.points(radius)
    return complex(60 * np.sum(w ** -4.0)), complex(140 * np.sum(w ** -6.0))


# The (-2,3; 4,-3) urn

def _t23_scale() -> float:
    with mp.workdps(working_precision()):
        return float(kernel.rho(T23) * mp.sqrt(3))


def hex_params() -> WeierstrassParams:
    """Invariants of the unit hexagonal lattice: g2 = 0, g3 = -108 rho^6."""
    with mp.workdps(working_precision()):
        g3 = -108 * kernel.rho(T23) ** 6
    return weierstrass_params(0, float(g3))


def psi_elliptic(z: complex) -> complex:
    """psi of the (-2,3; 4,-3) urn started from two black balls.

    Evaluated as (rho sqrt3)^-2 wp((z - rho)/(rho sqrt3); hex) and as
    wp(z - rho; g2 = 0, g3 = -4); the two must agree.
    """
    z = complex(z)
    c = _t23_scale()
    r = c / math.sqrt(3)
    scaled = wp((z - r) / c, hex_params(), HEX) / c ** 2
    direct = wp(z - r, weierstrass_params(0, -4), HEX.scaled(c))
    if abs(scaled - direct) > PSI_AGREEMENT * max(1.0, abs(direct)):
        raise ToleranceNotMet(f"psi forms disagree at z = {z}: {scaled} vs {direct}")
    return direct


def _pgf_sum(n: int, k_val: complex, d_val: complex, radius: int, tolerance: float) -> complex:
    m = n + 2
    c = _t23_scale() / d_val
    w, norm = _hex_region(HEX, TAIL_FACTOR * radius)
    near = norm <= radius
    total = np.sum((k_val + c * w[near]) ** (-m))
    # beyond radius: (K + c w)^-m ~ (c w)^-m
    total += c ** (-m) * np.sum(w[~near] ** (-float(m)))
    outer = TAIL_FACTOR * radius
    bound = abs(c) ** (-m) * (4 * np.pi / math.sqrt(3)) / ((m - 2) * (outer * math.sqrt(3) / 2) ** (m - 2))
    if bound > tolerance:
        raise TailTooLarge(f"lattice tail bound {bound:.3g} exceeds {tolerance:.3g} at n = {n}")
    return complex(total)


def lattice_pgf(n: int, u: complex, radius: int = LATTICE_RADIUS, tolerance: float = TAIL_TOLERANCE) -> complex:
    """E[u^X_n] = sum over hex lattice points w of (K(u) + rho sqrt3 w / delta(u))^(-n-2)."""
    if n < 2:
        raise OutOfRange(f"lattice sum needs n >= 2 for a controlled tail, got {n}")
    if radius < 3:
        raise OutOfRange(f"radius must be >= 3, got {radius}")
    u = complex(u)
    if u == 1:
        return 1 + 0j
    if abs(u) >= 1:
        raise OutOfRange(f"lattice sum needs |u| < 1, got {u}")
    with mp.workdps(working_precision()):
        k_val = complex(kernel.K_complex(T23, u))
        d_val = complex(kernel.delta(T23, u))
    return _pgf_sum(n, k_val, d_val, radius, tolerance)


@lru_cache(maxsize=8)
def _circle_nodes(points: int, r: float) -> Tuple[Tuple[complex, complex], ...]:
    nodes = r * np.exp(2j * np.pi * np.arange(points) / points)
    out = []
    with mp.workdps(working_precision()):
        for u in nodes:
            out.append((complex(kernel.K_complex(T23, complex(u))), complex(kernel.delta(T23, complex(u)))))
    return tuple(out)


def lattice_pgf_coefficients(n: int, radius: int = LATTICE_RADIUS, points: int = FFT_POINTS,
                             r: float = FFT_RADIUS) -> np.ndarray:
    """P(X_n = x) for x = 0 .. n+2, by sampling lattice_pgf on |u| = r and inverting the DFT."""
    if n < 2:
        raise OutOfRange(f"lattice sum needs n >= 2, got {n}")
    degree = n + 2
    if points <= degree:
        raise OutOfRange(f"need more than {degree} sample points, got {points}")
    values = np.array([_pgf_sum(n, k_val, d_val, radius, TAIL_TOLERANCE)
                       for k_val, d_val in _circle_nodes(points, r)])
    coeffs = np.fft.fft(values) / points
    return (coeffs[: degree + 1] / r ** np.arange(degree + 1)).real

