"""Urn models: validation and the counting facts every engine relies on."""

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Dict, Tuple

from urnlab.errors import NonPositiveParameter, OutOfRange, SpecParseError, TenabilityViolation

logger = logging.getLogger(__name__)

SPEC_KEYS = ("a", "b", "s", "a0", "b0")


@dataclass(frozen=True)
class UrnSpec:
    """Balanced subtractive urn (-a, a+s; b+s, -b) started from (a0, b0)."""

    a: int
    b: int
    s: int
    a0: int
    b0: int

    @classmethod
    def from_dict(cls, data: Dict) -> "UrnSpec":
        missing = [key for key in SPEC_KEYS if key not in data]
        if missing:
            raise SpecParseError(f"spec is missing keys: {', '.join(missing)}")
        unknown = sorted(set(data) - set(SPEC_KEYS))
        if unknown:
            raise SpecParseError(f"spec has unknown keys: {', '.join(unknown)}")
        values = {}
        for key in SPEC_KEYS:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise SpecParseError(f"spec field {key!r} must be an integer, got {value!r}")
            values[key] = value
        return cls(**values)

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)

    def matrix(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return ((-self.a, self.a + self.s), (self.b + self.s, -self.b))

    def swapped(self) -> "UrnSpec":
        """Same urn with the two colors exchanged."""
        return UrnSpec(a=self.b, b=self.a, s=self.s, a0=self.b0, b0=self.a0)

    @property
    def t0(self) -> int:
        return self.a0 + self.b0

    @property
    def h(self) -> int:
        return self.a + self.b + self.s

    def size_at(self, n: int) -> int:
        """Population t_n = t0 + n*s."""
        return self.t0 + n * self.s

    def label(self) -> str:
        (p, q), (r, t) = self.matrix()
        return f"({p},{q};{r},{t}) from ({self.a0},{self.b0})"


@dataclass(frozen=True)
class DerivedConstants:
    t0: int
    h: int
    balance_class: int


def validate(spec: UrnSpec) -> DerivedConstants:
    """Check positivity and tenability; return t0, h and h/a."""
    for name in ("a", "b", "s"):
        if getattr(spec, name) < 1:
            raise NonPositiveParameter(f"{name} must be >= 1, got {getattr(spec, name)}")
    for name in ("a0", "b0"):
        if getattr(spec, name) < 0:
            raise NonPositiveParameter(f"{name} must be >= 0, got {getattr(spec, name)}")
    if spec.t0 < 1:
        raise NonPositiveParameter("empty urn: a0 + b0 must be >= 1")

    checks = [
        ("a", "a0", spec.a, spec.a0),
        ("b", "b0", spec.b, spec.b0),
        ("a", "b+s", spec.a, spec.b + spec.s),
        ("b", "a+s", spec.b, spec.a + spec.s),
    ]
    for left, right, divisor, value in checks:
        if value % divisor:
            raise TenabilityViolation(f"{left} ∤ {right} ({divisor} does not divide {value})")

    # a | b+s forces a | h
    return DerivedConstants(t0=spec.t0, h=spec.h, balance_class=spec.h // spec.a)


def is_tenable(spec: UrnSpec) -> bool:
    try:
        validate(spec)
    except (TenabilityViolation, NonPositiveParameter):
        return False
    return True


def history_count(spec: UrnSpec, n: int) -> int:
    """Number of length-n histories: t0 (t0+s) ... (t0+(n-1)s)."""
    if n < 0:
        raise OutOfRange(f"n must be >= 0, got {n}")
    total = 1
    for k in range(n):
        total *= spec.t0 + k * spec.s
    return total


def rising_binomial(x: Fraction, n: int) -> Fraction:
    """C(n + x - 1, n) = x (x+1) ... (x+n-1) / n! for rational x."""
    out = Fraction(1)
    for k in range(n):
        out = out * (x + k) / (k + 1)
    return out


def history_count_binomial(spec: UrnSpec, n: int) -> Fraction:
    """Closed form n! s^n C(n + t0/s - 1, n)."""
    if n < 0:
        raise OutOfRange(f"n must be >= 0, got {n}")
    return math.factorial(n) * spec.s ** n * rising_binomial(Fraction(spec.t0, spec.s), n)


def arithmetically_irreducible(spec: UrnSpec) -> bool:
    """gcd of the four signed matrix entries is 1."""
    (p, q), (r, t) = spec.matrix()
    return math.gcd(math.gcd(p, q), math.gcd(r, t)) == 1


# Named urns used across the package
T23 = UrnSpec(a=2, b=3, s=1, a0=2, b0=0)
PENTAGONAL = UrnSpec(a=1, b=1, s=3, a0=1, b0=0)
