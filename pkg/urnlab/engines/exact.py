"""Exact law of the black-ball count by dynamic programming over histories.

This is the reference oracle: it knows nothing about generating functions,
only the one-step transition of the urn.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from urnlab.engines.urn import UrnSpec, history_count, validate
from urnlab.errors import InternalTenabilityBreach, OutOfRange

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HistoryPolynomial:
    """h_n(u) = sum_x h_{n,x} u^x, stored sparsely (black count -> number of histories)."""

    n: int
    coeffs: Dict[int, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.coeffs.values())


@dataclass(frozen=True)
class ExactDistribution:
    n: int
    probs: Dict[int, Fraction]

    def support(self) -> List[int]:
        return sorted(self.probs)

    def mean(self) -> Fraction:
        return sum((x * p for x, p in self.probs.items()), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum(((x - mu) ** 2 * p for x, p in self.probs.items()), Fraction(0))

    def cdf(self, x: int) -> Fraction:
        return sum((p for y, p in self.probs.items() if y <= x), Fraction(0))

    def to_rows(self) -> List[Tuple[int, int, int, float]]:
        """CSV rows: x, numerator, denominator, float."""
        return [(x, p.numerator, p.denominator, float(p)) for x, p in sorted(self.probs.items())]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "probs": {str(x): f"{p.numerator}/{p.denominator}" for x, p in sorted(self.probs.items())},
        }


def initial(spec: UrnSpec) -> HistoryPolynomial:
    return HistoryPolynomial(n=0, coeffs={spec.a0: 1})


def step(spec: UrnSpec, hp: HistoryPolynomial) -> HistoryPolynomial:
    """One draw: x -> x-a with weight x, x -> x+b+s with weight t_n - x."""
    t = spec.size_at(hp.n)
    out: Dict[int, int] = {}
    for x, count in hp.coeffs.items():
        white = t - x
        if x > 0:
            if x - spec.a < 0:
                raise InternalTenabilityBreach(
                    f"n={hp.n}: black draw from x={x} leaves {x - spec.a} black balls"
                )
            out[x - spec.a] = out.get(x - spec.a, 0) + x * count
        if white > 0:
            if white - spec.b < 0:
                raise InternalTenabilityBreach(
                    f"n={hp.n}: white draw from {white} white balls removes {spec.b}"
                )
            target = x + spec.b + spec.s
            out[target] = out.get(target, 0) + white * count
    return HistoryPolynomial(n=hp.n + 1, coeffs=out)


def history_polynomial(spec: UrnSpec, n: int) -> HistoryPolynomial:
    if n < 0:
        raise OutOfRange(f"n must be >= 0, got {n}")
    return HistoryPolynomial(n=n, coeffs=dict(_final_state(spec, n)))


@lru_cache(maxsize=64)
def _final_state(spec: UrnSpec, n: int) -> Tuple[Tuple[int, int], ...]:
    """Sorted (black count, histories) pairs after n draws."""
    validate(spec)
    hp = initial(spec)
    for _ in range(n):
        hp = step(spec, hp)
    logger.debug("history polynomial at n=%d for %s: %d states", n, spec.label(), len(hp.coeffs))
    return tuple(sorted(hp.coeffs.items()))


def exact_distribution(spec: UrnSpec, n: int) -> ExactDistribution:
    """Law of X_n as exact rationals, normalized by the total history count."""
    hp = history_polynomial(spec, n)
    total = history_count(spec, n)
    return ExactDistribution(
        n=n, probs={x: Fraction(c, total) for x, c in sorted(hp.coeffs.items())}
    )


def falling_factorial(x: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= x - i
    return out


def exact_factorial_moment(spec: UrnSpec, n: int, r: int) -> Fraction:
    """E[X_n (X_n - 1) ... (X_n - r + 1)]."""
    if r < 0:
        raise OutOfRange(f"moment order must be >= 0, got {r}")
    dist = exact_distribution(spec, n)
    return sum((falling_factorial(x, r) * p for x, p in dist.probs.items()), Fraction(0))


def pgf_polynomial(spec: UrnSpec, n: int) -> List[Fraction]:
    """Dense coefficients of p_n(u) = E[u^{X_n}], index = exponent."""
    dist = exact_distribution(spec, n)
    top = max(dist.probs)
    coeffs = [Fraction(0)] * (top + 1)
    for x, p in dist.probs.items():
        coeffs[x] = p
    return coeffs


def evaluate_polynomial(coeffs: List[Fraction], u):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


# Polynomial helpers for the differential form of the recurrence

def _shift(poly: Dict[int, int], k: int, n: int) -> Dict[int, int]:
    out = {}
    for x, c in poly.items():
        if c == 0:
            continue
        if x + k < 0:
            raise InternalTenabilityBreach(
                f"n={n}: u^{k} times the derivative leaves a negative exponent {x + k}"
            )
        out[x + k] = c
    return out


def _derivative(poly: Dict[int, int]) -> Dict[int, int]:
    return {x - 1: x * c for x, c in poly.items() if x > 0}


def _accumulate(target: Dict[int, int], poly: Dict[int, int], factor: int) -> None:
    for x, c in poly.items():
        target[x] = target.get(x, 0) + factor * c


def pde_recurrence(spec: UrnSpec, hp: HistoryPolynomial) -> HistoryPolynomial:
    """(s n + t0) u^{b+s} h_n + (u^{1-a} - u^{b+s+1}) h_n', evaluated as polynomials."""
    t = spec.size_at(hp.n)
    deriv = _derivative(hp.coeffs)
    out: Dict[int, int] = {}
    _accumulate(out, _shift(hp.coeffs, spec.b + spec.s, hp.n), t)
    _accumulate(out, _shift(deriv, 1 - spec.a, hp.n), 1)
    _accumulate(out, _shift(deriv, spec.b + spec.s + 1, hp.n), -1)
    return HistoryPolynomial(n=hp.n + 1, coeffs={x: c for x, c in out.items() if c != 0})


def float_distribution(spec: UrnSpec, n: int) -> np.ndarray:
    """Approximate law of X_n in float64; entry k holds P(X_n = a*k)."""
    validate(spec)
    if spec.a0 % spec.a:
        raise InternalTenabilityBreach("a0 is not a multiple of a")
    jump = (spec.b + spec.s) // spec.a
    probs = np.zeros(spec.a0 // spec.a + 1)
    probs[-1] = 1.0
    for m in range(n):
        t = spec.size_at(m)
        x = spec.a * np.arange(probs.size)
        black = probs * np.clip(x, 0, t) / t
        white = probs * np.clip(t - x, 0, t) / t
        nxt = np.zeros(probs.size + jump)
        nxt[:probs.size - 1] += black[1:]
        nxt[jump:] += white
        probs = nxt
    return probs


def float_support(spec: UrnSpec, probs: np.ndarray) -> np.ndarray:
    return spec.a * np.arange(probs.size)


def left_tail(spec: UrnSpec, n: int, xi: float) -> float:
    """P(X_n <= xi * n) from the float DP."""
    probs = float_distribution(spec, n)
    x = float_support(spec, probs)
    return float(probs[x <= xi * n].sum())
