"""Moments of X_n: asymptotic slopes, the polynomials P_r, binomial closed forms."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import List, Optional, Tuple

import mpmath as mp

from urnlab.engines.exact import exact_factorial_moment
from urnlab.engines.series import k_series_at_one, singular_expansion
from urnlab.engines.urn import T23, UrnSpec, validate
from urnlab.errors import OutOfRange, PrecisionLoss
from urnlab.utils import powerseries as ps
from urnlab.utils.config import working_precision

logger = logging.getLogger(__name__)

EVALUATION_TOLERANCE = 1e-10


@dataclass(frozen=True)
class MomentPolynomial:
    """P_r(v) with E[X_n falling r] = P_r(n + t0/s); coeffs[m] multiplies v^m."""

    r: int
    coeffs: Tuple[Fraction, ...]
    validity_threshold: Optional[int] = None

    def __call__(self, v) -> Fraction:
        return ps.evaluate(list(self.coeffs), Fraction(v))

    def __str__(self) -> str:
        parts = [f"{c}·v^{m}" if m > 1 else (f"{c}·v" if m == 1 else str(c))
                 for m, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class AsymptoticMoments:
    mean_slope: Fraction
    variance_slope: Fraction

    def to_dict(self) -> dict:
        return {"mean_slope": str(self.mean_slope), "variance_slope": str(self.variance_slope)}


def asymptotic_moments(spec: UrnSpec) -> AsymptoticMoments:
    """E(X_n) ~ s(s+b)/(s+h) n and V(X_n) ~ s h^2 (s+a)(s+b) / ((s+h)^2 (s+2h)) n."""
    validate(spec)
    a, b, s, h = spec.a, spec.b, spec.s, spec.h
    return AsymptoticMoments(
        mean_slope=Fraction(s * (s + b), s + h),
        variance_slope=Fraction(s * h * h * (s + a) * (s + b), (s + h) ** 2 * (s + 2 * h)),
    )


def _log_tilt(spec: UrnSpec, order: int) -> List[Fraction]:
    """L(eta) = -log(s K(1 + eta))."""
    k = k_series_at_one(spec, order).coeffs
    return ps.scale(ps.log(ps.scale(list(k), spec.s), order), -1)


def _validity_threshold(spec: UrnSpec, r: int) -> Optional[int]:
    if (spec.a, spec.b, spec.s, spec.a0, spec.b0) == (T23.a, T23.b, T23.s, T23.a0, T23.b0):
        return 6 * r - 1
    return None


def moment_polynomials(spec: UrnSpec, r_max: int) -> List[MomentPolynomial]:
    """P_0 .. P_r_max from exp(v L(eta)) = sum_r eta^r / r! P_r(v)."""
    validate(spec)
    if r_max < 1:
        raise OutOfRange(f"r_max must be >= 1, got {r_max}")
    n = r_max + 1
    tilt = _log_tilt(spec, n)
    powers = [[1] + [0] * (n - 1)]
    for _ in range(r_max):
        powers.append(ps.mul(powers[-1], tilt, n))

    out = []
    for r in range(r_max + 1):
        coeffs = tuple(
            Fraction(factorial(r), factorial(m)) * Fraction(powers[m][r]) for m in range(r + 1)
        )
        out.append(MomentPolynomial(r, coeffs, _validity_threshold(spec, r)))
    return out


def t23_moment_polynomials(r_max: int) -> List[MomentPolynomial]:
    return moment_polynomials(T23, r_max)[1:]


def variance_exact_t23(n: int) -> Fraction:
    """V(X_n) = P_2 + P_1 - P_1^2 at v = n + 2, exact for n >= 11."""
    if n < 11:
        raise OutOfRange(f"the polynomial form holds from n = 11 on, got n = {n}")
    _, p1, p2 = moment_polynomials(T23, 2)
    v = n + 2
    return p2(v) + p1(v) - p1(v) ** 2


@dataclass(frozen=True)
class ClosedFormMoment:
    """E[X_n falling r] as sum_j c_j * prod_{i<n} (beta_j + i) / (t0/s + i)."""

    r: int
    base: Fraction
    terms: Tuple[Tuple[Fraction, Fraction], ...] = field(default_factory=tuple)

    def evaluate(self, n: int) -> Fraction:
        total = Fraction(0)
        for coeff, beta in self.terms:
            ratio = Fraction(1)
            for i in range(n):
                ratio = ratio * (beta + i) / (self.base + i)
                if ratio == 0:
                    break
            total += coeff * ratio
        return total

    def evaluate_mp(self, n: int):
        """Same sum through rising factorials in mpmath; refuses to return noise."""
        with mp.workdps(working_precision()):
            base = _mpf(self.base)
            parts = [_mpf(c) * mp.rf(_mpf(beta), n) / mp.rf(base, n) for c, beta in self.terms]
            total = mp.fsum(parts)
            scale = max((abs(p) for p in parts), default=mp.mpf(0))
            if scale and abs(total) < scale * mp.mpf(10) ** (-mp.mp.dps) / EVALUATION_TOLERANCE:
                raise PrecisionLoss(
                    f"closed form for r={self.r} at n={n} cancels below {EVALUATION_TOLERANCE}"
                )
            return total


def _mpf(q):
    q = Fraction(q)
    return mp.mpf(q.numerator) / q.denominator


def _power_from_zero(f: List[Fraction], k: int, n: int) -> List[Fraction]:
    out = [1] + [0] * (n - 1)
    for _ in range(k):
        out = ps.mul(out, f, n)
    return out


def closed_form_factorial_moment(spec: UrnSpec, r: int) -> ClosedFormMoment:
    """Binomial-ratio form of the r-th factorial moment from the a_k and K around 1.

    Near u = 1 the generating function reads
        sum_k a_k (1 - u^h)^k (s K(u) - s z)^(e_k),  e_k = (k h - t0)/s,
    and s K(u) - s z = (1 - s z) + kappa(u) with kappa(1) = 0.
    """
    validate(spec)
    if r < 0:
        raise OutOfRange(f"moment order must be >= 0, got {r}")
    base = Fraction(spec.t0, spec.s)
    if r == 0:
        return ClosedFormMoment(r=0, base=base, terms=((Fraction(1), base),))

    n = r + 1
    a_k = singular_expansion(spec, n).a_k
    kappa = ps.scale(list(k_series_at_one(spec, n).coeffs), spec.s)
    kappa[0] -= 1
    vanishing = [-comb(spec.h, j) if j > 0 else 0 for j in range(n)]

    terms = []
    for k in range(r + 1):
        e_k = Fraction(k * spec.h - spec.t0, spec.s)
        left = _power_from_zero(vanishing, k, n)
        for ell in range(r - k + 1):
            eta_coeff = ps.mul(left, _power_from_zero(kappa, ell, n), n)[r]
            if eta_coeff == 0:
                continue
            coeff = factorial(r) * a_k[k] * ps.generalized_binomial(e_k, ell) * eta_coeff
            terms.append((Fraction(coeff), ell - e_k))
    logger.debug("closed form r=%d for %s: %d terms", r, spec.label(), len(terms))
    return ClosedFormMoment(r=r, base=base, terms=tuple(terms))


def moment_table(spec: UrnSpec, r_max: int, n_max: int) -> List[Tuple[int, int, Fraction, Fraction, Fraction]]:
    """Rows (n, r, exact, closed form, difference) for 1 <= r <= r_max, 0 <= n <= n_max."""
    forms = [closed_form_factorial_moment(spec, r) for r in range(1, r_max + 1)]
    rows = []
    for n in range(n_max + 1):
        for form in forms:
            exact = exact_factorial_moment(spec, n, form.r)
            closed = form.evaluate(n)
            rows.append((n, form.r, exact, closed, exact - closed))
    return rows
