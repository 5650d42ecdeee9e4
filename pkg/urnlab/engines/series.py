"""Exact series for psi: at the origin, at the dominant singularity, and K at u = 1.

Everything here runs on Fraction coefficients through urnlab.utils.powerseries.
The only exception is k_inverse_series, where rho enters and the coefficients
are mpmath reals.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import List, Tuple

import mpmath as mp

from urnlab.engines.urn import UrnSpec, rising_binomial, validate
from urnlab.errors import NormalizationBreach, OutOfRange, ReversionFailure
from urnlab.utils import powerseries as ps
from urnlab.utils.config import working_precision

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 20
MIN_ORDER = 2


@dataclass(frozen=True)
class FormalSeries:
    """c_0 x^offset + c_1 x^(offset+step) + ... truncated after len(coeffs) terms."""

    var_name: str
    offset: Fraction
    step: Fraction
    coeffs: Tuple = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def exponent(self, k: int) -> Fraction:
        return self.offset + k * self.step

    def terms(self) -> List[Tuple[Fraction, object]]:
        return [(self.exponent(k), c) for k, c in enumerate(self.coeffs)]

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.var_name, self.offset, self.step, tuple(self.coeffs[:order]))

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        if self.step != other.step:
            raise ValueError(f"cannot multiply series with steps {self.step} and {other.step}")
        n = min(self.order, other.order)
        coeffs = ps.mul(list(self.coeffs), list(other.coeffs), n)
        return FormalSeries(self.var_name, self.offset + other.offset, self.step, tuple(coeffs))

    def __pow__(self, k: int) -> "FormalSeries":
        if k < 0:
            raise ValueError("only nonnegative integral powers")
        if k == 0:
            return FormalSeries(self.var_name, Fraction(0), self.step,
                                tuple([1] + [0] * (self.order - 1)))
        coeffs = ps.power(list(self.coeffs), k, self.order)
        return FormalSeries(self.var_name, self.offset * k, self.step, tuple(coeffs))

    def evaluate(self, x):
        """Sum of the truncated series at x (mpmath arithmetic)."""
        x = mp.mpmathify(x)
        total = mp.mpf(0)
        for e, c in self.terms():
            if c == 0:
                continue
            coeff = mp.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else c
            total += coeff * mp.power(x, mp.mpf(e.numerator) / e.denominator)
        return total

    def to_json(self) -> list:
        """[[exp_num, exp_den, coeff_num, coeff_den], ...]; non-rational coefficients as strings."""
        out = []
        for e, c in self.terms():
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
                out.append([e.numerator, e.denominator, c.numerator, c.denominator])
            else:
                out.append([e.numerator, e.denominator, mp.nstr(c, 20)])
        return out

    def __str__(self) -> str:
        parts = []
        for e, c in self.terms():
            if c == 0:
                continue
            coeff = str(Fraction(c)) if isinstance(c, (int, Fraction)) else mp.nstr(c, 12)
            if e == 0:
                parts.append(coeff)
            elif e == 1:
                parts.append(f"{coeff}·{self.var_name}")
            else:
                parts.append(f"{coeff}·{self.var_name}^{e}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SingularExpansion:
    """psi(z) = (s(rho - z))^prefactor_exponent * sum_k a_k (s(rho - z))^(k * puiseux_step)."""

    prefactor_exponent: Fraction
    puiseux_step: Fraction
    a_k: Tuple[Fraction, ...]
    balance: int

    def evaluate(self, distance):
        """Truncated expansion at rho - z = distance > 0."""
        w = self.balance * mp.mpf(distance)
        pre = mp.power(w, _mpf(self.prefactor_exponent))
        step = _mpf(self.puiseux_step)
        return pre * mp.fsum(_mpf(c) * mp.power(w, k * step) for k, c in enumerate(self.a_k))

    def to_dict(self) -> dict:
        return {
            "prefactor_exponent": str(self.prefactor_exponent),
            "puiseux_step": str(self.puiseux_step),
            "a_k": [str(c) for c in self.a_k],
        }


def _mpf(q):
    q = Fraction(q)
    return mp.mpf(q.numerator) / q.denominator


def _check_order(order: int) -> None:
    if order < MIN_ORDER:
        raise OutOfRange(f"series order must be >= {MIN_ORDER}, got {order}")


def i_series(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """I(u) = sum_j C(j + (a+b)/h - 1, j) u^(a + j h) / (a + j h)."""
    validate(spec)
    _check_order(order)
    alpha = Fraction(spec.a + spec.b, spec.h)
    coeffs = tuple(
        rising_binomial(alpha, j) / (spec.a + j * spec.h) for j in range(order)
    )
    return FormalSeries("u", Fraction(spec.a), Fraction(spec.h), coeffs)


def j_series(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """J(u) = u^a0 (1 - u^h)^(-t0/h)."""
    validate(spec)
    _check_order(order)
    alpha = Fraction(spec.t0, spec.h)
    coeffs = tuple(rising_binomial(alpha, j) for j in range(order))
    return FormalSeries("u", Fraction(spec.a0), Fraction(spec.h), coeffs)


def _i_kernel(spec: UrnSpec, n: int) -> List[Fraction]:
    """G with I(u) = u^a G(u^h), dense in v = u^h."""
    return list(i_series(spec, n).coeffs)


def _phi(spec: UrnSpec, n: int) -> List[Fraction]:
    """phi(v) = v G(v)^(h/a); I(u)^(h/a) = phi(u^h)."""
    m = spec.h // spec.a
    g_pow = ps.power(_i_kernel(spec, n), m, n)
    return [0] + g_pow[: n - 1]


def psi_hat(spec: UrnSpec, order: int = DEFAULT_ORDER) -> List[Fraction]:
    """Coefficients of psi_hat with psi(z) = z^(a0/a) psi_hat(z^(h/a))."""
    validate(spec)
    _check_order(order)
    n = order
    phi = _phi(spec, n + 1)
    try:
        t = ps.revert(phi, n)
    except ZeroDivisionError as e:
        raise ReversionFailure(f"cannot revert I for {spec.label()}: {e}")
    g_of_t = ps.compose(_i_kernel(spec, n), t, n)
    f = ps.inverse(g_of_t, n)
    out = ps.power(f, spec.a0 // spec.a, n)
    tail = ps.power(ps.sub([1], t, n), Fraction(-spec.t0, spec.h), n)
    return ps.mul(out, tail, n)


def psi_series_at_zero(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """psi near the origin, by reverting I in the variable u^h and composing into J."""
    coeffs = psi_hat(spec, order)
    logger.debug("psi series for %s: leading coefficient %s", spec.label(), coeffs[0])
    return FormalSeries("z", Fraction(spec.a0, spec.a), Fraction(spec.h, spec.a), tuple(coeffs))


def psi_of_i(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """psi(I(u)) as a series in u; equals j_series when the reversion is right."""
    n = order
    g = _i_kernel(spec, n)
    phi = _phi(spec, n)
    inner = ps.compose(psi_hat(spec, n), phi, n)
    prefactor = ps.power(g, spec.a0 // spec.a, n)
    coeffs = ps.mul(prefactor, inner, n)
    return FormalSeries("u", Fraction(spec.a0), Fraction(spec.h), tuple(coeffs))


def factorize_psi(spec: UrnSpec, order: int = DEFAULT_ORDER) -> Tuple[FormalSeries, FormalSeries]:
    """psi_I (start (a, 0)) and psi_II (start (0, b)); psi = psi_I^(a0/a) psi_II^(b0/b)."""
    validate(spec)
    first = UrnSpec(a=spec.a, b=spec.b, s=spec.s, a0=spec.a, b0=0)
    second = UrnSpec(a=spec.a, b=spec.b, s=spec.s, a0=0, b0=spec.b)
    return psi_series_at_zero(first, order), psi_series_at_zero(second, order)


def recombine(spec: UrnSpec, psi_first: FormalSeries, psi_second: FormalSeries) -> FormalSeries:
    return psi_first ** (spec.a0 // spec.a) * psi_second ** (spec.b0 // spec.b)


# Expansion at the dominant singularity rho. With x = 1 - u:
#   rho - z = (1/s) (h x)^(s/h) U(x),   psi = (h x)^(-t0/h) V(x)

def _q_series(spec: UrnSpec, n: int) -> List[Fraction]:
    """Q(x) = (1 - (1-x)^h) / (h x), so 1 - (1-x)^h = h x Q(x)."""
    h = spec.h
    return [Fraction(comb(h, k + 1) * (-1) ** k, h) for k in range(n)]


def _u_series(spec: UrnSpec, n: int) -> List[Fraction]:
    q = _q_series(spec, n)
    p = ps.mul(ps.one_minus_x_power(spec.a - 1, n),
               ps.power(q, Fraction(-(spec.a + spec.b), spec.h), n), n)
    return [c * Fraction(spec.s, spec.h * k + spec.s) for k, c in enumerate(p)]


def _v_series(spec: UrnSpec, n: int) -> List[Fraction]:
    q = _q_series(spec, n)
    return ps.mul(ps.one_minus_x_power(spec.a0, n),
                  ps.power(q, Fraction(-spec.t0, spec.h), n), n)


def singular_expansion(spec: UrnSpec, order: int = DEFAULT_ORDER) -> SingularExpansion:
    """Rational a_k of psi around rho, in the variable w = (s (rho - z))^(h/s)."""
    validate(spec)
    _check_order(order)

    n = order
    h = spec.h
    u = _u_series(spec, n)
    v = _v_series(spec, n)

    # Rescale x -> q/h, q = h x. The h^(1/h) factors cancel identically: w carries h^1
    # and the amplitude h^(-t0/h) h^(t0/h) = 1, so only the rationality of a_k is checked.
    u_q = [c / Fraction(h) ** k for k, c in enumerate(u)]
    v_q = [c / Fraction(h) ** k for k, c in enumerate(v)]

    omega = [0] + ps.power(u_q, Fraction(h, spec.s), n)[: n - 1]
    try:
        q_of_w = ps.revert(omega, n)
    except ZeroDivisionError as e:
        raise ReversionFailure(f"cannot revert the local variable at rho: {e}")
    amplitude = ps.mul(v_q, ps.power(u_q, Fraction(spec.t0, spec.s), n), n)
    a_k = ps.compose(amplitude, q_of_w, n)

    for k, c in enumerate(a_k):
        if not isinstance(c, (int, Fraction)):
            raise NormalizationBreach(f"a_{k} = {c!r} is not rational")
    if a_k[0] != 1:
        raise NormalizationBreach(f"a_0 = {a_k[0]} instead of 1")

    return SingularExpansion(
        prefactor_exponent=Fraction(-spec.t0, spec.s),
        puiseux_step=Fraction(h, spec.s),
        a_k=tuple(Fraction(c) for c in a_k),
        balance=spec.s,
    )


def k_series_at_one(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """Taylor coefficients of K(1 + eta) from (1 - u^h) K' = s u^(h-1) K - u^(a-1)."""
    validate(spec)
    _check_order(order)
    h, s, a = spec.h, spec.s, spec.a
    # 1 - (1+eta)^h, s (1+eta)^(h-1), (1+eta)^(a-1)
    lhs = [-comb(h, j) if j > 0 else 0 for j in range(order + 2)]
    mid = [s * comb(h - 1, j) for j in range(order + 1)]
    rhs = [comb(a - 1, j) for j in range(order + 1)]

    k: List[Fraction] = [Fraction(1, s)]
    for n in range(1, order):
        acc = Fraction(-rhs[n])
        for j in range(1, n + 1):
            acc += mid[j] * k[n - j]
        for j in range(2, n + 1):
            acc -= lhs[j] * (n - j + 1) * k[n - j + 1]
        k.append(acc / (-h * n - s))
    return FormalSeries("(u-1)", Fraction(0), Fraction(1), tuple(k))


def k_inverse_series(spec: UrnSpec, order: int = DEFAULT_ORDER) -> FormalSeries:
    """Taylor coefficients at u = 0 of 1/(s K(u)), K(u) = (rho - I(u)) (1 - u^h)^(-s/h)."""
    from urnlab.engines.kernel import rho

    validate(spec)
    _check_order(order)
    with mp.workdps(working_precision()):
        r = rho(spec)
        dense = [mp.mpf(0)] * order
        dense[0] = r
        for e, c in i_series(spec, order).terms():
            if e < order:
                dense[int(e)] -= _mpf(c)
        growth = [mp.mpf(0)] * order
        for j in range(0, (order - 1) // spec.h + 1):
            growth[j * spec.h] = _mpf(rising_binomial(Fraction(spec.s, spec.h), j))
        k_dense = ps.mul(dense, growth, order)
        inv = ps.scale(ps.inverse(k_dense, order), mp.mpf(1) / spec.s)
    return FormalSeries("u", Fraction(0), Fraction(1), tuple(inv))
