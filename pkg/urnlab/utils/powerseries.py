"""Truncated power series as dense coefficient lists.

A series is a list ``[c0, c1, ..., c_{n-1}]`` standing for c0 + c1 x + ... + c_{n-1} x^{n-1}.
Every function takes the number of coefficients to keep, ``n``. Coefficients are
normally ``Fraction`` so everything stays exact; mpmath reals work too (the
k_inverse computation needs them), nothing here ever rounds.
"""

from fractions import Fraction
from typing import List, Sequence, Union

import mpmath as mp

Scalar = Union[int, Fraction, "mp.mpf", "mp.mpc"]
Series = List[Scalar]


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


def _coerce(alpha, like):
    """Bring a rational exponent into the number system of ``like``."""
    alpha = Fraction(alpha)
    if _is_exact(like):
        return alpha
    return mp.mpf(alpha.numerator) / alpha.denominator


def _div(x, d):
    """x / d without letting an int accumulator fall into float division."""
    if _is_exact(x) and _is_exact(d):
        return Fraction(x) / d
    return x / d


def pad(f: Sequence[Scalar], n: int) -> Series:
    """Truncate or zero-extend to exactly n coefficients."""
    out = list(f[:n])
    out.extend([0] * (n - len(out)))
    return out


def add(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Series:
    f, g = pad(f, n), pad(g, n)
    return [x + y for x, y in zip(f, g)]


def sub(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Series:
    f, g = pad(f, n), pad(g, n)
    return [x - y for x, y in zip(f, g)]


def scale(f: Sequence[Scalar], c: Scalar) -> Series:
    return [c * x for x in f]


def mul(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Series:
    """Cauchy product truncated to n terms."""
    f, g = pad(f, n), pad(g, n)
    out: Series = [0] * n
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        for j in range(n - i):
            if g[j] != 0:
                out[i + j] += fi * g[j]
    return out


def inverse(f: Sequence[Scalar], n: int) -> Series:
    """1/f; needs a nonzero constant term."""
    f = pad(f, n)
    if f[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no inverse")
    out: Series = [0] * n
    out[0] = _div(1, f[0])
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            acc += f[j] * out[k - j]
        out[k] = -acc * out[0]
    return out


def power(f: Sequence[Scalar], alpha, n: int) -> Series:
    """f**alpha by the J.C.P. Miller recurrence.

    Fractional exponents need f[0] == 1, integral ones only f[0] != 0.
    """
    f = pad(f, n)
    alpha = Fraction(alpha)
    if f[0] == 0:
        raise ValueError("power of a series needs a nonzero constant term")
    if alpha.denominator != 1 and f[0] != 1:
        raise ValueError("fractional power needs constant term 1")
    a = _coerce(alpha, f[0])
    base = Fraction(f[0]) if _is_exact(f[0]) else f[0]
    out: Series = [0] * n
    out[0] = base ** alpha.numerator if alpha.denominator == 1 else base
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            if f[j] != 0:
                acc += (a * j - (k - j)) * f[j] * out[k - j]
        out[k] = _div(acc, k * base)
    return out


def derivative(f: Sequence[Scalar]) -> Series:
    return [k * f[k] for k in range(1, len(f))]


def integral(f: Sequence[Scalar], n: int) -> Series:
    """Antiderivative vanishing at 0, n terms."""
    out: Series = [0] * n
    for k in range(min(len(f), n - 1)):
        out[k + 1] = _div(f[k], k + 1)
    return out


def log(f: Sequence[Scalar], n: int) -> Series:
    """log f for f[0] == 1."""
    f = pad(f, n)
    if f[0] != 1:
        raise ValueError("log of a series needs constant term 1")
    return integral(mul(derivative(f), inverse(f, n), n), n)


def exp(f: Sequence[Scalar], n: int) -> Series:
    """exp f for f[0] == 0."""
    f = pad(f, n)
    if f[0] != 0:
        raise ValueError("exp of a series needs constant term 0")
    out: Series = [0] * n
    out[0] = 1
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            if f[j] != 0:
                acc += j * f[j] * out[k - j]
        out[k] = _div(acc, k)
    return out


def compose(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Series:
    """f(g(x)) by Horner's scheme; g must vanish at 0."""
    g = pad(g, n)
    if g[0] != 0:
        raise ValueError("inner series of a composition must have zero constant term")
    f = pad(f, n)
    out: Series = [f[-1]] + [0] * (n - 1)
    for c in reversed(f[:-1]):
        out = mul(out, g, n)
        out[0] += c
    return out


def revert(f: Sequence[Scalar], n: int) -> Series:
    """Compositional inverse by Lagrange inversion.

    [x^m] f^{-1} = (1/m) [t^{m-1}] (t / f(t))^m.
    """
    f = pad(f, n + 1)
    if f[0] != 0:
        raise ValueError("reversion needs zero constant term")
    if f[1] == 0:
        raise ZeroDivisionError("reversion needs a nonzero linear coefficient")
    ratio = inverse(f[1:], n)
    out: Series = [0] * n
    acc = [1] + [0] * (n - 1)
    for m in range(1, n):
        acc = mul(acc, ratio, n)
        out[m] = _div(acc[m - 1], m)
    return out


def generalized_binomial(alpha, k: int) -> Fraction:
    """C(alpha, k) for rational alpha."""
    alpha = Fraction(alpha)
    out = Fraction(1)
    for i in range(k):
        out = out * (alpha - i) / (i + 1)
    return out


def one_minus_x_power(alpha, n: int) -> Series:
    """Coefficients of (1 - x)**alpha."""
    return [generalized_binomial(alpha, k) * (-1) ** k for k in range(n)]


def evaluate(f: Sequence[Scalar], x) -> Scalar:
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc
