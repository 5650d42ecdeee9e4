"""Number formatting for reports and exported files."""

from fractions import Fraction
from typing import Union

import mpmath as mp

SIGNIFICANT_DIGITS = 12

Number = Union[int, float, Fraction, complex, "mp.mpf", "mp.mpc"]


def fmt_rational(value: Union[int, Fraction]) -> str:
    """Exact rational as "p/q" (integers without denominator)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fmt_real(value, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Real number to a fixed count of significant digits."""
    if isinstance(value, (mp.mpf, mp.mpc)):
        return mp.nstr(value, digits)
    return f"{float(value):.{digits}g}"


def fmt_complex(value, digits: int = SIGNIFICANT_DIGITS) -> str:
    z = complex(value)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.{digits}g} {sign} {abs(z.imag):.{digits}g}i"


def fmt_number(value, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Pick the right formatter for whatever the engines hand back."""
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return fmt_rational(value)
    if isinstance(value, (complex, mp.mpc)):
        return fmt_complex(value, digits)
    return fmt_real(value, digits)
