"""Text forms of exact values: ``"p/q"`` strings and 12-digit decimals."""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

SIG_DIGITS = 12
_CTX = Context(prec=SIG_DIGITS, rounding=ROUND_HALF_EVEN)


def rational_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or a plain decimal literal exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def to_decimal(x) -> Decimal:
    x = Fraction(x)
    return _CTX.divide(Decimal(x.numerator), Decimal(x.denominator))


def decimal_str(x) -> str:
    """12 significant digits, round-half-even, no exponent for |x| >= 1e-6."""
    d = to_decimal(x)
    if d == 0:
        return "0"
    if abs(d) >= Decimal("1e-6"):
        return format(d, "f")
    return format(d, "E")


def exact_pair(x) -> dict:
    return {"exact": rational_str(x), "decimal": float(to_decimal(x))}
