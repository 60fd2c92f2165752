"""Scalar backends: exact rational arithmetic or arbitrary-precision binary floats.

Every problem is solved over a single scalar domain.  The rational backend
works with ``fractions.Fraction`` and is exact; the big-float backend wraps a
private mpmath context with a configurable mantissa (default 256 bits), so
precision does not depend on the global mpmath state.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import mpmath

Scalar = Union[Fraction, object]  # Fraction or an mpf from some mpmath context


class BackendError(ValueError):
    """The requested value cannot be represented in the active backend."""


class PrecisionError(ArithmeticError):
    """A big-float intermediate became non-finite; increase precision_bits."""


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int, Fraction, or a string like "3/4".

    Decimal strings ("0.5") are accepted and converted exactly.
    """
    if isinstance(value, bool):
        raise BackendError(f"not a rational value: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BackendError(f"not a rational value: {value!r}") from exc
    raise BackendError(f"not a rational value: {value!r}")


def is_mpf(value) -> bool:
    """True for an mpf from any mpmath context (contexts have distinct types)."""
    return hasattr(value, "_mpf_")


def scalar_to_fraction(value) -> Fraction:
    """Exact rational value of a scalar; mpf values are binary rationals."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if is_mpf(value):
        sign, man, exp, _ = value._mpf_
        if man == 0:
            if exp != 0:
                raise PrecisionError("cannot serialize a non-finite value")
            return Fraction(0)
        frac = Fraction(man) * (Fraction(2) ** exp)
        return -frac if sign else frac
    raise BackendError(f"cannot convert {value!r} to an exact rational")


def log_scalar(value) -> float:
    """Double-precision natural log of a positive scalar.

    Handles Fractions whose numerator/denominator overflow a double and mpf
    values with huge exponents.
    """
    if isinstance(value, Fraction):
        if value <= 0:
            raise ValueError("log of non-positive value")
        return math.log(value.numerator) - math.log(value.denominator)
    if isinstance(value, int):
        return math.log(value)
    if is_mpf(value):
        return float(mpmath.log(value))
    return math.log(value)


def exact_pow(base: Fraction, exponent: Fraction) -> Fraction:
    """base**exponent for integer exponents only; exact."""
    if exponent.denominator != 1:
        raise BackendError(
            f"exponent {exponent} is not an integer; exact power unavailable"
        )
    return base ** int(exponent)


class RationalBackend:
    """Exact arithmetic over ``fractions.Fraction``."""

    name = "rational"
    exact = True

    def scalar(self, value) -> Fraction:
        return parse_rational(value)

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def power(self, base: Fraction, exponent) -> Fraction:
        return exact_pow(Fraction(base), parse_rational(exponent))

    def gamma(self, x) -> Fraction:
        x = parse_rational(x)
        if x.denominator != 1 or x < 1:
            raise BackendError(
                f"gamma({x}) is not rational; use the bigfloat backend"
            )
        return Fraction(math.factorial(int(x) - 1))

    def abs(self, value: Fraction) -> Fraction:
        return abs(value)

    def to_float(self, value) -> float:
        return float(value)

    def is_zero(self, value) -> bool:
        return value == 0

    def check_finite(self, value: Fraction) -> Fraction:
        return value

    def format(self, value: Fraction) -> str:
        return str(Fraction(value))

    @property
    def residual_tolerance(self) -> Fraction:
        return Fraction(0)

    def describe(self) -> dict:
        return {"backend": self.name}

    def __repr__(self) -> str:
        return "RationalBackend()"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalBackend)

    def __hash__(self) -> int:
        return hash(self.name)


class BigFloatBackend:
    """Arbitrary-precision binary floats via a private mpmath context."""

    name = "bigfloat"
    exact = False

    def __init__(self, precision_bits: int = 256):
        if precision_bits < 24:
            raise BackendError("precision_bits must be at least 24")
        self.precision_bits = int(precision_bits)
        self.ctx = mpmath.mp.clone()
        self.ctx.prec = self.precision_bits

    def scalar(self, value):
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / self.ctx.mpf(value.denominator)
        return self.ctx.mpf(value)

    def zero(self):
        return self.ctx.mpf(0)

    def one(self):
        return self.ctx.mpf(1)

    def power(self, base, exponent):
        if isinstance(exponent, Fraction) and exponent.denominator == 1:
            exponent = int(exponent)
        else:
            exponent = self.scalar(exponent)
        return self.check_finite(self.ctx.power(self.scalar(base), exponent))

    def gamma(self, x):
        return self.check_finite(self.ctx.gamma(self.scalar(x)))

    def abs(self, value):
        return self.ctx.fabs(value)

    def to_float(self, value) -> float:
        return float(value)

    def is_zero(self, value) -> bool:
        return value == 0

    def check_finite(self, value):
        if not self.ctx.isfinite(value):
            raise PrecisionError(
                f"non-finite intermediate at {self.precision_bits} bits; "
                "increase precision_bits"
            )
        return value

    def format(self, value) -> str:
        digits = max(int(self.precision_bits * 0.30103) + 2, 17)
        return mpmath.nstr(value, digits)

    @property
    def residual_tolerance(self):
        return self.ctx.mpf(2) ** (-(self.precision_bits // 2))

    def describe(self) -> dict:
        return {"backend": self.name, "precision_bits": self.precision_bits}

    def __repr__(self) -> str:
        return f"BigFloatBackend(precision_bits={self.precision_bits})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BigFloatBackend)
            and other.precision_bits == self.precision_bits
        )

    def __hash__(self) -> int:
        return hash((self.name, self.precision_bits))


Backend = Union[RationalBackend, BigFloatBackend]


def make_backend(name: str, precision_bits: int = 256) -> Backend:
    if name == "rational":
        return RationalBackend()
    if name == "bigfloat":
        return BigFloatBackend(precision_bits)
    raise BackendError(f"unknown backend {name!r} (expected rational|bigfloat)")
