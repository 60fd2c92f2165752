"""Truncated multivariate formal power series with validity tracking.

A PolySeries stores a sparse coefficient map over exponent tuples together
with a per-variable validity degree: coefficients with exponent gamma_i <=
valid_i in every variable are exact/trusted.  A validity entry of None means
the series is exactly known to all degrees in that variable (a genuine
polynomial); a finite entry marks a truncation of infinite data.  Truncation
arithmetic is conservative: sums and products keep the componentwise minimum
validity, a generalized derivative in variable j lowers valid_j by one.

Operations are pure; values are treated as immutable after construction.
Iteration over coefficients is in sorted exponent order so that big-float
summations are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional

from .backends import parse_rational
from .moments import MomentSequence

Exponents = tuple[int, ...]
Validity = tuple[Optional[int], ...]


class DimensionMismatch(ValueError):
    """Operands disagree on the number of variables."""


def total_degree(exponents: Exponents) -> int:
    return sum(exponents)


def add_exponents(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x + y for x, y in zip(a, b))


def min_validity(a: Validity, b: Validity) -> Validity:
    out = []
    for x, y in zip(a, b):
        if x is None:
            out.append(y)
        elif y is None:
            out.append(x)
        else:
            out.append(min(x, y))
    return tuple(out)


def _within(exponents: Exponents, valid: Validity) -> bool:
    return all(v is None or g <= v for g, v in zip(exponents, valid))


class PolySeries:
    """Sparse truncated power series in num_vars variables."""

    __slots__ = ("num_vars", "coeffs", "valid")

    def __init__(self, num_vars: int, coeffs: dict | None = None,
                 valid: Iterable[Optional[int]] | None = None):
        if num_vars < 1:
            raise DimensionMismatch("need at least one variable")
        self.num_vars = num_vars
        if valid is None:
            valid_t: Validity = (None,) * num_vars
        else:
            valid_t = tuple(valid)
            if len(valid_t) != num_vars:
                raise DimensionMismatch(
                    f"validity vector has {len(valid_t)} entries for "
                    f"{num_vars} variables"
                )
        self.valid = valid_t
        stored: dict[Exponents, object] = {}
        if coeffs:
            for exponents, value in coeffs.items():
                exponents = tuple(exponents)
                if len(exponents) != num_vars:
                    raise DimensionMismatch(
                        f"exponent {exponents} has wrong arity for "
                        f"{num_vars} variables"
                    )
                if any(g < 0 for g in exponents):
                    raise ValueError(f"negative exponent in {exponents}")
                if value == 0:
                    continue
                if not _within(exponents, valid_t):
                    continue
                stored[exponents] = value
        self.coeffs = stored

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int, valid=None) -> "PolySeries":
        return cls(num_vars, {}, valid)

    @classmethod
    def constant(cls, num_vars: int, value, valid=None) -> "PolySeries":
        return cls(num_vars, {(0,) * num_vars: value}, valid)

    @classmethod
    def from_monomials(cls, num_vars: int, monomials, valid=None) -> "PolySeries":
        coeffs: dict[Exponents, object] = {}
        for exponents, value in monomials:
            key = tuple(exponents)
            coeffs[key] = coeffs.get(key, 0) + value
        return cls(num_vars, coeffs, valid)

    # -- queries ----------------------------------------------------------

    def coefficient(self, exponents: Exponents):
        return self.coeffs.get(tuple(exponents), 0)

    def support(self) -> list[Exponents]:
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        """True when the series is exactly known to all degrees."""
        return all(v is None for v in self.valid)

    def is_exhausted(self) -> bool:
        """True when no coefficient at all is trusted in some variable."""
        return any(v is not None and v < 0 for v in self.valid)

    def degree(self, axis: int) -> int:
        """Largest stored exponent in the given variable (-1 for zero)."""
        if not self.coeffs:
            return -1
        return max(e[axis] for e in self.coeffs)

    def max_degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(max(e) for e in self.coeffs)

    def __eq__(self, other) -> bool:
        """Coefficient-wise equality on the common valid region."""
        if not isinstance(other, PolySeries):
            return NotImplemented
        if self.num_vars != other.num_vars:
            return False
        region = min_validity(self.valid, other.valid)
        for key in set(self.coeffs) | set(other.coeffs):
            if _within(key, region):
                if self.coeffs.get(key, 0) != other.coeffs.get(key, 0):
                    return False
        return True

    __hash__ = None  # mutable-dict payload and region-based equality

    def __repr__(self) -> str:
        terms = ", ".join(f"{e}:{v}" for e, v in sorted(self.coeffs.items())[:6])
        more = "..." if len(self.coeffs) > 6 else ""
        return f"PolySeries({self.num_vars}, {{{terms}{more}}}, valid={self.valid})"

    # -- arithmetic ---------------------------------------------------------

    def _check_same_vars(self, other: "PolySeries"):
        if self.num_vars != other.num_vars:
            raise DimensionMismatch(
                f"{self.num_vars} vs {other.num_vars} variables"
            )

    def add(self, other: "PolySeries") -> "PolySeries":
        self._check_same_vars(other)
        out = dict(self.coeffs)
        for key, value in other.coeffs.items():
            out[key] = out.get(key, 0) + value
        return PolySeries(self.num_vars, out, min_validity(self.valid, other.valid))

    def neg(self) -> "PolySeries":
        return PolySeries(
            self.num_vars, {k: -v for k, v in self.coeffs.items()}, self.valid
        )

    def sub(self, other: "PolySeries") -> "PolySeries":
        return self.add(other.neg())

    def scale(self, factor) -> "PolySeries":
        if factor == 0:
            return PolySeries.zero(self.num_vars, self.valid)
        return PolySeries(
            self.num_vars,
            {k: v * factor for k, v in self.coeffs.items()},
            self.valid,
        )

    def multiply(self, other: "PolySeries") -> "PolySeries":
        """Cauchy product truncated to the componentwise minimum validity."""
        self._check_same_vars(other)
        valid = min_validity(self.valid, other.valid)
        out: dict[Exponents, object] = {}
        for ea, va in sorted(self.coeffs.items()):
            for eb, vb in sorted(other.coeffs.items()):
                key = add_exponents(ea, eb)
                if not _within(key, valid):
                    continue
                if key in out:
                    out[key] = out[key] + va * vb
                else:
                    out[key] = va * vb
        return PolySeries(self.num_vars, out, valid)

    __add__ = add
    __sub__ = sub
    __mul__ = multiply
    __neg__ = neg

    # -- analysis -----------------------------------------------------------

    def moment_derive(self, axis: int, seq: MomentSequence) -> "PolySeries":
        """Generalized derivative in one variable.

        The output coefficient at gamma is f(gamma + e_axis) times
        m(gamma_axis + 1)/m(gamma_axis); for m(n) = n! this is the classical
        partial derivative.  Validity in the axis drops by one.
        """
        if not 0 <= axis < self.num_vars:
            raise DimensionMismatch(f"axis {axis} out of range")
        out: dict[Exponents, object] = {}
        for exponents, value in self.coeffs.items():
            n = exponents[axis]
            if n == 0:
                continue
            key = exponents[:axis] + (n - 1,) + exponents[axis + 1:]
            out[key] = value * seq.ratio(n - 1)
        valid = list(self.valid)
        if valid[axis] is not None:
            valid[axis] -= 1
        return PolySeries(self.num_vars, out, valid)

    def moment_derive_multi(self, orders: Exponents,
                            seqs: Iterable[MomentSequence]) -> "PolySeries":
        """Apply moment_derive orders[i] times along each variable i."""
        out = self
        for axis, (count, seq) in enumerate(zip(orders, seqs)):
            for _ in range(count):
                out = out.moment_derive(axis, seq)
        return out

    def ell1_norm(self, r):
        """Sum of |f_gamma|·r^|gamma| over stored coefficients.

        This is the alpha = 0 member of the modified Nagumo family.
        """
        if not r > 0:
            raise ValueError("radius r must be positive")
        total = None
        for exponents in self.support():
            value = self.coeffs[exponents]
            term = abs(value) * r ** total_degree(exponents)
            total = term if total is None else total + term
        if total is None:
            return r * 0  # zero in the scalar domain of r
        return total

    def evaluate(self, point) -> complex:
        """Evaluate at a point (complex allowed) in double precision."""
        point = tuple(point)
        if len(point) != self.num_vars:
            raise DimensionMismatch("point arity mismatch")
        total = 0j
        for exponents in self.support():
            term = complex(self.coeffs[exponents])
            for z, g in zip(point, exponents):
                if g:
                    term *= complex(z) ** g
            total += term
        return total

    def map_coefficients(self, fn) -> "PolySeries":
        return PolySeries(
            self.num_vars, {k: fn(v) for k, v in self.coeffs.items()}, self.valid
        )


# -- builtin generators for infinite initial data ---------------------------


def geometric_series(num_vars: int, ratio, caps: Iterable[int]) -> PolySeries:
    """Coefficients ratio^|gamma| up to the caps: the product of 1/(1 - c·z_i).

    For one variable this is the geometric series 1/(1 - c·z).
    """
    caps = tuple(caps)
    c = parse_rational(ratio) if isinstance(ratio, (str, int)) else ratio
    coeffs: dict[Exponents, object] = {}
    for exponents in _box(caps):
        coeffs[exponents] = c ** total_degree(exponents)
    return PolySeries(num_vars, coeffs, caps)


def exponential_series(num_vars: int, rate, caps: Iterable[int]) -> PolySeries:
    """Coefficients rate^|gamma| / prod(gamma_i!): exp(c·(z_1+...+z_N))."""
    caps = tuple(caps)
    c = parse_rational(rate) if isinstance(rate, (str, int)) else rate
    coeffs: dict[Exponents, object] = {}
    for exponents in _box(caps):
        denom = 1
        for g in exponents:
            denom *= math.factorial(g)
        coeffs[exponents] = c ** total_degree(exponents) * Fraction(1, denom)
    return PolySeries(num_vars, coeffs, caps)


def _box(caps: Exponents):
    """All exponent tuples within the per-variable caps."""
    if len(caps) == 1:
        for g in range(caps[0] + 1):
            yield (g,)
        return
    head = caps[0]
    for rest in _box(caps[1:]):
        for g in range(head + 1):
            yield (g,) + rest


# -- time-indexed stacks -----------------------------------------------------


class TimeSeries:
    """A truncated power series in t with PolySeries coefficients.

    tail_exact marks a series whose coefficients beyond the stored range are
    exactly zero (a polynomial in t), as opposed to a truncation of unknown
    higher-order data.
    """

    __slots__ = ("entries", "tail_exact")

    def __init__(self, entries: Iterable[PolySeries], tail_exact: bool = False):
        entries = tuple(entries)
        if not entries:
            raise ValueError("a TimeSeries needs at least the t^0 entry")
        nv = entries[0].num_vars
        for e in entries:
            if e.num_vars != nv:
                raise DimensionMismatch("entries disagree on variable count")
        self.entries = entries
        self.tail_exact = tail_exact

    @property
    def t_order(self) -> int:
        return len(self.entries) - 1

    @property
    def num_vars(self) -> int:
        return self.entries[0].num_vars

    @classmethod
    def zero(cls, num_vars: int, t_order: int = 0, tail_exact: bool = True):
        return cls([PolySeries.zero(num_vars)] * (t_order + 1), tail_exact)

    def coefficient(self, n: int) -> PolySeries:
        """The t^n coefficient; exact zero beyond the range when tail_exact."""
        if n < 0:
            raise IndexError("negative t index")
        if n <= self.t_order:
            return self.entries[n]
        if self.tail_exact:
            return PolySeries.zero(self.num_vars)
        raise IndexError(
            f"t-coefficient {n} beyond truncation order {self.t_order}"
        )

    def ord_t(self) -> int:
        """Smallest n with a nonzero t^n coefficient."""
        for n, entry in enumerate(self.entries):
            if not entry.is_zero():
                return n
        raise ValueError(
            "series is identically zero up to truncation; term must be dropped"
        )

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def add(self, other: "TimeSeries") -> "TimeSeries":
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("variable count mismatch")
        hi = max(self.t_order, other.t_order)
        if not (self.tail_exact and other.tail_exact):
            hi = min(
                self.t_order if not self.tail_exact else hi,
                other.t_order if not other.tail_exact else hi,
            )
        out = [
            self.coefficient(n).add(other.coefficient(n)) for n in range(hi + 1)
        ]
        return TimeSeries(out, self.tail_exact and other.tail_exact)

    def scale(self, factor) -> "TimeSeries":
        return TimeSeries([e.scale(factor) for e in self.entries], self.tail_exact)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        hi = min(self.t_order, other.t_order)
        if self.tail_exact and other.tail_exact:
            hi = max(self.t_order, other.t_order)
        return all(
            self.coefficient(n) == other.coefficient(n) for n in range(hi + 1)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"TimeSeries(t_order={self.t_order}, num_vars={self.num_vars}, "
            f"tail_exact={self.tail_exact})"
        )
