"""Gevrey-type moment sequences.

A moment sequence here is a positive sequence m(n) with m(0) = 1 and a
declared order s, meaning aⁿ·n!^s ≤ m(n) ≤ Aⁿ·n!^s for some constants
a, A > 0.  The regular variant additionally sandwiches the consecutive
ratio m(n+1)/m(n) between a·(n+1)^s and A·(n+1)^s.  These sequences drive
both the generalized derivatives (factorials give the classical one,
Γ(1+sn) the Caputo-type fractional one, [n]_q! the q-difference one) and
the growth bookkeeping of the solver.

Sequences are immutable after construction; value/ratio memoization is
lock-protected so concurrent reads are safe.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from .backends import (
    Backend,
    BackendError,
    RationalBackend,
    exact_pow,
    log_scalar,
    parse_rational,
)


class SequenceError(ValueError):
    """Invalid sequence parameters or out-of-range evaluation."""


def _order_value(order) -> Fraction:
    order = parse_rational(order)
    if order < 0:
        raise SequenceError(f"sequence order must be >= 0, got {order}")
    return order


class MomentSequence:
    """Base class; concrete kinds implement _compute_value and _compute_ratio."""

    kind = "abstract"

    def __init__(self, order: Fraction, backend: Backend | None):
        self.order = _order_value(order)
        if backend is None:
            if not self.is_rational_exact():
                raise BackendError(
                    f"{self.kind} sequence is not rational-valued; "
                    "pass a BigFloatBackend"
                )
            backend = RationalBackend()
        self.backend = backend
        self._values: list = []
        self._ratios: dict[int, object] = {}
        self._lock = threading.RLock()

    # -- kind-specific hooks ------------------------------------------------

    def is_rational_exact(self) -> bool:
        raise NotImplementedError

    def _compute_value(self, n: int):
        raise NotImplementedError

    def _compute_ratio(self, n: int):
        return self.value(n + 1) / self.value(n)

    def spec(self) -> dict:
        """JSON-ready description (the problem-file sub-schema)."""
        raise NotImplementedError

    # -- public surface -----------------------------------------------------

    def feasible_in_backend(self) -> bool:
        return self.backend.exact is False or self.is_rational_exact()

    def value(self, n: int):
        """m(n).  Memoized; m(0) = 1 by construction."""
        if n < 0:
            raise SequenceError(f"sequence index must be >= 0, got {n}")
        if not self.feasible_in_backend():
            raise BackendError(
                f"{self.kind} sequence is not rational-valued; "
                "solve with the bigfloat backend"
            )
        with self._lock:
            while len(self._values) <= n:
                k = len(self._values)
                v = self.backend.one() if k == 0 else self._compute_value(k)
                if hasattr(self.backend, "check_finite"):
                    v = self.backend.check_finite(v)
                if not v > 0:
                    raise SequenceError(f"{self.kind}: m({k}) = {v} is not positive")
                self._values.append(v)
            return self._values[n]

    def ratio(self, n: int):
        """m(n+1)/m(n).  Memoized; consistent with value() by construction."""
        if n < 0:
            raise SequenceError(f"sequence index must be >= 0, got {n}")
        with self._lock:
            cached = self._ratios.get(n)
        if cached is not None:
            return cached
        r = self._compute_ratio(n)
        with self._lock:
            self._ratios[n] = r
        return r

    def regularity_constants(self, n_max: int):
        """Empirical (c, C): extremes of ratio(n)/(n+1)^s over 0 <= n <= n_max.

        C is the constant the derivative-bound inequality consumes.
        """
        if n_max < 1:
            raise SequenceError("n_max must be >= 1")
        lo = hi = None
        for n in range(n_max + 1):
            q = self.ratio(n) / self._power_of_index(n + 1)
            lo = q if lo is None or q < lo else lo
            hi = q if hi is None or q > hi else hi
        return lo, hi

    def gevrey_constants(self, n_max: int) -> tuple[float, float]:
        """Empirical (a, A) with aⁿ·n!^s ≤ m(n) ≤ Aⁿ·n!^s on 1 <= n <= n_max.

        Reported as floats with a one-ulp-scale safety margin so the bound
        re-checks cleanly in floating point.
        """
        if n_max < 1:
            raise SequenceError("n_max must be >= 1")
        s = float(self.order)
        a = A = None
        for n in range(1, n_max + 1):
            # log of (m(n)/n!^s)^(1/n)
            root = math.exp((log_scalar(self.value(n)) - s * math.lgamma(n + 1)) / n)
            a = root if a is None or root < a else a
            A = root if A is None or root > A else A
        return a * (1 - 1e-12), A * (1 + 1e-12)

    def _power_of_index(self, k: int):
        """(k)^s in the backend's scalar domain."""
        if self.backend.exact:
            return exact_pow(Fraction(k), self.order)
        return self.backend.power(k, self.order)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec()})"


class FactorialPower(MomentSequence):
    """m(n) = n!^s."""

    kind = "factorial_power"

    def __init__(self, s, backend: Backend | None = None):
        self.s = _order_value(s)
        super().__init__(self.s, backend)

    def is_rational_exact(self) -> bool:
        return self.s.denominator == 1

    def _compute_value(self, n: int):
        fact = math.factorial(n)
        if self.backend.exact:
            return exact_pow(Fraction(fact), self.s)
        return self.backend.power(fact, self.s)

    def _compute_ratio(self, n: int):
        if self.backend.exact:
            return exact_pow(Fraction(n + 1), self.s)
        return self.backend.power(n + 1, self.s)

    def spec(self) -> dict:
        return {"kind": self.kind, "s": str(self.s)}


class GammaSequence(MomentSequence):
    """m(n) = Γ(1 + s·n); for integer s this is (s·n)! exactly."""

    kind = "gamma"

    def __init__(self, s, backend: Backend | None = None):
        self.s = _order_value(s)
        super().__init__(self.s, backend)

    def is_rational_exact(self) -> bool:
        return self.s.denominator == 1

    def _compute_value(self, n: int):
        if self.backend.exact:
            return Fraction(math.factorial(int(self.s) * n))
        return self.backend.gamma(1 + self.s * n)

    def _compute_ratio(self, n: int):
        if self.backend.exact:
            step = int(self.s)
            out = Fraction(1)
            for k in range(step * n + 1, step * (n + 1) + 1):
                out *= k
            return out
        return self.value(n + 1) / self.value(n)

    def spec(self) -> dict:
        return {"kind": self.kind, "s": str(self.s)}


class QFactorial(MomentSequence):
    """m(n) = [n]_q! with [k]_q = (1 - q^k)/(1 - q), 0 < q < 1.  Order 0."""

    kind = "q_factorial"

    def __init__(self, q, backend: Backend | None = None):
        self.q = parse_rational(q)
        if not 0 < self.q < 1:
            raise SequenceError(f"q must lie in (0,1), got {self.q}")
        super().__init__(Fraction(0), backend)

    def is_rational_exact(self) -> bool:
        return True

    def bracket(self, k: int) -> Fraction:
        """[k]_q = 1 + q + ... + q^(k-1)."""
        b = (1 - self.q ** k) / (1 - self.q)
        return b if self.backend.exact else self.backend.scalar(b)

    def _compute_value(self, n: int):
        return self.value(n - 1) * self.bracket(n)

    def _compute_ratio(self, n: int):
        return self.bracket(n + 1)

    def spec(self) -> dict:
        return {"kind": self.kind, "q": str(self.q)}


class ProductSequence(MomentSequence):
    """Pointwise product; orders add."""

    kind = "product"

    def __init__(self, lhs: MomentSequence, rhs: MomentSequence,
                 backend: Backend | None = None):
        if backend is None:
            backend = lhs.backend
        if lhs.backend != backend or rhs.backend != backend:
            raise SequenceError("product factors must share one backend")
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(lhs.order + rhs.order, backend)

    def is_rational_exact(self) -> bool:
        return self.lhs.is_rational_exact() and self.rhs.is_rational_exact()

    def _compute_value(self, n: int):
        return self.lhs.value(n) * self.rhs.value(n)

    def _compute_ratio(self, n: int):
        return self.lhs.ratio(n) * self.rhs.ratio(n)

    def spec(self) -> dict:
        return {"kind": self.kind, "factors": [self.lhs.spec(), self.rhs.spec()]}


class QuotientSequence(MomentSequence):
    """Pointwise quotient; orders subtract (result must stay >= 0)."""

    kind = "quotient"

    def __init__(self, num: MomentSequence, den: MomentSequence,
                 backend: Backend | None = None):
        if backend is None:
            backend = num.backend
        if num.backend != backend or den.backend != backend:
            raise SequenceError("quotient parts must share one backend")
        if num.order < den.order:
            raise SequenceError(
                f"quotient order {num.order}-{den.order} would be negative"
            )
        self.num = num
        self.den = den
        super().__init__(num.order - den.order, backend)

    def is_rational_exact(self) -> bool:
        return self.num.is_rational_exact() and self.den.is_rational_exact()

    def _compute_value(self, n: int):
        return self.num.value(n) / self.den.value(n)

    def _compute_ratio(self, n: int):
        return self.num.ratio(n) / self.den.ratio(n)

    def spec(self) -> dict:
        return {
            "kind": self.kind,
            "numerator": self.num.spec(),
            "denominator": self.den.spec(),
        }


class TableSequence(MomentSequence):
    """Finite table of values with a declared order.

    Meant for experimentation; excluded from theorem-level claims.
    """

    kind = "table"

    def __init__(self, values, order, backend: Backend | None = None):
        if not values:
            raise SequenceError("table must not be empty")
        self._raw = [parse_rational(v) for v in values]
        if self._raw[0] != 1:
            raise SequenceError("table must start with m(0) = 1")
        if any(v <= 0 for v in self._raw):
            raise SequenceError("table values must be positive")
        super().__init__(_order_value(order), backend)

    def is_rational_exact(self) -> bool:
        return True

    def _compute_value(self, n: int):
        if n >= len(self._raw):
            raise SequenceError(
                f"table holds {len(self._raw)} values; m({n}) is out of range"
            )
        v = self._raw[n]
        return v if self.backend.exact else self.backend.scalar(v)

    def _compute_ratio(self, n: int):
        return self.value(n + 1) / self.value(n)

    def spec(self) -> dict:
        return {
            "kind": self.kind,
            "values": [str(v) for v in self._raw],
            "order": str(self.order),
        }


def sequence_from_spec(spec: dict, backend: Backend) -> MomentSequence:
    """Build a sequence from its JSON sub-schema."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SequenceError(f"sequence spec must be an object with a kind: {spec!r}")
    kind = spec["kind"]
    if kind == "factorial_power":
        return FactorialPower(spec["s"], backend)
    if kind == "gamma":
        return GammaSequence(spec["s"], backend)
    if kind == "q_factorial":
        return QFactorial(spec["q"], backend)
    if kind == "product":
        lhs, rhs = spec["factors"]
        return ProductSequence(
            sequence_from_spec(lhs, backend), sequence_from_spec(rhs, backend),
            backend,
        )
    if kind == "quotient":
        return QuotientSequence(
            sequence_from_spec(spec["numerator"], backend),
            sequence_from_spec(spec["denominator"], backend),
            backend,
        )
    if kind == "table":
        return TableSequence(spec["values"], spec.get("order", 0), backend)
    raise SequenceError(f"unknown sequence kind {kind!r}")
