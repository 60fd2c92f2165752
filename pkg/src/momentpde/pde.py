"""Moment PDE operators and Cauchy problems.

An operator P = D_t^M + sum over a finite term set of a_{j,alpha}(t,z) *
D_t^j * D_z^alpha, where every derivative is a generalized (moment)
derivative driven by its own sequence.  The standing assumptions checked by
validate() are: all z-orders at least 1, a finite term set, and the t-order
of vanishing of each coefficient at least max(0, j - M + 1), which makes the
shifted valuation q = ord_t - j + M at least 1 for every term and keeps the
coefficient recurrence well-founded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .backends import Backend
from .moments import MomentSequence
from .series import (
    DimensionMismatch,
    Exponents,
    PolySeries,
    TimeSeries,
)


class ValidationError(ValueError):
    """Raised when an operation requires a validated problem and checks fail."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        super().__init__(f"problem validation failed: {failed}")


@dataclass(frozen=True)
class OperatorTerm:
    """One term a_{j,alpha}(t,z) * D_t^j * D_z^alpha."""

    t_derivative: int            # j
    z_derivatives: Exponents     # alpha
    coeff: TimeSeries            # a_{j,alpha}
    ord_t: int = field(init=False)

    def __post_init__(self):
        if self.t_derivative < 0:
            raise ValueError("t-derivative order must be >= 0")
        if any(a < 0 for a in self.z_derivatives):
            raise ValueError("z-derivative orders must be >= 0")
        object.__setattr__(self, "z_derivatives", tuple(self.z_derivatives))
        # Valuation is computed from the stored data, never declared.
        object.__setattr__(self, "ord_t", self.coeff.ord_t())

    def q(self, principal_order: int) -> int:
        """Shifted valuation ord_t - j + M, the first recurrence index fed."""
        return self.ord_t - self.t_derivative + principal_order

    def key(self) -> tuple:
        return (self.t_derivative, self.z_derivatives)


class MomentPDE:
    """The operator D_t^M + sum of coefficient terms."""

    def __init__(self, principal_order: int, m0: MomentSequence,
                 m: list[MomentSequence], terms: list[OperatorTerm]):
        if principal_order < 1:
            raise ValueError("principal t-order M must be >= 1")
        self.M = principal_order
        self.m0 = m0
        self.m = tuple(m)
        self.terms = tuple(terms)
        if not self.m:
            raise DimensionMismatch("need at least one z variable sequence")

    @property
    def num_vars(self) -> int:
        return len(self.m)

    @property
    def s0(self) -> Fraction:
        return self.m0.order

    @property
    def s(self) -> tuple[Fraction, ...]:
        return tuple(seq.order for seq in self.m)

    def q_table(self) -> dict[tuple, int]:
        return {term.key(): term.q(self.M) for term in self.terms}

    # -- operator application -------------------------------------------

    def t_shift_factor(self, n: int, j: int):
        """m0(n+j)/m0(n): the weight of coefficient n of D_t^j."""
        return self.m0.value(n + j) / self.m0.value(n)

    def derive_z(self, poly: PolySeries, orders: Exponents) -> PolySeries:
        return poly.moment_derive_multi(orders, self.m)

    def apply(self, u: TimeSeries) -> TimeSeries:
        """P applied to u, truncated to t-order u.t_order - M.

        Coefficient n of D_t^j u is u_{n+j} * m0(n+j)/m0(n); each term then
        convolves its coefficient series against the shifted, z-derived
        stack.
        """
        if u.t_order < self.M:
            raise ValueError(
                f"need t-order >= {self.M}, got {u.t_order}"
            )
        if u.num_vars != self.num_vars:
            raise DimensionMismatch("u has the wrong number of variables")
        out_order = u.t_order - self.M
        derived: dict[tuple[int, Exponents], PolySeries] = {}

        def dz(i: int, alpha: Exponents) -> PolySeries:
            key = (i, alpha)
            if key not in derived:
                derived[key] = self.derive_z(u.coefficient(i), alpha)
            return derived[key]

        entries = []
        for n in range(out_order + 1):
            acc = u.coefficient(n + self.M).scale(self.t_shift_factor(n, self.M))
            for term in self.terms:
                j = term.t_derivative
                alpha = term.z_derivatives
                for k in range(term.ord_t, n + 1):
                    a_k = term.coeff.coefficient(k)
                    if a_k.is_zero():
                        continue
                    idx = n - k + j
                    if idx > u.t_order:
                        raise ValueError(
                            "u is truncated too low for this term; "
                            f"needed t-coefficient {idx}"
                        )
                    part = a_k.multiply(dz(idx, alpha))
                    acc = acc.add(part.scale(self.t_shift_factor(n - k, j)))
            entries.append(acc)
        return TimeSeries(entries, tail_exact=False)


@dataclass(frozen=True)
class EstimationConfig:
    """Defaults for the order-estimation stage, usually from the problem file."""

    r: Optional[Fraction] = None
    rho: Optional[Fraction] = None
    window: Optional[tuple[int, int]] = None
    tolerance: Optional[Fraction] = None
    mode: Optional[str] = None


class CauchyProblem:
    """A moment PDE with right-hand side, initial data, and truncation."""

    def __init__(self, pde: MomentPDE, rhs: TimeSeries,
                 initial: list[PolySeries], t_order: int,
                 z_caps: Exponents, backend: Backend,
                 estimation: EstimationConfig | None = None):
        self.pde = pde
        self.rhs = rhs
        self.initial = tuple(initial)
        self.t_order = t_order
        self.z_caps = tuple(z_caps)
        self.backend = backend
        self.estimation = estimation or EstimationConfig()

    @property
    def num_vars(self) -> int:
        return self.pde.num_vars


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    message: str


@dataclass
class ValidationReport:
    checks: list[ValidationCheck]
    warnings: list[str]

    @property
    def passed(self) -> bool:
        """All checks pass: the problem qualifies for solving and estimates."""
        return all(c.passed for c in self.checks)

    @property
    def analysis_ok(self) -> bool:
        """Structure is sound: polygon analysis is meaningful even if the
        z-order or valuation assumptions fail."""
        return all(c.passed for c in self.checks if c.name.startswith("structure"))

    def failures(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "analysis_ok": self.analysis_ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "message": c.message}
                for c in self.checks
            ],
            "warnings": list(self.warnings),
        }


def validate(problem: CauchyProblem) -> ValidationReport:
    """Check the standing assumptions and the structural consistency."""
    checks: list[ValidationCheck] = []
    warnings: list[str] = []
    pde = problem.pde
    nv = pde.num_vars

    def check(name: str, passed: bool, message: str):
        checks.append(ValidationCheck(name, bool(passed), message))

    # structure: dimensions and truncation
    dims_ok = problem.rhs.num_vars == nv and all(
        phi.num_vars == nv for phi in problem.initial
    ) and all(
        len(t.z_derivatives) == nv and t.coeff.num_vars == nv
        for t in pde.terms
    ) and len(problem.z_caps) == nv
    check("structure.dimensions", dims_ok,
          "all series share the problem's variable count"
          if dims_ok else "variable-count mismatch between problem parts")
    check("structure.initial_count", len(problem.initial) == pde.M,
          f"{pde.M} initial polynomials expected, "
          f"got {len(problem.initial)}")
    check("structure.truncation", problem.t_order >= pde.M
          and all(c >= 0 for c in problem.z_caps),
          f"t_order={problem.t_order}, z caps={problem.z_caps}")

    # (a) z-orders at least 1
    bad_s = [str(s) for s in pde.s if s < 1]
    check("assumption.z_orders", not bad_s,
          "all z-sequence orders are >= 1" if not bad_s
          else f"z-sequence orders below 1: {bad_s} (analysis-only mode)")

    # (c) coefficient valuations, and positivity of the shifted valuation q
    val_msgs = []
    q_msgs = []
    for term in pde.terms:
        j = term.t_derivative
        need = max(0, j - pde.M + 1)
        if term.ord_t < need:
            val_msgs.append(
                f"term (j={j}, alpha={term.z_derivatives}): "
                f"ord_t={term.ord_t} < {need}"
            )
        if term.q(pde.M) < 1:
            q_msgs.append(f"term (j={j}, alpha={term.z_derivatives})")
    check("assumption.valuations", not val_msgs,
          "every ord_t(a) >= max(0, j - M + 1)" if not val_msgs
          else "; ".join(val_msgs))
    check("assumption.q_positive", not q_msgs,
          "every q = ord_t - j + M is >= 1" if not q_msgs
          else "q < 1 for: " + "; ".join(q_msgs))

    # backend feasibility
    seqs = [pde.m0, *pde.m]
    infeasible = [s.kind for s in seqs if not s.feasible_in_backend()]
    check("backend.feasible", not infeasible,
          "all sequences are representable in the chosen backend"
          if not infeasible else
          f"sequences {infeasible} need the bigfloat backend")

    # coefficient and rhs truncations must reach the recurrence's needs
    trunc_msgs = []
    for term in pde.terms:
        if term.coeff.tail_exact:
            continue
        need = problem.t_order - pde.M + term.t_derivative
        if term.coeff.t_order < need:
            trunc_msgs.append(
                f"term (j={term.t_derivative}, alpha={term.z_derivatives}) "
                f"coefficient truncated at {term.coeff.t_order} < {need}"
            )
    if not problem.rhs.tail_exact and problem.rhs.t_order < problem.t_order - pde.M:
        trunc_msgs.append(
            f"rhs truncated at {problem.rhs.t_order} < "
            f"{problem.t_order - pde.M}"
        )
    check("structure.coefficient_truncation", not trunc_msgs,
          "coefficient data reaches the requested t-order"
          if not trunc_msgs else "; ".join(trunc_msgs))

    if pde.s0 == 0:
        warnings.append(
            "s0 = 0: the polygon definition asks for positive orders; "
            "accepted here (needed for q-difference operators), slopes "
            "involving the t-order then carry no s0 weight"
        )

    return ValidationReport(checks, warnings)
