"""Operator terms, validation, and operator application."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from momentpde import (
    BigFloatBackend,
    CauchyProblem,
    FactorialPower,
    GammaSequence,
    MomentPDE,
    OperatorTerm,
    PolySeries,
    RationalBackend,
    TimeSeries,
    validate,
)

F = Fraction


def constant_coeff(value, num_vars=1) -> TimeSeries:
    return TimeSeries(
        [PolySeries.constant(num_vars, F(value))], tail_exact=True
    )


def heat_pde() -> MomentPDE:
    term = OperatorTerm(0, (2,), constant_coeff(-1))
    return MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [term])


def make_problem(pde, initial, t_order=8, z_caps=(20,),
                 backend=None) -> CauchyProblem:
    return CauchyProblem(
        pde=pde,
        rhs=TimeSeries.zero(pde.num_vars),
        initial=initial,
        t_order=t_order,
        z_caps=z_caps,
        backend=backend or RationalBackend(),
    )


def test_ord_t_from_data():
    # coefficient t*(1+z): vanishes to first order at t=0
    t_times = TimeSeries(
        [PolySeries.zero(1), PolySeries(1, {(0,): F(1), (1,): F(1)})],
        tail_exact=True,
    )
    assert OperatorTerm(0, (1,), t_times).ord_t == 1
    assert OperatorTerm(0, (0,), constant_coeff(-1)).ord_t == 0


def test_zero_coefficient_rejected():
    zero = TimeSeries([PolySeries.zero(1)], tail_exact=True)
    with pytest.raises(ValueError, match="dropped"):
        OperatorTerm(0, (1,), zero)


def test_validate_heat_passes():
    pde = heat_pde()
    problem = make_problem(pde, [PolySeries(1, {(2,): F(1)})])
    report = validate(problem)
    assert report.passed
    assert pde.q_table() == {(0, (2,)): 1}


def test_validate_valuation_failure():
    # j=2 with M=1 and a constant coefficient: ord 0 < j - M + 1 = 2
    term = OperatorTerm(2, (0,), constant_coeff(1))
    pde = MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [term])
    problem = make_problem(pde, [PolySeries.constant(1, F(1))])
    report = validate(problem)
    assert not report.passed
    names = {c.name for c in report.failures()}
    assert "assumption.valuations" in names
    assert "assumption.q_positive" in names
    assert report.analysis_ok  # polygon still meaningful


def test_validate_low_z_order_failure():
    backend = BigFloatBackend(64)
    m1 = GammaSequence(F(1, 2), backend)  # order 1/2 < 1
    term = OperatorTerm(0, (1,), TimeSeries(
        [PolySeries.constant(1, backend.scalar(-1))], tail_exact=True))
    pde = MomentPDE(1, FactorialPower(1, backend), [m1], [term])
    problem = make_problem(pde, [PolySeries.constant(1, backend.scalar(1))],
                           backend=backend)
    report = validate(problem)
    assert not report.passed
    assert {c.name for c in report.failures()} == {"assumption.z_orders"}


def test_validate_backend_feasibility():
    # gamma(1/2) values are irrational: the rational backend must refuse
    seq = GammaSequence(F(1, 2), BigFloatBackend(64))
    seq.backend = RationalBackend()
    pde = MomentPDE(1, seq, [FactorialPower(1)],
                    [OperatorTerm(0, (1,), constant_coeff(-1))])
    problem = make_problem(pde, [PolySeries.constant(1, F(1))])
    report = validate(problem)
    assert any(c.name == "backend.feasible" and not c.passed
               for c in report.checks)


def test_validate_warns_on_order_zero_time_sequence():
    from momentpde import QFactorial

    pde = MomentPDE(1, QFactorial(F(1, 2)), [FactorialPower(1)],
                    [OperatorTerm(0, (0,), constant_coeff(-1))])
    problem = make_problem(pde, [PolySeries.constant(1, F(1))])
    report = validate(problem)
    assert report.passed
    assert any("s0 = 0" in w for w in report.warnings)


def test_validate_initial_count():
    pde = heat_pde()
    problem = make_problem(pde, [])
    report = validate(problem)
    assert any(c.name == "structure.initial_count" and not c.passed
               for c in report.checks)


def test_validate_coefficient_truncation_depth():
    # a truncated (non-polynomial) coefficient must reach the working t-order
    coeff = TimeSeries([PolySeries.constant(1, F(1))] * 3, tail_exact=False)
    pde = MomentPDE(1, FactorialPower(1), [FactorialPower(1)],
                    [OperatorTerm(0, (1,), coeff)])
    problem = make_problem(pde, [PolySeries.constant(1, F(1))], t_order=8)
    report = validate(problem)
    assert any(c.name == "structure.coefficient_truncation" and not c.passed
               for c in report.checks)
    deep = make_problem(pde, [PolySeries.constant(1, F(1))], t_order=3)
    assert validate(deep).passed


def test_apply_heat_solution_is_zero():
    # u = z^2 + 2t solves u_t = u_zz; found by the hand recurrence u1 = d^2 u0
    pde = heat_pde()
    u = TimeSeries([
        PolySeries(1, {(2,): F(1)}),
        PolySeries(1, {(0,): F(2)}),
        PolySeries.zero(1),
        PolySeries.zero(1),
    ])
    out = pde.apply(u)
    assert all(out.coefficient(n).is_zero() for n in range(out.t_order + 1))


def test_apply_exponential_fixed_point():
    # d_t applied to sum t^n/n! returns the same series, truncated
    pde = MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [])
    u = TimeSeries([
        PolySeries.constant(1, F(1, math.factorial(n))) for n in range(8)
    ])
    out = pde.apply(u)
    for n in range(out.t_order + 1):
        assert out.coefficient(n).coefficient((0,)) == F(1, math.factorial(n))


def test_apply_identity_term():
    # P = d_t^1 ... plus the term a=1, j=0, alpha=0 adds u itself
    term = OperatorTerm(0, (0,), constant_coeff(1))
    pde = MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [term])
    bare = MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [])
    u = TimeSeries([PolySeries(1, {(k,): F(k + 1)}) for k in range(5)])
    with_term = pde.apply(u)
    without = bare.apply(u)
    for n in range(with_term.t_order + 1):
        expected = without.coefficient(n).add(u.coefficient(n))
        assert with_term.coefficient(n).coeffs == expected.coeffs


def test_apply_is_linear():
    pde = heat_pde()
    u = TimeSeries([PolySeries(1, {(k,): F(1, k + 1)}) for k in range(5)])
    v = TimeSeries([PolySeries(1, {(k + 1,): F(2)}) for k in range(5)])
    lhs = pde.apply(u.add(v))
    rhs = pde.apply(u).add(pde.apply(v))
    for n in range(lhs.t_order + 1):
        assert lhs.coefficient(n).coeffs == rhs.coefficient(n).coeffs


def test_apply_requires_enough_t_order():
    pde = heat_pde()
    with pytest.raises(ValueError):
        pde.apply(TimeSeries([PolySeries.constant(1, F(1))]))
