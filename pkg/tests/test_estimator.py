"""Order fitting, the profile multi-index, and the theorem comparison."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from momentpde import (
    CauchyProblem,
    FactorialPower,
    FitError,
    MomentPDE,
    NagumoParams,
    OperatorTerm,
    PolySeries,
    QFactorial,
    RationalBackend,
    TimeSeries,
    alpha0,
    estimate_order,
    exponential_series,
    geometric_series,
    nagumo_norm,
    solve,
    verify_theorem,
)

F = Fraction


def constant_coeff(value, num_vars=1) -> TimeSeries:
    return TimeSeries([PolySeries.constant(num_vars, F(value))], tail_exact=True)


def heat_pde(ord_t=0) -> MomentPDE:
    entries = [PolySeries.zero(1)] * ord_t + [PolySeries.constant(1, F(-1))]
    term = OperatorTerm(0, (2,), TimeSeries(entries, tail_exact=True))
    return MomentPDE(1, FactorialPower(1), [FactorialPower(1)], [term])


def make_problem(pde, initial, t_order=40, z_caps=(120,)) -> CauchyProblem:
    return CauchyProblem(pde, TimeSeries.zero(1), initial, t_order, z_caps,
                         RationalBackend())


def test_fit_recovers_half_factorial():
    norms = [math.exp(0.5 * math.lgamma(n + 1)) for n in range(41)]
    fit = estimate_order(norms, (10, 40))
    assert abs(fit.s_hat - 0.5) < 1e-9
    assert abs(fit.logB_hat) < 1e-9
    assert fit.rms_residual < 1e-9


def test_fit_recovers_pure_geometric():
    norms = [2.0 ** n for n in range(41)]
    fit = estimate_order(norms, (10, 40))
    assert abs(fit.s_hat) < 1e-9
    assert abs(fit.logB_hat - math.log(2)) < 1e-9


def test_fit_central_binomial_style_growth():
    # direct evaluation oracle for (2n)!/n!; Stirling says this is
    # asymptotically 4^n n! up to a root factor, so the fit sits near 1
    norms = [F(math.factorial(2 * n), math.factorial(n)) for n in range(41)]
    fit = estimate_order(norms, (20, 40))
    assert 0.9 <= fit.s_hat <= 1.1


def test_fit_scale_invariances():
    base = [math.exp(0.7 * math.lgamma(n + 1)) + 0.0 for n in range(41)]
    fit = estimate_order(base, (12, 40))
    scaled = [7.5 * v for v in base]
    geometric = [v * 3.0 ** n for n, v in enumerate(base)]
    fit_scaled = estimate_order(scaled, (12, 40))
    fit_geom = estimate_order(geometric, (12, 40))
    assert abs(fit_scaled.s_hat - fit.s_hat) < 1e-9
    assert abs(fit_geom.s_hat - fit.s_hat) < 1e-9
    assert abs(fit_scaled.logA_hat - fit.logA_hat - math.log(7.5)) < 1e-9
    assert abs(fit_geom.logB_hat - fit.logB_hat - math.log(3.0)) < 1e-9


def test_fit_excludes_zeros_and_needs_five_points():
    norms = [0.0] * 41
    norms[20] = norms[22] = norms[24] = 1.0
    with pytest.raises(FitError):
        estimate_order(norms, (20, 40))


def test_fit_window_out_of_range():
    with pytest.raises(FitError):
        estimate_order([1.0] * 10, (5, 30))


def test_alpha0_examples():
    assert alpha0(heat_pde()) == (3,)       # floor(2/1) + 1
    assert alpha0(heat_pde(ord_t=1)) == (2,)  # floor(2/2) + 1
    ode_like = MomentPDE(1, FactorialPower(1), [FactorialPower(1)],
                         [OperatorTerm(0, (0,), constant_coeff(-1))])
    assert alpha0(ode_like) == (1,)
    empty = MomentPDE(1, FactorialPower(1), [FactorialPower(1), FactorialPower(1)][:1], [])
    assert alpha0(empty) == (1,)


def test_gevrey_stack_profile_fits_declared_order():
    # stack f_n = n!^w * g(z): the profile norms at n*alpha must fit with
    # order at most w (up to the finite-size tolerance), since
    # ||f_n||_{n alpha} = n!^w * ||g||_{n alpha} and the g factor decays
    # geometrically in n
    g = PolySeries(1, {(0,): F(1), (2,): F(1, 3)})
    r = F(1, 2)
    for w in (0.0, 0.5, 1.0):
        norms = []
        for n in range(41):
            base = nagumo_norm(
                g, NagumoParams((max(n, 1) * 2,), r, (F(1),))
            ).value
            norms.append(float(base) * math.exp(w * math.lgamma(n + 1)))
        fit = estimate_order(norms, (20, 40))
        assert fit.s_hat <= w + 0.15


def test_verify_theorem_heat_geometric():
    problem = make_problem(heat_pde(), [geometric_series(1, 1, (120,))])
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="sup_proxy",
                            rho=F(1, 8), window=(20, 40))
    assert report.k1_inverse == 1
    assert 0.9 <= report.s_hat <= 1.1
    assert report.passed


def test_verify_theorem_convergent_case_clamps_to_zero():
    problem = make_problem(heat_pde(), [exponential_series(1, 1, (120,))])
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="sup_proxy",
                            rho=F(1, 2), window=(20, 40))
    # u_n = e^z/n!: the raw factorial exponent is -1, the Gevrey order is 0
    assert report.fit is not None and report.fit.s_hat < -0.9
    assert report.s_hat == 0.0
    assert report.passed


def test_verify_theorem_q_difference():
    pde = MomentPDE(1, QFactorial(F(1, 2)), [FactorialPower(1)],
                    [OperatorTerm(0, (0,), constant_coeff(-1))])
    problem = CauchyProblem(pde, TimeSeries.zero(1),
                            [PolySeries.constant(1, F(1))], 40, (0,),
                            RationalBackend())
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="sup_proxy", rho=F(1, 4),
                            window=(20, 40))
    assert report.k1_inverse == 0
    assert -0.05 <= report.s_hat <= 0.05
    assert report.passed


def test_verify_theorem_zero_tail_convention():
    problem = make_problem(heat_pde(), [PolySeries(1, {(2,): F(1)})],
                           t_order=20, z_caps=(10,))
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="sup_proxy",
                            rho=F(1, 4), window=(10, 20))
    assert report.s_hat == 0.0
    assert report.fit is None
    assert report.passed


def test_verify_theorem_profile_mode():
    problem = make_problem(heat_pde(), [geometric_series(1, 1, (120,))])
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="nagumo_profile",
                            r=F(1, 2), window=(20, 40))
    assert report.alpha0 == (3,)
    assert report.lower_bound_norms
    assert report.s_hat <= 1.15
    assert report.passed


def test_verify_theorem_uses_problem_estimation_defaults():
    from momentpde import EstimationConfig

    problem = CauchyProblem(
        heat_pde(), TimeSeries.zero(1), [geometric_series(1, 1, (120,))],
        40, (120,), RationalBackend(),
        estimation=EstimationConfig(rho=F(1, 8), window=(20, 40),
                                    tolerance=F(3, 20), mode="sup_proxy"),
    )
    solution = solve(problem)
    report = verify_theorem(problem, solution)
    assert report.mode == "sup_proxy"
    assert report.window == (20, 40)
    assert report.passed


def test_verify_theorem_fail_with_negative_tolerance():
    problem = make_problem(heat_pde(), [geometric_series(1, 1, (120,))])
    solution = solve(problem)
    report = verify_theorem(problem, solution, mode="sup_proxy", rho=F(1, 8),
                            window=(20, 40), tolerance=F(-1, 2))
    assert report.verdict == "FAIL"
