"""Modified Nagumo norms and executable checks of their inequalities.

The norm of a series f against a multi-index alpha (all components >= 1),
radius r, and order vector s is the least A so that f is coefficient-wise
dominated by A times a product of majorant series with coefficients
((n + alpha_i - 1)!/n!)^(s_i) / (r^(alpha_i) (alpha_i - 1)!^(s_i)).  For
finitely supported data that infimum is a maximum over the support:

    max over gamma of |f_gamma| * r^(|gamma|+|alpha|) *
        prod_i (gamma_i! (alpha_i-1)! / (gamma_i+alpha_i-1)!)^(s_i).

For the zero multi-index the norm is the plain ell-1 norm at radius r.
Mixed multi-indices (some components zero, some positive) are rejected.

Each inequality the norm family satisfies (submultiplicativity, the
derivative bound, the index-shift bound, the sup-norm comparison, and the
binomial convolution identity feeding them) is exposed as a check function
that evaluates both sides, exactly whenever the inputs permit.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .backends import log_scalar, parse_rational
from .moments import FactorialPower, MomentSequence, QFactorial
from .series import Exponents, PolySeries, total_degree


class ParameterError(ValueError):
    """Norm parameters outside their admissible ranges."""


def _as_fraction_vector(s) -> tuple[Fraction, ...]:
    out = []
    for v in s:
        if isinstance(v, float):
            out.append(Fraction(v))
        else:
            out.append(parse_rational(v))
    return tuple(out)


@dataclass(frozen=True)
class NagumoParams:
    """alpha (all >= 1, or all zero), radius r in (0, R), orders s (each >= 1)."""

    alpha: Exponents
    r: object
    s: tuple[Fraction, ...]

    def __post_init__(self):
        alpha = tuple(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "s", _as_fraction_vector(self.s))
        if len(alpha) != len(self.s):
            raise ParameterError("alpha and s must have equal length")
        positive = [a >= 1 for a in alpha]
        if any(a < 0 for a in alpha):
            raise ParameterError("alpha components must be >= 0")
        if any(positive) and not all(positive):
            raise ParameterError(
                f"mixed multi-index {alpha}: components must be all >= 1 "
                "or all zero"
            )
        if not self.r > 0:
            raise ParameterError("radius r must be positive")
        if any(si < 1 for si in self.s):
            raise ParameterError(f"order vector {self.s} must have entries >= 1")

    @property
    def is_zero_index(self) -> bool:
        return all(a == 0 for a in self.alpha)


@dataclass(frozen=True)
class NormResult:
    """A norm value; lower_bound marks truncated (partially known) input."""

    value: object
    lower_bound: bool
    exact: bool

    def __float__(self) -> float:
        return float(self.value)


def theta_coeff(s, a: int, n: int):
    """Coefficient n of the majorant generator: ((n+a)!/n!)^s.

    Exact Fraction for integer s, float otherwise.
    """
    if a < 0 or n < 0:
        raise ParameterError("a and n must be >= 0")
    rising = 1
    for k in range(n + 1, n + a + 1):
        rising *= k
    s = parse_rational(s) if not isinstance(s, float) else Fraction(s)
    if s.denominator == 1:
        return Fraction(rising) ** int(s)
    return float(rising) ** float(s)


def _exact_candidate(value, exponents, alpha, r, s) -> Fraction:
    w = abs(value) * r ** (total_degree(exponents) + sum(alpha))
    for g, a, si in zip(exponents, alpha, s):
        if a == 1:
            continue
        base = Fraction(
            math.factorial(g) * math.factorial(a - 1),
            math.factorial(g + a - 1),
        )
        w *= base ** int(si)
    return w


def _log_candidate(value, exponents, alpha, r, s) -> float:
    lw = log_scalar(abs(value))
    lw += (total_degree(exponents) + sum(alpha)) * log_scalar(r)
    for g, a, si in zip(exponents, alpha, s):
        if a == 1:
            continue
        lw += float(si) * (
            math.lgamma(g + 1) + math.lgamma(a) - math.lgamma(g + a)
        )
    return lw


def _rational_value(v) -> bool:
    return isinstance(v, (int, Fraction))


def nagumo_norm(f: PolySeries, params: NagumoParams) -> NormResult:
    """Evaluate the norm on a truncated series.

    Finite validity in any variable means the data is a truncation of an
    infinite expansion, so the maximum over stored coefficients only bounds
    the true norm from below; the result is flagged accordingly.
    """
    if len(params.alpha) != f.num_vars:
        raise ParameterError("params arity does not match the series")
    lower = not f.is_exact()
    if params.is_zero_index:
        value = f.ell1_norm(params.r)
        exact = _rational_value(value)
        return NormResult(value, lower, exact)

    exact = isinstance(params.r, Fraction) and all(
        _rational_value(v) for v in f.coeffs.values()
    )
    if exact:
        for i, (a, si) in enumerate(zip(params.alpha, params.s)):
            if si.denominator != 1 and a != 1 and f.degree(i) > 0:
                exact = False
                break

    if exact:
        best = Fraction(0)
        for exponents in f.support():
            cand = _exact_candidate(
                f.coeffs[exponents], exponents, params.alpha, params.r, params.s
            )
            if cand > best:
                best = cand
        return NormResult(best, lower, True)

    best_log = None
    for exponents in f.support():
        cand = _log_candidate(
            f.coeffs[exponents], exponents, params.alpha, params.r, params.s
        )
        if best_log is None or cand > best_log:
            best_log = cand
    if best_log is None:
        return NormResult(0.0, lower, False)
    return NormResult(math.exp(best_log) if best_log < 700 else math.inf,
                      lower, False)


def _require_exact_input(*series: PolySeries):
    for f in series:
        if not f.is_exact():
            raise ParameterError(
                "inequality checks need exactly represented inputs "
                "(truncated series only bound their norms from below)"
            )


def _leq(lhs, rhs, exact: bool, rel_slack: float = 1e-12) -> bool:
    if exact:
        return lhs <= rhs
    lhs = float(lhs)
    rhs = float(rhs)
    return lhs <= rhs * (1 + rel_slack) + 1e-300


# -- the inequality checks ----------------------------------------------------


@dataclass(frozen=True)
class VandermondeReport:
    p: int
    q: int
    n_max: int
    all_equal: bool
    failures: tuple[int, ...]


def check_vandermonde(p: int, q: int, n_max: int) -> VandermondeReport:
    """Exact check of the binomial convolution identity

    sum over k of C(k+p-1, k) * C(n-k+q-1, n-k) = C(n+p+q-1, n).
    """
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive integers")
    failures = []
    for n in range(n_max + 1):
        lhs = sum(
            math.comb(k + p - 1, k) * math.comb(n - k + q - 1, n - k)
            for k in range(n + 1)
        )
        if lhs != math.comb(n + p + q - 1, n):
            failures.append(n)
    return VandermondeReport(p, q, n_max, not failures, tuple(failures))


def check_submultiplicative(f: PolySeries, g: PolySeries,
                            alpha: Exponents, beta: Exponents,
                            r, s, rel_slack: float = 1e-12) -> bool:
    """||f*g|| at alpha+beta is at most ||f|| at alpha times ||g|| at beta.

    beta may be the zero multi-index, in which case the g factor is its
    ell-1 norm.
    """
    _require_exact_input(f, g)
    pf = NagumoParams(alpha, r, s)
    pg = NagumoParams(beta, r, s)
    combined = tuple(a + b for a, b in zip(alpha, beta))
    pc = NagumoParams(combined, r, s)
    lhs = nagumo_norm(f.multiply(g), pc)
    nf = nagumo_norm(f, pf)
    ng = nagumo_norm(g, pg)
    exact = lhs.exact and nf.exact and ng.exact
    return _leq(lhs.value, nf.value * ng.value, exact, rel_slack)


def check_derivative_bound(f: PolySeries, axis: int, alpha: Exponents,
                           r, s, seq: MomentSequence,
                           rel_slack: float = 1e-12) -> bool:
    """||D_(m_j, z_j) f|| at alpha+e_j is at most C * alpha_j^(s_j) * ||f||,

    with C the scanned regularity constant of the axis sequence.  Needs the
    norm order s_j to be at least the sequence's own order for the scanned
    constant to apply.
    """
    _require_exact_input(f)
    params = NagumoParams(alpha, r, s)
    if params.is_zero_index:
        raise ParameterError("the derivative bound needs alpha with entries >= 1")
    shifted = tuple(
        a + (1 if i == axis else 0) for i, a in enumerate(alpha)
    )
    n_max = max(f.degree(axis), 1)
    _, big_c = seq.regularity_constants(n_max)
    lhs = nagumo_norm(f.moment_derive(axis, seq), NagumoParams(shifted, r, s))
    nf = nagumo_norm(f, params)
    s_axis = params.s[axis]
    if s_axis.denominator == 1:
        growth = Fraction(alpha[axis]) ** int(s_axis)
    else:
        growth = float(alpha[axis]) ** float(s_axis)
    rhs = big_c * growth * nf.value
    exact = lhs.exact and nf.exact and _rational_value(big_c) \
        and _rational_value(growth)
    return _leq(lhs.value, rhs, exact, rel_slack)


def check_shift_bound(f: PolySeries, alpha: Exponents, beta: Exponents,
                      r, s, rel_slack: float = 1e-12) -> bool:
    """||f|| at alpha+beta is at most r^|beta| * ||f|| at alpha.

    alpha may be the zero index (then the right side uses the ell-1 norm).
    """
    _require_exact_input(f)
    pa = NagumoParams(alpha, r, s)
    if any(b < 1 for b in beta):
        raise ParameterError("beta must have all components >= 1")
    combined = tuple(a + b for a, b in zip(alpha, beta))
    lhs = nagumo_norm(f, NagumoParams(combined, r, s))
    nf = nagumo_norm(f, pa)
    shift = r ** total_degree(beta) if isinstance(r, Fraction) \
        else float(r) ** total_degree(beta)
    exact = lhs.exact and nf.exact and _rational_value(shift)
    return _leq(lhs.value, shift * nf.value, exact, rel_slack)


def admissible_epsilon(rho, r, s) -> float:
    """Default epsilon for the sup-norm comparison: the midpoint of the
    admissible interval, or 1 when the interval is unbounded (|s| = N)."""
    s = _as_fraction_vector(s)
    excess = float(sum(s)) - len(s)
    if excess <= 0:
        return 1.0
    eps_max = (float(r) / float(rho)) ** (1.0 / excess) - 1.0
    if eps_max <= 0:
        raise ParameterError("no admissible epsilon: rho too close to r")
    return eps_max / 2.0


def check_sup_bound(f: PolySeries, alpha: Exponents, rho, r, s,
                    sample_count: int = 64, epsilon: Optional[float] = None,
                    seed: int = 7, rel_slack: float = 1e-12) -> bool:
    """Sampled check of: sup of |f| on the closed rho-polydisc is at most
    A^|alpha| times the norm, with A = max(1, (1+e)^|s| / (e^|s| *
    (r - (1+e)^(|s|-N) rho))).

    For alpha = 0 the stronger exact comparison against the ell-1 norm at r
    is used.  Otherwise |f| is evaluated at deterministic torus points with
    |z_i| = rho (sound sampling: each sample must respect the bound).
    """
    _require_exact_input(f)
    params = NagumoParams(alpha, r, s)
    if not 0 < rho < r:
        raise ParameterError("need 0 < rho < r")
    if params.is_zero_index:
        lhs = f.ell1_norm(rho)
        rhs = f.ell1_norm(r)
        exact = _rational_value(lhs) and _rational_value(rhs)
        return _leq(lhs, rhs, exact, rel_slack)

    n = f.num_vars
    total_s = float(sum(params.s))
    if epsilon is None:
        epsilon = admissible_epsilon(rho, r, params.s)
    if epsilon <= 0 or float(rho) * (1 + epsilon) ** (total_s - n) >= float(r):
        raise ParameterError(
            f"epsilon {epsilon} violates rho*(1+eps)^(|s|-N) < r"
        )
    big_a = max(
        1.0,
        (1 + epsilon) ** total_s
        / (epsilon ** total_s
           * (float(r) - (1 + epsilon) ** (total_s - n) * float(rho))),
    )
    bound = big_a ** total_degree(alpha) * float(nagumo_norm(f, params).value)
    rng = random.Random(seed)
    radius = float(rho)
    for _ in range(sample_count):
        point = tuple(
            radius * cmath.exp(2j * math.pi * rng.random()) for _ in range(n)
        )
        if abs(f.evaluate(point)) > bound * (1 + rel_slack):
            return False
    return True


def nagumo_profile(solution, alpha0: Exponents, r, s) -> list[NormResult]:
    """The norm sequence v_n = ||u_n|| at multi-index n*alpha0.

    v_0 uses the zero-index (ell-1) norm.  Only the trusted prefix of the
    solution is profiled; truncation lower-bound flags propagate.
    """
    if any(a < 1 for a in alpha0):
        raise ParameterError("alpha0 must have all components >= 1")
    out = []
    for n in range(solution.valid_t_order + 1):
        u_n = solution.coefficient(n)
        if n == 0:
            params = NagumoParams((0,) * u_n.num_vars, r, s)
        else:
            params = NagumoParams(tuple(n * a for a in alpha0), r, s)
        out.append(nagumo_norm(u_n, params))
    return out


# -- randomized sweep battery -------------------------------------------------


_R_CHOICES = (Fraction(1, 4), Fraction(1, 2), Fraction(1))
_S_CHOICES = (Fraction(1), Fraction(3, 2), Fraction(2))


def random_polynomial(rng: random.Random, num_vars: int,
                      max_total_degree: int = 6,
                      max_terms: int = 12) -> PolySeries:
    """Sparse random polynomial with small rational coefficients."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        degree = rng.randint(0, max_total_degree)
        exponents = [0] * num_vars
        for _ in range(degree):
            exponents[rng.randrange(num_vars)] += 1
        num = 0
        while num == 0:
            num = rng.randint(-9, 9)
        key = tuple(exponents)
        terms[key] = terms.get(key, 0) + Fraction(num, rng.randint(1, 4))
    return PolySeries(num_vars, terms)


def _sweep_context(rng: random.Random):
    num_vars = rng.randint(1, 3)
    r = rng.choice(_R_CHOICES)
    s = tuple(rng.choice(_S_CHOICES) for _ in range(num_vars))
    alpha = tuple(rng.randint(1, 3) for _ in range(num_vars))
    beta = tuple(rng.randint(1, 3) for _ in range(num_vars))
    return num_vars, r, s, alpha, beta


def _axis_sequence(rng: random.Random, s_axis: Fraction,
                   cache: dict) -> MomentSequence:
    # constrain the sequence order to stay at or below the norm order
    kinds = ["fp1", "qf2", "qf3"]
    if s_axis >= 2:
        kinds.append("fp2")
    kind = rng.choice(kinds)
    if kind not in cache:
        cache[kind] = {
            "fp1": lambda: FactorialPower(1),
            "fp2": lambda: FactorialPower(2),
            "qf2": lambda: QFactorial(Fraction(1, 2)),
            "qf3": lambda: QFactorial(Fraction(1, 3)),
        }[kind]()
    return cache[kind]


def lemma_battery(seed: int = 7, instances: int = 1000,
                  vandermonde_pq: int = 10, vandermonde_n: int = 50,
                  norm_one_cases: int = 20) -> dict:
    """Run every inequality sweep with one seeded generator and report.

    The battery is deterministic for a fixed seed; the report is the JSON
    payload of the `check` command.
    """
    report: dict = {"seed": seed, "instances": instances}

    vd_failures = []
    for p in range(1, vandermonde_pq + 1):
        for q in range(1, vandermonde_pq + 1):
            res = check_vandermonde(p, q, vandermonde_n)
            if not res.all_equal:
                vd_failures.append({"p": p, "q": q, "n": list(res.failures)})
    report["vandermonde"] = {
        "p_max": vandermonde_pq,
        "q_max": vandermonde_pq,
        "n_max": vandermonde_n,
        "passed": not vd_failures,
        "failures": vd_failures,
    }

    seq_cache: dict = {}

    def run_sweep(name: str, one_case) -> None:
        rng = random.Random(f"{seed}:{name}")
        failures = []
        for i in range(instances):
            if not one_case(rng):
                failures.append(i)
        report[name] = {
            "count": instances,
            "passed": not failures,
            "failures": failures[:20],
        }

    def case_submultiplicative(rng) -> bool:
        num_vars, r, s, alpha, beta = _sweep_context(rng)
        f = random_polynomial(rng, num_vars)
        g = random_polynomial(rng, num_vars)
        if rng.random() < 0.25:
            beta = (0,) * num_vars  # the ell-1 variant
        return check_submultiplicative(f, g, alpha, beta, r, s)

    def case_derivative(rng) -> bool:
        num_vars, r, s, alpha, _ = _sweep_context(rng)
        f = random_polynomial(rng, num_vars)
        axis = rng.randrange(num_vars)
        seq = _axis_sequence(rng, s[axis], seq_cache)
        return check_derivative_bound(f, axis, alpha, r, s, seq)

    def case_shift(rng) -> bool:
        num_vars, r, s, alpha, beta = _sweep_context(rng)
        f = random_polynomial(rng, num_vars)
        if rng.random() < 0.25:
            alpha = (0,) * num_vars
        return check_shift_bound(f, alpha, beta, r, s)

    def case_sup(rng) -> bool:
        num_vars, r, s, alpha, _ = _sweep_context(rng)
        f = random_polynomial(rng, num_vars)
        rho = r * Fraction(rng.randint(1, 3), 4)
        if rng.random() < 0.2:
            alpha = (0,) * num_vars
        return check_sup_bound(f, alpha, rho, r, s, sample_count=16,
                               seed=rng.randrange(2**30))

    run_sweep("submultiplicative", case_submultiplicative)
    run_sweep("derivative_bound", case_derivative)
    run_sweep("shift_bound", case_shift)
    run_sweep("sup_bound", case_sup)

    rng = random.Random(f"{seed}:norm_of_one")
    one_failures = []
    for i in range(norm_one_cases):
        num_vars = rng.randint(1, 3)
        r = rng.choice(_R_CHOICES)
        s = tuple(rng.choice(_S_CHOICES) for _ in range(num_vars))
        beta = tuple(rng.randint(1, 4) for _ in range(num_vars))
        one = PolySeries.constant(num_vars, Fraction(1))
        res = nagumo_norm(one, NagumoParams(beta, r, s))
        if not (res.exact and res.value == r ** total_degree(beta)):
            one_failures.append(i)
    report["norm_of_one"] = {
        "count": norm_one_cases,
        "passed": not one_failures,
        "failures": one_failures,
    }

    report["all_pass"] = all(
        section["passed"]
        for key, section in report.items()
        if isinstance(section, dict) and "passed" in section
    )
    return report
