"""PolySeries arithmetic, validity propagation, and moment derivatives."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentpde import (
    DimensionMismatch,
    FactorialPower,
    PolySeries,
    QFactorial,
    TimeSeries,
    exponential_series,
    geometric_series,
)

F = Fraction


def P(coeffs, num_vars=1, valid=None):
    return PolySeries(num_vars, coeffs, valid)


@st.composite
def sparse_polys(draw, num_vars=2, max_degree=5, max_terms=6):
    n_terms = draw(st.integers(1, max_terms))
    coeffs = {}
    for _ in range(n_terms):
        exps = tuple(
            draw(st.integers(0, max_degree)) for _ in range(num_vars)
        )
        coeffs[exps] = F(draw(st.integers(-8, 8)), draw(st.integers(1, 5)))
    return PolySeries(num_vars, coeffs)


def brute_convolution(f: PolySeries, g: PolySeries) -> dict:
    """Independent dense convolution oracle (no validity truncation)."""
    out = {}
    for ea, va in f.coeffs.items():
        for eb, vb in g.coeffs.items():
            key = tuple(a + b for a, b in zip(ea, eb))
            out[key] = out.get(key, 0) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def test_add_basic():
    f = P({(0,): F(1), (1,): F(1)})
    g = P({(1,): F(2)})
    assert (f + g).coeffs == {(0,): F(1), (1,): F(3)}


def test_scale_negates():
    f = P({(2,): F(1)})
    assert f.scale(-1).coeffs == {(2,): F(-1)}


def test_add_disjoint_supports():
    f = P({(0,): F(2)})
    g = P({(3,): F(5)})
    assert (f + g).coeffs == {(0,): F(2), (3,): F(5)}


def test_multiply_basic():
    f = P({(0,): F(1), (1,): F(1)})
    g = P({(0,): F(1), (1,): F(-1)})
    assert (f * g).coeffs == {(0,): F(1), (2,): F(-1)}


def test_multiply_respects_validity_truncation():
    f = P({(k,): F(1) for k in range(11)}, valid=(10,))
    z = P({(1,): F(1)})
    out = f * z
    assert out.valid == (10,)
    assert out.coefficient((11,)) == 0  # truncated by the validity rule
    assert out.coefficient((10,)) == 1
    assert out.coefficient((0,)) == 0


def test_multiply_by_zero_keeps_validity():
    f = P({(k,): F(1) for k in range(5)}, valid=(4,))
    out = f * P({})
    assert out.is_zero()
    assert out.valid == (4,)


def test_multiply_against_brute_convolution():
    f = P({(0, 1): F(2), (2, 0): F(-1), (1, 1): F(1, 2)}, num_vars=2)
    g = P({(1, 1): F(3), (0, 2): F(1)}, num_vars=2)
    assert (f * g).coeffs == brute_convolution(f, g)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        P({(1,): F(1)}).add(P({(1, 0): F(1)}, num_vars=2))


@given(f=sparse_polys(), g=sparse_polys(), h=sparse_polys())
@settings(max_examples=40, deadline=None)
def test_ring_axioms(f, g, h):
    assert (f * g).coeffs == (g * f).coeffs
    assert ((f * g) * h).coeffs == (f * (g * h)).coeffs
    assert (f * (g + h)).coeffs == ((f * g) + (f * h)).coeffs


def test_moment_derive_classical():
    f = P({(3,): F(1)})
    out = f.moment_derive(0, FactorialPower(1))
    assert out.coeffs == {(2,): F(3)}


def test_moment_derive_q_factorial():
    # D_q z^3 = [3]_q z^2 with [3]_{1/2} = 7/4
    f = P({(3,): F(1)})
    out = f.moment_derive(0, QFactorial(F(1, 2)))
    assert out.coeffs == {(2,): F(7, 4)}


def test_moment_derive_constant_is_zero():
    f = P({(0,): F(5)})
    assert f.moment_derive(0, FactorialPower(1)).is_zero()


def test_moment_derive_validity_drop():
    f = P({(2,): F(1)}, valid=(10,))
    out = f.moment_derive(0, FactorialPower(1))
    assert out.valid == (9,)
    g = P({(2, 0): F(1)}, num_vars=2, valid=(10, None))
    out2 = g.moment_derive(1, FactorialPower(1))
    assert out2.valid == (10, None)


@given(f=sparse_polys(), g=sparse_polys(), c=st.integers(-5, 5))
@settings(max_examples=40, deadline=None)
def test_moment_derive_linearity(f, g, c):
    seq = QFactorial(F(1, 3))
    lhs = (f + g).moment_derive(0, seq)
    rhs = f.moment_derive(0, seq) + g.moment_derive(0, seq)
    assert lhs.coeffs == rhs.coeffs
    assert f.scale(c).moment_derive(0, seq).coeffs == \
        f.moment_derive(0, seq).scale(c).coeffs


@given(f=sparse_polys(num_vars=1))
@settings(max_examples=40, deadline=None)
def test_moment_derive_matches_classical_derivative(f):
    out = f.moment_derive(0, FactorialPower(1))
    classical = {}
    for (n,), v in f.coeffs.items():
        if n:
            classical[(n - 1,)] = classical.get((n - 1,), 0) + n * v
    assert out.coeffs == {k: v for k, v in classical.items() if v != 0}


def test_ell1_norm_values():
    assert P({(0,): F(2), (1,): F(3)}).ell1_norm(F(1, 2)) == F(7, 2)
    assert P({(0,): F(1)}).ell1_norm(F(7)) == 1
    assert P({(1, 1): F(1)}, num_vars=2).ell1_norm(F(2)) == 4


@given(f=sparse_polys(), c=st.integers(-6, 6))
@settings(max_examples=40, deadline=None)
def test_ell1_homogeneous_and_monotone(f, c):
    r1, r2 = F(1, 3), F(1, 2)
    assert f.scale(c).ell1_norm(r1) == abs(c) * f.ell1_norm(r1)
    assert f.ell1_norm(r1) <= f.ell1_norm(r2)


def test_geometric_generator():
    g = geometric_series(1, 1, (6,))
    assert g.valid == (6,)
    assert all(g.coefficient((k,)) == 1 for k in range(7))
    half = geometric_series(2, F(1, 2), (2, 2))
    assert half.coefficient((1, 1)) == F(1, 4)
    assert half.valid == (2, 2)


def test_exponential_generator():
    e = exponential_series(1, 1, (6,))
    for k in range(7):
        assert e.coefficient((k,)) == F(1, math.factorial(k))
    assert e.valid == (6,)


def test_evaluate_complex():
    f = P({(0,): F(1), (2,): F(-1)})
    val = f.evaluate((0.5 + 0j,))
    assert abs(val - 0.75) < 1e-12


def test_equality_on_common_region():
    f = P({(0,): F(1), (1,): F(1)}, valid=(1,))
    g = P({(0,): F(1), (1,): F(1), (5,): F(9)}, valid=(5,))
    assert f == g  # they agree up to degree 1
    h = P({(0,): F(2)}, valid=(1,))
    assert f != h


def test_timeseries_ord_t():
    z = PolySeries.zero(1)
    one_plus_z = P({(0,): F(1), (1,): F(1)})
    assert TimeSeries([z, one_plus_z]).ord_t() == 1
    assert TimeSeries([P({(0,): F(-1)})]).ord_t() == 0
    with pytest.raises(ValueError):
        TimeSeries([z, z]).ord_t()


def test_timeseries_tail_exact_coefficient():
    series = TimeSeries([P({(0,): F(1)})], tail_exact=True)
    assert series.coefficient(5).is_zero()
    truncated = TimeSeries([P({(0,): F(1)})], tail_exact=False)
    with pytest.raises(IndexError):
        truncated.coefficient(5)
