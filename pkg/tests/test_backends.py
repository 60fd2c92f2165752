"""Scalar backends: parsing, exact powers, and precision guards."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from momentpde import BackendError, BigFloatBackend, PrecisionError, make_backend
from momentpde.backends import (
    exact_pow,
    log_scalar,
    parse_rational,
    scalar_to_fraction,
)

F = Fraction


def test_parse_rational_forms():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("-1") == F(-1)
    assert parse_rational("0.5") == F(1, 2)
    assert parse_rational(7) == F(7)
    with pytest.raises(BackendError):
        parse_rational("abc")
    with pytest.raises(BackendError):
        parse_rational("1/0")


def test_make_backend():
    assert make_backend("rational").exact
    assert make_backend("bigfloat", 128).precision_bits == 128
    with pytest.raises(BackendError):
        make_backend("decimal")


def test_exact_pow_integer_only():
    assert exact_pow(F(2, 3), F(3)) == F(8, 27)
    with pytest.raises(BackendError):
        exact_pow(F(2), F(1, 2))


def test_rational_backend_gamma():
    backend = make_backend("rational")
    assert backend.gamma(5) == 24
    with pytest.raises(BackendError):
        backend.gamma(F(1, 2))


def test_bigfloat_precision_and_finite_guard():
    backend = BigFloatBackend(96)
    third = backend.scalar(F(1, 3))
    assert abs(float(third * 3 - 1)) < 2.0 ** -90
    with pytest.raises(PrecisionError):
        backend.check_finite(backend.ctx.inf)


def test_bigfloat_independent_of_global_mpmath():
    import mpmath

    backend = BigFloatBackend(200)
    old = mpmath.mp.prec
    try:
        mpmath.mp.prec = 30
        value = backend.scalar(F(1, 7)) * backend.scalar(F(1, 11))
        err = abs(float(value - backend.scalar(F(1, 77))))
        assert err < 2.0 ** -190
    finally:
        mpmath.mp.prec = old


def test_log_scalar_handles_huge_fractions():
    huge = F(math.factorial(500), 3)
    expect = math.lgamma(501) - math.log(3)
    assert abs(log_scalar(huge) - expect) < 1e-9


def test_scalar_to_fraction_round_trip():
    backend = BigFloatBackend(64)
    x = backend.scalar(F(-7, 16))  # exactly representable in binary
    assert scalar_to_fraction(x) == F(-7, 16)
    assert scalar_to_fraction(F(2, 3)) == F(2, 3)
    assert scalar_to_fraction(backend.zero()) == 0
