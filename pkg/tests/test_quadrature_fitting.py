from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from gapfield.errors import DomainError, ExtrapolationError, QuadratureError
from gapfield.fitting import (
    check_monotone,
    fit_exponent,
    fixed_slope_prefactor,
    is_monotone_toward,
    richardson_extrapolate,
)
from gapfield.quadrature import adaptive_integrate, gauss_legendre, lagrange_derivative_matrix


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_peaked_integrand_against_antiderivative(eps):
    val, err = adaptive_integrate(lambda x: 1 / (eps + x * x), -0.5, 0.5, rtol=1e-12, breakpoints=(0.0,))
    exact = 2 / math.sqrt(eps) * math.atan(0.5 / math.sqrt(eps))
    assert val == pytest.approx(exact, rel=1e-11)
    assert err <= 1e-12 * abs(val) * 1.0001


def test_smooth_integrand_against_scipy():
    f = lambda x: np.exp(np.sin(3 * x)) * np.cos(x) ** 2
    val, _ = adaptive_integrate(f, 0.0, 2.0, rtol=1e-12)
    ref, _ = integrate.quad(f, 0.0, 2.0, epsabs=0, epsrel=1e-13)
    assert val == pytest.approx(ref, rel=1e-11)


def test_quadrature_budget_error():
    with pytest.raises(QuadratureError) as info:
        adaptive_integrate(lambda x: np.sign(x - 0.3) * np.abs(x - 0.3) ** -0.9, 0, 1, rtol=1e-14,
                           max_intervals=20)
    assert info.value.estimate is not None


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(16)
    assert float(np.sum(w * x**30)) == pytest.approx(2 / 31, rel=1e-13)
    assert not x.flags.writeable


def test_lagrange_derivative_exact_on_polynomials():
    x, _ = gauss_legendre(16)
    D = lagrange_derivative_matrix(x)
    assert np.allclose(D @ x**7, 7 * x**6, atol=1e-11)
    assert np.allclose(D @ np.ones(16), 0, atol=1e-12)


# -- exponent fits -----------------------------------------------------------


def test_exact_inverse_sqrt_law():
    d = np.logspace(-1, -6, 6)
    fit = fit_exponent(list(zip(d, d**-0.5)))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(0.0, abs=1e-11)


def test_exact_power_with_prefactor():
    d = np.logspace(-1, -4, 5)
    fit = fit_exponent(list(zip(d, 3 * d**2)))
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-11)
    assert fit.prefactor == pytest.approx(3.0, rel=1e-11)


def test_perturbed_law_slope():
    d = np.logspace(-2, -5, 7)
    fit = fit_exponent(list(zip(d, d**-0.5 * (1 + d))))
    assert -0.51 < fit.slope < -0.49


def test_half_width_matches_linregress():
    rng = np.random.default_rng(4)
    d = np.logspace(-1, -5, 9)
    y = d**-0.5 * np.exp(0.01 * rng.normal(size=9))
    fit = fit_exponent(list(zip(d, y)))
    ref = stats.linregress(np.log(d), np.log(y))
    assert fit.slope == pytest.approx(ref.slope, rel=1e-12)
    assert fit.half_width == pytest.approx(2 * ref.stderr, rel=1e-9)


def test_non_positive_rows_are_listed():
    with pytest.raises(DomainError, match=r"rows \[1, 3\]"):
        fit_exponent([(1e-1, 1.0), (1e-2, 0.0), (1e-3, 2.0), (1e-4, -1.0)])
    with pytest.raises(DomainError):
        fit_exponent([(1e-1, 1.0), (1e-2, 2.0)])


@settings(max_examples=50)
@given(c=st.floats(0.1, 10), p=st.floats(-2, 2))
def test_fixed_slope_prefactor_exact(c, p):
    d = np.logspace(-1, -5, 5)
    assert fixed_slope_prefactor(list(zip(d, c * d**p)), p) == pytest.approx(c, rel=1e-10)


# -- extrapolation -----------------------------------------------------------


def test_richardson_polynomial_is_exact():
    h = np.array([0.1, 0.05, 0.02, 0.01])
    ex = richardson_extrapolate(h, 2.5 + 3 * h - 7 * h**2 + h**3)
    assert ex.value == pytest.approx(2.5, abs=1e-12)
    # a quadratic is already exact on the previous diagonal, so the error bar vanishes
    ex = richardson_extrapolate(h, 2.5 + 3 * h - 7 * h**2)
    assert ex.value == pytest.approx(2.5, abs=1e-12)
    assert ex.error < 1e-12


def test_richardson_constant_sequence():
    ex = richardson_extrapolate([1e-1, 1e-2, 1e-3, 1e-4], [1.25] * 4)
    assert ex.value == 1.25 and ex.error == 0.0


def test_richardson_error_is_last_diagonal_spread():
    h = np.array([0.1, 0.05, 0.025, 0.0125])
    ex = richardson_extrapolate(h, np.exp(h))
    assert abs(ex.value - 1.0) <= 10 * ex.error + 1e-14
    assert ex.error == pytest.approx(abs(ex.tableau[-1][-1] - ex.tableau[-2][-1]))


def test_monotone_guard():
    check_monotone([1.0, 0.9, 0.85, 0.84], 1e-9)
    check_monotone([1.0, 0.9, 0.9 + 1e-12, 0.85], 1e-9)
    with pytest.raises(ExtrapolationError):
        check_monotone([1.0, 0.9, 0.95, 0.8], 1e-9)
    assert is_monotone_toward([0.8, 0.9, 0.95, 0.99], 1.0)
    assert not is_monotone_toward([0.8, 0.9, 1.2], 1.0)
