import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import binom, gamma

from fracdq.fractional import (
    MultiTermSpec,
    caputo_operator_apply,
    frac_deriv_power,
    frac_deriv_power_right,
    gl_fractional_derivative,
    lubich_coefficients,
    memory_kernel,
    multi_term_apply,
)

thetas = st.floats(0.01, 1.0)
orders = st.sampled_from([1, 2, 3, 4])


def series_oracle(q, theta, n):
    """Taylor coefficients of (sum_{j<=q} (1 - z)^j / j)^theta in high precision."""

    def delta(z):
        return sum(mpmath.mpf(1) / j * (1 - z) ** j for j in range(1, q + 1))

    with mpmath.workdps(30):
        return np.array([float(c) for c in mpmath.taylor(lambda z: delta(z) ** theta, 0, n)])


# -- Lubich weights ---------------------------------------------------------------


def test_first_weight_is_one():
    assert lubich_coefficients(1, 0.3, 0).weights.tolist() == [1.0]


def test_q1_second_weight_is_minus_theta():
    assert lubich_coefficients(1, 0.5, 1).weights[1] == -0.5


def test_bdf2_weights():
    np.testing.assert_allclose(lubich_coefficients(2, 1.0, 2).weights, [1.5, -2.0, 0.5], atol=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
@pytest.mark.parametrize("theta", [0.2, 0.5, 0.9, 1.0])
def test_weights_match_series_oracle(q, theta):
    w = lubich_coefficients(q, theta, 40).weights
    np.testing.assert_allclose(w, series_oracle(q, theta, 40), rtol=1e-11, atol=1e-14)


def test_q1_weights_are_binomial():
    theta, n = 0.37, 60
    k = np.arange(n + 1)
    np.testing.assert_allclose(lubich_coefficients(1, theta, n).weights, (-1.0) ** k * binom(theta, k), rtol=1e-12)


@given(thetas, orders)
def test_leading_weight_nonzero(theta, q):
    assert lubich_coefficients(q, theta, 3).weights[0] != 0.0


@settings(max_examples=40)
@given(st.floats(0.01, 0.99))
def test_q1_partial_sums_decrease_to_zero(theta):
    w = lubich_coefficients(1, theta, 2000).weights
    S = np.cumsum(w)
    assert np.all(S > 0)
    assert np.all(np.diff(S) < 0)


@pytest.mark.parametrize("q, theta", [(0, 0.5), (5, 0.5), (1, 0.0), (1, 1.2), (2, -0.1)])
def test_invalid_arguments(q, theta):
    with pytest.raises(ValueError):
        lubich_coefficients(q, theta, 3)


def test_weights_are_cached_and_read_only():
    a = lubich_coefficients(3, 0.4, 50)
    b = lubich_coefficients(3, 0.4, 50)
    assert a.weights is b.weights or np.array_equal(a.weights, b.weights)
    with pytest.raises(ValueError):
        a.weights[0] = 2.0


# -- Caputo operator ----------------------------------------------------------------


@given(thetas, orders, st.floats(-5, 5), st.integers(1, 30))
def test_constant_history_is_annihilated(theta, q, c, n):
    coeffs = lubich_coefficients(q, theta, n)
    hist = np.full((n + 1, 3), c)
    np.testing.assert_allclose(caputo_operator_apply(coeffs, hist, 0.01), 0.0, atol=1e-12 * max(1, abs(c)) * 100**theta)


def test_backward_difference_of_linear_function():
    tau = 0.1
    coeffs = lubich_coefficients(1, 1.0, 10)
    t = tau * np.arange(11)
    for n in range(1, 11):
        assert caputo_operator_apply(coeffs, t[: n + 1, None], tau)[0] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_temporal_order_on_smooth_power(q):
    theta, T, p = 0.5, 0.5, 4.0
    errs = []
    taus = [1 / 40, 1 / 80, 1 / 160]
    for tau in taus:
        n = int(round(T / tau))
        t = tau * np.arange(n + 1)
        coeffs = lubich_coefficients(q, theta, n)
        approx = caputo_operator_apply(coeffs, (t**p)[:, None], tau)[0]
        exact = gamma(p + 1) / gamma(p + 1 - theta) * T ** (p - theta)
        errs.append(abs(approx - exact))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - q) <= 0.25), rates


def test_history_checks():
    coeffs = lubich_coefficients(1, 0.5, 2)
    with pytest.raises(ValueError):
        caputo_operator_apply(coeffs, np.zeros((0, 2)), 0.1)
    with pytest.raises(ValueError):
        caputo_operator_apply(coeffs, np.zeros((5, 2)), 0.1)


# -- multi-term operator ----------------------------------------------------------------


def test_multi_term_spec_validation():
    with pytest.raises(ValueError):
        MultiTermSpec(())
    with pytest.raises(ValueError):
        MultiTermSpec(((0.0, 0.5),))
    with pytest.raises(ValueError):
        MultiTermSpec(((1.0, 0.5), (-1.0, 0.3)))
    with pytest.raises(ValueError):
        MultiTermSpec(((1.0, 1.5),))


def test_single_term_equals_caputo_operator():
    rng = np.random.default_rng(0)
    hist = rng.standard_normal((8, 4))
    spec = MultiTermSpec.single(0.6)
    ref = caputo_operator_apply(lubich_coefficients(2, 0.6, 7), hist, 0.05)
    np.testing.assert_allclose(multi_term_apply(spec, 2, hist, 0.05), ref, rtol=1e-14)


@given(st.floats(0.1, 10.0))
def test_multi_term_scaling(lam):
    rng = np.random.default_rng(1)
    hist = rng.standard_normal((6, 3))
    spec = MultiTermSpec(((1.0, 0.9), (0.5, 0.4)))
    np.testing.assert_allclose(
        multi_term_apply(spec.scaled(lam), 1, hist, 0.1), lam * multi_term_apply(spec, 1, hist, 0.1), rtol=1e-12, atol=1e-12
    )


def test_multi_term_matches_power_law_source():
    spec = MultiTermSpec(((1.0, 1.0), (1.0, 0.8), (1.0, 0.5), (1.0, 0.1)))
    mu, T = 1.0, 0.5
    exact = sum(a * gamma(mu + 1) * T ** (mu - th) / gamma(mu + 1 - th) for a, th in spec.terms)
    errs = []
    for tau in (1 / 100, 1 / 200):
        n = int(round(T / tau))
        t = tau * np.arange(n + 1)
        errs.append(abs(multi_term_apply(spec, 1, (t**mu)[:, None], tau)[0] - exact))
    assert errs[1] < errs[0] and errs[0] < 0.05


def test_memory_kernel_is_weighted_sum():
    spec = MultiTermSpec(((1.0, 0.7), (2.0, 0.2)))
    tau, n = 0.01, 12
    ref = sum(a * lubich_coefficients(3, th, n).weights / tau**th for a, th in spec.terms)
    np.testing.assert_allclose(memory_kernel(spec, 3, tau, n), ref, rtol=1e-14)


# -- analytic power-law derivatives -------------------------------------------------------


def test_power_derivative_values():
    assert frac_deriv_power(1.5, 2.0, -1.0, 1.0) == pytest.approx(gamma(3) / gamma(1.5) * math.sqrt(2))
    assert frac_deriv_power(1.0, 1.0, 0.0, 0.7) == pytest.approx(1.0)
    assert frac_deriv_power(1.1, 1.1, -1.0, -1.0 + 1e-9) == pytest.approx(gamma(2.1))


def test_right_derivative_mirrors_left():
    x = np.linspace(0.1, 0.9, 7)
    np.testing.assert_allclose(frac_deriv_power_right(1.4, 2.5, 1.0, x), frac_deriv_power(1.4, 2.5, 0.0, 1.0 - x), rtol=1e-14)


def test_power_derivative_gamma_pole():
    with pytest.raises(ValueError):
        frac_deriv_power(1.5, 0.5, 0.0, 1.0)


# -- Grunwald-Letnikov baseline -------------------------------------------------------------


def test_gl_annihilates_constants():
    x = np.linspace(-1, 1, 21)
    np.testing.assert_allclose(gl_fractional_derivative(x, np.full(21, 3.0), 1.5), 0.0, atol=1e-10)


def test_gl_converges_at_first_order():
    errs = []
    for M in (40, 80, 160):
        x = np.linspace(-1, 1, M + 1)
        approx = gl_fractional_derivative(x, (x + 1) ** 2, 1.5)
        exact = frac_deriv_power(1.5, 2.0, -1.0, x)
        errs.append(np.sqrt(np.sum((approx - exact)[1:] ** 2) / (M + 1)))
    assert errs[2] < errs[1] < errs[0]


def test_gl_rejects_nonuniform_grid():
    with pytest.raises(ValueError):
        gl_fractional_derivative(np.array([0.0, 0.1, 0.3, 0.4]), np.zeros(4), 1.5)
