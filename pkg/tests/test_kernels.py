import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdq.geometry import chebyshev_gauss_lobatto
from fracdq.kernels import (
    ConditioningWarning,
    Family,
    IllConditionedError,
    KernelPolicy,
    KernelSpec,
    build_interpolation_system,
    factor,
    kernel_partial,
    kernel_second_partial,
    kernel_value,
    shape_parameter,
)

SMOOTH = [Family.MQ, Family.IMQ, Family.IQ, Family.GA]


def test_kernel_values():
    assert kernel_value(KernelSpec(Family.MQ, 2.0), 0.0) == 2.0
    assert kernel_value(KernelSpec(Family.GA, 0.7), 0.0) == 1.0
    c = 1.3
    assert kernel_value(KernelSpec(Family.IQ, c), c) == pytest.approx(1 / (2 * c * c))
    assert kernel_value(KernelSpec(Family.IMQ, 3.0), 4.0) == pytest.approx(0.2)
    ps = KernelSpec(Family.PS, s=2)
    assert kernel_value(ps, 0.0) == 0.0
    assert kernel_value(ps, 2.0) == pytest.approx(-(2.0**4) * np.log(2.0))


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(Family.MQ, 0.0)
    with pytest.raises(ValueError):
        KernelSpec(Family.GA)
    with pytest.raises(ValueError):
        KernelSpec(Family.PS, s=0)
    with pytest.raises(ValueError):
        KernelPolicy(Family.PS, 1.0)
    with pytest.raises(ValueError):
        KernelPolicy(Family.MQ, -1.0)


def test_second_partial_special_values():
    assert kernel_second_partial(KernelSpec(Family.GA, 0.5), [0.3], [0.3], 0) == pytest.approx(-2 / 0.25)
    assert kernel_second_partial(KernelSpec(Family.MQ, 1.0), [0.0], [0.0], 0) == pytest.approx(1.0)


def test_second_partial_rejects_ps():
    with pytest.raises(ValueError):
        kernel_second_partial(KernelSpec(Family.PS, s=1), [0.0, 0.0], [0.1, 0.2], 0)


@settings(max_examples=60)
@given(
    st.sampled_from(SMOOTH),
    st.floats(0.2, 2.0),
    st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    st.integers(0, 2),
)
def test_partials_match_finite_differences(fam, c, center, x, axis):
    k = KernelSpec(fam, c)
    center, x = np.array(center), np.array(x)
    e = np.zeros(3)
    e[axis] = 1.0

    def f(p):
        return float(kernel_value(k, np.linalg.norm(p - center)))

    h2 = 1e-4
    fd2 = (f(x + h2 * e) - 2 * f(x) + f(x - h2 * e)) / h2**2
    d2 = float(kernel_second_partial(k, center, x, axis))
    scale = max(abs(d2), float(kernel_value(k, 0.0)) / c**2)
    assert abs(fd2 - d2) <= 1e-5 * scale
    h1 = 1e-6
    fd1 = (f(x + h1 * e) - f(x - h1 * e)) / (2 * h1)
    d1 = float(kernel_partial(k, center, x, axis, 1))
    assert abs(fd1 - d1) <= 1e-6 * max(abs(d1), float(kernel_value(k, 0.0)) / c)


def test_partial_order_check():
    with pytest.raises(ValueError):
        kernel_partial(KernelSpec(Family.MQ, 1.0), [0.0], [0.5], 0, 3)


@pytest.mark.parametrize(
    "nu, sigma, M, expected",
    [(1.3, 1, 15, 0.65), (8.0, 2, 24, 1.6), (0.4, 1, 3, 0.4 / 4**0.25)],
)
def test_shape_parameter(nu, sigma, M, expected):
    assert shape_parameter(nu, sigma, M) == pytest.approx(expected)
    assert KernelPolicy(Family.IMQ, nu, sigma).resolve(M).c == pytest.approx(expected)


def test_single_node_mq_system():
    sys_ = build_interpolation_system(KernelSpec(Family.MQ, 0.7), np.array([[0.2]]))
    assert sys_.A.tolist() == [[0.7]]
    assert sys_.augmented


@pytest.mark.parametrize("fam", [Family.IMQ, Family.IQ, Family.GA])
def test_positive_definite_kernels(fam):
    rng = np.random.default_rng(3)
    for M in (10, 60, 200):
        x = rng.uniform(0, 1, (M, 2))
        # c near the mean spacing keeps A far enough from singular to test in floating point
        A = build_interpolation_system(KernelSpec(fam, 1.0 / np.sqrt(M)), x, max_condition=np.inf).A
        assert np.array_equal(A, A.T)
        np.linalg.cholesky(A)
    x = np.linspace(0, 1, 10)[:, None]
    A = build_interpolation_system(KernelSpec(fam, 0.5), x).A
    assert np.linalg.eigvalsh(A).min() > 0


@pytest.mark.parametrize("fam", SMOOTH + [Family.PS])
def test_interpolation_reproduces_nodal_data(fam):
    x = chebyshev_gauss_lobatto(-1, 1, 14).coords
    k = KernelSpec(fam, 0.8) if fam is not Family.PS else KernelSpec(fam, s=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        sys_ = build_interpolation_system(k, x)
    u = np.sin(x[:, 0])
    coef = sys_.fit(u)
    res = np.abs(sys_.evaluate(coef, x) - u).max()
    assert res <= 1e-10 * sys_.condition * np.abs(u).max()
    if sys_.augmented:
        # constraint B lambda = 0
        assert abs(coef[: len(x)].sum()) <= 1e-10 * sys_.condition


def test_duplicate_nodes_rejected():
    with pytest.raises(ValueError):
        build_interpolation_system(KernelSpec(Family.GA, 1.0), np.array([[0.0], [0.5], [0.5]]))


def test_conditioning_policy():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
    with pytest.warns(ConditioningWarning):
        factor(A, "test matrix")
    with pytest.raises(IllConditionedError):
        factor(np.array([[1.0, 1.0], [1.0, 1.0]]), "singular matrix")
    with pytest.raises(IllConditionedError):
        factor(np.eye(2) * [1.0, 1e-11], "capped", max_condition=1e10)
    (_, _), cond = factor(np.diag([1.0, 2.0]), "diag")
    assert cond == pytest.approx(2.0)


def test_severe_ill_conditioning_raises():
    x = np.linspace(0, 1, 40)[:, None]
    with pytest.raises(IllConditionedError):
        build_interpolation_system(KernelSpec(Family.GA, 5.0), x)
