"""Temporal fractional operators.

Convolution-quadrature (Lubich) weights, the Caputo-corrected difference
operator built on them, the multi-term operator, and closed-form fractional
derivatives of power functions used as oracles throughout the package.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gamma

__all__ = [
    "LubichCoefficients",
    "MultiTermSpec",
    "lubich_coefficients",
    "memory_kernel",
    "caputo_operator_apply",
    "multi_term_apply",
    "frac_deriv_power",
    "frac_deriv_power_right",
    "gl_fractional_derivative",
]

SUPPORTED_ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class LubichCoefficients:
    """Weights ``omega_0 .. omega_n`` of the order-``q`` Lubich operator."""

    q: int
    theta: float
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.weights) - 1


@dataclass(frozen=True)
class MultiTermSpec:
    """Multi-term Caputo operator ``sum_r a_r D^{theta_r}``.

    ``terms`` holds ``(a_r, theta_r)`` pairs; the leading coefficient must be
    strictly positive, the others nonnegative, and every order in (0, 1].
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(a), float(th)) for a, th in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("at least one term is required")
        if terms[0][0] <= 0.0:
            raise ValueError(f"leading coefficient must be positive, got {terms[0][0]}")
        for a, th in terms:
            if a < 0.0:
                raise ValueError(f"coefficients must be nonnegative, got {a}")
            if not 0.0 < th <= 1.0:
                raise ValueError(f"orders must lie in (0, 1], got {th}")

    @classmethod
    def single(cls, theta: float, a: float = 1.0) -> "MultiTermSpec":
        return cls(((a, theta),))

    def scaled(self, factor: float) -> "MultiTermSpec":
        return MultiTermSpec(tuple((factor * a, th) for a, th in self.terms))

    @property
    def coefficients(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.terms)

    @property
    def orders(self) -> tuple[float, ...]:
        return tuple(th for _, th in self.terms)


def _check_order(q: int, theta: float) -> None:
    if q not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported operator order q={q}; expected one of {SUPPORTED_ORDERS}")
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")


def _generating_polynomial(q: int) -> np.ndarray:
    # coefficients of sum_{j=1}^q (1 - z)^j / j, lowest degree first
    b = np.zeros(q + 1)
    for j in range(1, q + 1):
        b[: j + 1] += P.polypow([1.0, -1.0], j) / j
    return b


@functools.lru_cache(maxsize=128)
def _lubich_weights(q: int, theta: float, n: int) -> np.ndarray:
    w = np.empty(n + 1)
    if q == 1:
        w[0] = 1.0
        for k in range(1, n + 1):
            w[k] = (1.0 - (theta + 1.0) / k) * w[k - 1]
    else:
        # power of a polynomial series: c = b**theta
        b = _generating_polynomial(q)
        w[0] = b[0] ** theta
        for m in range(1, n + 1):
            acc = 0.0
            for j in range(1, min(m, q) + 1):
                acc += (j * theta - m + j) * b[j] * w[m - j]
            w[m] = acc / (m * b[0])
    w.flags.writeable = False
    return w


def lubich_coefficients(q: int, theta: float, n: int) -> LubichCoefficients:
    """Return the convolution weights ``omega_0^{q,theta} .. omega_n^{q,theta}``.

    The weights are the power-series coefficients of ``delta_q(z)**theta`` with
    ``delta_q(z) = sum_{j=1}^q (1 - z)^j / j``.  For ``q = 1`` this is the
    Grunwald-Letnikov sequence ``omega_k = (1 - (theta + 1)/k) omega_{k-1}``;
    ``theta = 1`` yields the BDF-``q`` stencil.

    Results are cached per ``(q, theta, n)`` and returned read-only.
    """
    _check_order(q, theta)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return LubichCoefficients(q=q, theta=float(theta), weights=_lubich_weights(q, float(theta), int(n)))


@functools.lru_cache(maxsize=32)
def _memory_kernel(spec: MultiTermSpec, q: int, tau: float, n: int) -> np.ndarray:
    c = np.zeros(n + 1)
    for a, th in spec.terms:
        if a == 0.0:
            continue
        c += a * lubich_coefficients(q, th, n).weights / tau**th
    c.flags.writeable = False
    return c


def memory_kernel(spec: MultiTermSpec, q: int, tau: float, n: int) -> np.ndarray:
    """Combined weights ``c_k = sum_r a_r omega_k^{q,theta_r} / tau^theta_r``, k = 0..n."""
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    return _memory_kernel(spec, q, float(tau), int(n))


def caputo_operator_apply(coeffs: LubichCoefficients, history, tau: float) -> np.ndarray:
    """Apply the Caputo-corrected Lubich operator at the newest time level.

    ``history`` holds ``u^0 .. u^n`` along its first axis (scalars or nodal
    vectors).  Returns ``tau^-theta [sum_k omega_k u^{n-k} - (sum_k omega_k) u^0]``.
    """
    u = np.asarray(history, dtype=float)
    if u.ndim == 0 or u.shape[0] < 1:
        raise ValueError("history must contain at least u^0")
    n = u.shape[0] - 1
    if len(coeffs) < n + 1:
        raise ValueError(f"need {n + 1} coefficients, buffer holds {len(coeffs)}")
    w = coeffs.weights[: n + 1]
    conv = np.tensordot(w, u[::-1], axes=(0, 0))
    return (conv - w.sum() * u[0]) / tau**coeffs.theta


def multi_term_apply(spec: MultiTermSpec, q: int, history, tau: float) -> np.ndarray:
    """``sum_r a_r`` times the Caputo-corrected operator of order ``theta_r``."""
    u = np.asarray(history, dtype=float)
    if u.ndim == 0 or u.shape[0] < 1:
        raise ValueError("history must contain at least u^0")
    n = u.shape[0] - 1
    out = np.zeros(u.shape[1:])
    for a, th in spec.terms:
        out = out + a * caputo_operator_apply(lubich_coefficients(q, th, n), u, tau)
    return out


def _power_prefactor(alpha: float, beta: float) -> float:
    arg = 1.0 + beta - alpha
    if arg <= 0.0 and float(arg).is_integer():
        raise ValueError(f"Gamma pole: 1 + beta - alpha = {arg}")
    m = math.ceil(alpha)
    if not (beta > m - 1 or (float(beta).is_integer() and beta >= m)):
        raise ValueError(f"power beta={beta} not admissible for order alpha={alpha}")
    return gamma(1.0 + beta) / gamma(arg)


def frac_deriv_power(alpha: float, beta: float, a: float, x):
    """Exact left Caputo derivative of ``(x - a)**beta`` of order ``alpha``.

    ``Gamma(1+beta)/Gamma(1+beta-alpha) (x-a)^(beta-alpha)``, which coincides
    with the Riemann-Liouville value for admissible ``beta``.
    """
    pref = _power_prefactor(alpha, beta)
    return pref * np.power(np.asarray(x, dtype=float) - a, beta - alpha)


def frac_deriv_power_right(alpha: float, beta: float, b: float, x):
    """Right-sided counterpart for ``(b - x)**beta`` (sign convention without ``(-1)^m``)."""
    pref = _power_prefactor(alpha, beta)
    return pref * np.power(b - np.asarray(x, dtype=float), beta - alpha)


def gl_fractional_derivative(x: Sequence[float], u: Sequence[float], alpha: float) -> np.ndarray:
    """First-order Grunwald-Letnikov approximation of the left derivative.

    Evaluates ``h^-alpha [sum_{k=0}^i omega_k u_{i-k} - (sum_{k=0}^i omega_k) u_0]``
    at every grid point, where ``omega`` are the ``q = 1`` weights of order
    ``alpha``.  Only the ``u_0`` term of the Caputo correction is applied,
    so constants are annihilated exactly.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != u.shape or x.ndim != 1:
        raise ValueError("x and u must be 1D arrays of equal length")
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    n = len(x) - 1
    if n < 1:
        return np.zeros_like(u)
    dx = np.diff(x)
    h = dx[0]
    if h <= 0 or not np.allclose(dx, h, rtol=1e-10, atol=0.0):
        raise ValueError("grid must be uniform and increasing")
    w = np.empty(n + 1)
    w[0] = 1.0
    for k in range(1, n + 1):
        w[k] = (1.0 - (alpha + 1.0) / k) * w[k - 1]
    partial = np.cumsum(w)
    out = np.array([w[: i + 1] @ u[i::-1] for i in range(n + 1)])
    return (out - partial * u[0]) / h**alpha
