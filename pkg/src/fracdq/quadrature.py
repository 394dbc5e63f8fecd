"""Gauss-Jacobi rules and one-sided fractional derivatives of RBFs.

For ``1 < alpha < 2`` the left derivative of a kernel along axis ``l`` is

    1/Gamma(2 - alpha) * int_0^L  phi''(x_l - s) s^(1 - alpha) ds,   L = x_l - X_L,

and the right derivative uses ``phi''(x_l + s)`` with ``L = X_R - x_l``.
The weakly singular factor is absorbed by a Gauss-Jacobi rule on the first
panel ``[0, h]``; the rest of the path is covered by Gauss-Legendre panels
no longer than the kernel's shape parameter, so the rule stays accurate for
sharply peaked kernels (small ``c``) on long paths.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln, gamma

from .geometry import Domain, _as_points
from .kernels import KernelSpec, _reject_ps, axis_second_derivative

__all__ = [
    "JacobiRule",
    "jacobi_rule",
    "path_rule",
    "frac_deriv_rbf",
    "fractional_derivative_matrix",
    "DEFAULT_NQUAD",
]

log = logging.getLogger(__name__)

DEFAULT_NQUAD = 30


@dataclass(frozen=True)
class JacobiRule:
    """Gauss rule for the weight ``(1 - z)^alpha_j (1 + z)^beta_j`` on (-1, 1)."""

    n: int
    alpha_j: float
    beta_j: float
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@functools.lru_cache(maxsize=64)
def _jacobi_rule(n: int, a: float, b: float) -> JacobiRule:
    k = np.arange(n, dtype=float)
    ab = a + b
    # three-term recurrence of the monic Jacobi polynomials
    diag = np.empty(n)
    denom = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        diag[:] = (b * b - a * a) / denom
    diag[0] = (b - a) / (ab + 2)
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        kk = np.arange(2, n, dtype=float)
        s = 2 * kk + ab
        off[1:] = 4 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1) * (s - 1))
        off = np.sqrt(off)
    nodes, vecs = eigh_tridiagonal(diag, off)
    mu0 = math.exp((ab + 1) * math.log(2.0) + betaln(a + 1, b + 1))
    weights = mu0 * vecs[0] ** 2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return JacobiRule(n, a, b, nodes, weights)


def jacobi_rule(n: int, alpha_j: float = 0.0, beta_j: float = 0.0) -> JacobiRule:
    """Golub-Welsch construction of the ``n``-point Gauss-Jacobi rule.

    Nodes come out ascending; weights sum to the zeroth moment
    ``2^(a+b+1) B(a+1, b+1)``.

    Examples
    --------
    >>> r = jacobi_rule(3)
    >>> np.round(r.weights * 9, 12)
    array([5., 8., 5.])
    """
    if n < 1:
        raise ValueError(f"quadrature order must be >= 1, got {n}")
    if alpha_j <= -1.0 or beta_j <= -1.0:
        raise ValueError(f"Jacobi exponents must exceed -1, got ({alpha_j}, {beta_j})")
    return _jacobi_rule(int(n), float(alpha_j), float(beta_j))


@functools.lru_cache(maxsize=4096)
def _path_rule(length: float, alpha: float, panel: float, n: int):
    if length <= 0.0:
        return np.empty(0), np.empty(0)
    h = min(length, panel)
    jr = jacobi_rule(n, 0.0, 1.0 - alpha)
    s = [0.5 * h * (1.0 + jr.nodes)]
    w = [(0.5 * h) ** (2.0 - alpha) * jr.weights]
    rest = length - h
    if rest > 1e-14 * length:
        m = max(1, math.ceil(rest / panel - 1e-9))
        width = rest / m
        gl = jacobi_rule(n, 0.0, 0.0)
        for p in range(m):
            left = h + p * width
            sp = left + 0.5 * width * (1.0 + gl.nodes)
            s.append(sp)
            w.append(0.5 * width * gl.weights * sp ** (1.0 - alpha))
    s = np.concatenate(s)
    w = np.concatenate(w) / gamma(2.0 - alpha)
    s.flags.writeable = False
    w.flags.writeable = False
    return s, w


def path_rule(length: float, alpha: float, panel: float, n: int = DEFAULT_NQUAD):
    """Nodes ``s`` and weights ``w`` with ``sum w g(s) ~ int_0^L g(s) s^(1-alpha) ds / Gamma(2-alpha)``.

    Parameters
    ----------
    length : float
        Path length ``L >= 0``; an empty rule is returned for ``L = 0``.
    alpha : float
        Order in (1, 2).
    panel : float
        Maximum panel width.
    n : int
        Points per panel.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"path rules need 1 < alpha < 2, got {alpha}")
    if panel <= 0.0:
        raise ValueError("panel width must be positive")
    return _path_rule(float(length), float(alpha), float(panel), int(n))


def _check_args(kernel: KernelSpec, alpha: float, side: str, n_quad: int) -> None:
    _reject_ps(kernel)
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if n_quad < 1:
        raise ValueError(f"quadrature order must be >= 1, got {n_quad}")


def fractional_derivative_matrix(
    kernel: KernelSpec,
    centers,
    points,
    axis: int,
    alpha: float,
    domain: Domain,
    side: str,
    n_quad: int = DEFAULT_NQUAD,
) -> np.ndarray:
    """``D[i, k]``: one-sided derivative of ``phi(|x - centers[k]|)`` at ``points[i]``.

    Points whose integral path has zero length get a zero row.
    """
    _check_args(kernel, alpha, side, n_quad)
    dim = domain.dim
    centers = _as_points(centers, dim)
    points = _as_points(points, dim)
    others = [m for m in range(dim) if m != axis]
    out = np.zeros((len(points), len(centers)))
    if alpha == 2.0:
        for i, x in enumerate(points):
            d = x[axis] - centers[:, axis]
            rho2 = np.sum((x[others] - centers[:, others]) ** 2, axis=1)
            out[i] = axis_second_derivative(kernel, d, rho2)
        return out
    lo, hi = domain.chord(points, axis)
    lengths = points[:, axis] - lo if side == "left" else hi - points[:, axis]
    lengths = np.maximum(lengths, 0.0)
    sign = -1.0 if side == "left" else 1.0
    for i, x in enumerate(points):
        if lengths[i] == 0.0:
            log.debug("zero-length %s path at node %d along axis %d", side, i, axis)
            continue
        s, w = path_rule(lengths[i], alpha, kernel.c, n_quad)
        xi = x[axis] + sign * s
        d = xi[:, None] - centers[None, :, axis]
        rho2 = np.sum((x[others] - centers[:, others]) ** 2, axis=1)
        out[i] = w @ axis_second_derivative(kernel, d, rho2[None, :])
    return out


def frac_deriv_rbf(
    kernel: KernelSpec,
    center,
    x,
    axis: int,
    alpha: float,
    domain: Domain,
    side: str = "left",
    n_quad: int = DEFAULT_NQUAD,
) -> float:
    """One-sided fractional derivative of order ``alpha`` of ``phi(|. - center|)`` at ``x``.

    ``alpha = 2`` returns the classical second partial; a zero-length
    integral path returns 0.
    """
    D = fractional_derivative_matrix(kernel, center, x, axis, alpha, domain, side, n_quad)
    return float(D[0, 0])
