"""Differential-quadrature weight matrices.

A weight matrix ``W`` approximates a linear derivative operator ``L`` by
``(L u)(x_i) ~ sum_j W[i, j] u(x_j)``.  The rows are fixed by requiring the
formula to be exact on the test functions ``phi_k``: ``W Phi^T = D`` with
``Phi[k, j] = phi_k(x_j)`` and ``D[i, k] = (L phi_k)(x_i)``.

IMQ, IQ and GA use ``phi_k = phi(|x - x_k|)``.  MQ uses the reduced set
``phi_0 = 1, phi_k = phi(|x - x_k|) - phi(|x - x_0|)`` so that constants are
differentiated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import lu_solve

from .geometry import Domain, NodeSet
from .kernels import (
    MAX_CONDITION,
    Family,
    KernelSpec,
    _reject_ps,
    distance_matrix,
    factor,
    kernel_partial,
    kernel_value,
)
from .quadrature import DEFAULT_NQUAD, fractional_derivative_matrix

__all__ = [
    "WeightMatrix",
    "BasisSystem",
    "basis_system",
    "build_fractional_weights",
    "build_integer_weights",
    "apply_weights",
    "dump_weights",
    "load_weights",
]


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Dense DQ weights for one derivative operator.

    ``side`` is ``'left'``/``'right'`` for fractional orders and
    ``'integer'`` for classical partials (then ``order`` is 1 or 2).
    """

    entries: np.ndarray
    axis: int
    order: float
    side: str
    condition: float = np.nan
    # exactness data kept for diagnostics: Phi and D on the test space
    _phi: np.ndarray | None = field(default=None, repr=False)
    _rhs: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {e.shape}")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    @property
    def M(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, u):
        return apply_weights(self, u)

    def exactness_residual(self) -> float:
        """``max |W Phi^T - D|`` over the test functions used to build ``W``."""
        if self._phi is None:
            raise ValueError("test-space data not stored")
        return float(np.abs(self.entries @ self._phi.T - self._rhs).max())


@dataclass(frozen=True, eq=False)
class BasisSystem:
    """Test-function values ``Phi[k, j] = phi_k(x_j)`` and their LU factors."""

    kernel: KernelSpec
    coords: np.ndarray
    phi: np.ndarray
    lu: tuple
    condition: float

    @property
    def reduced(self) -> bool:
        return self.kernel.family is Family.MQ

    def reduce(self, D: np.ndarray) -> np.ndarray:
        """Map derivatives of the plain kernels to derivatives of the test functions."""
        if not self.reduced:
            return D
        out = D - D[:, :1]
        out[:, 0] = 0.0
        return out

    def solve(self, D: np.ndarray) -> np.ndarray:
        # W Phi^T = D  <=>  Phi W^T = D^T
        return lu_solve(self.lu, D.T).T


def basis_system(nodes, kernel: KernelSpec, max_condition: float = MAX_CONDITION) -> BasisSystem:
    """Assemble and factor the test-function matrix on ``nodes``."""
    _reject_ps(kernel)
    coords = np.asarray(getattr(nodes, "coords", nodes), dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    r = distance_matrix(coords, coords)
    if len(coords) > 1 and (r + np.diag(np.full(len(coords), np.inf))).min() == 0.0:
        raise ValueError("duplicate nodes")
    phi = kernel_value(kernel, r)
    if kernel.family is Family.MQ:
        phi = phi - phi[:1]
        phi[0] = 1.0
    lu, cond = factor(phi, f"{kernel.family.value} test-function matrix", max_condition)
    return BasisSystem(kernel, coords, phi, lu, cond)


def build_fractional_weights(
    nodes: NodeSet,
    kernel: KernelSpec,
    alpha: float,
    axis: int,
    side: str,
    domain: Domain,
    n_quad: int = DEFAULT_NQUAD,
    max_condition: float = MAX_CONDITION,
    space: BasisSystem | None = None,
) -> WeightMatrix:
    """DQ weights of the left or right fractional derivative of order ``alpha`` along ``axis``.

    Parameters
    ----------
    nodes : NodeSet
    kernel : KernelSpec
        MQ, IMQ, IQ or GA.
    alpha : float
        Order in (1, 2]; ``alpha = 2`` gives classical second-derivative weights.
    axis : int
    side : {'left', 'right'}
    domain : Domain
        Supplies the integral-path endpoints.
    space : BasisSystem, optional
        Reuse a factorization shared with other operators on the same nodes.
    """
    sp = space if space is not None else basis_system(nodes, kernel, max_condition)
    D = fractional_derivative_matrix(kernel, sp.coords, sp.coords, axis, alpha, domain, side, n_quad)
    D = sp.reduce(D)
    return WeightMatrix(sp.solve(D), axis, float(alpha), side, sp.condition, sp.phi, D)


def build_integer_weights(
    nodes: NodeSet,
    kernel: KernelSpec,
    m: int,
    axis: int,
    max_condition: float = MAX_CONDITION,
    space: BasisSystem | None = None,
) -> WeightMatrix:
    """DQ weights of ``d^m / dx_axis^m`` for ``m`` in {1, 2}."""
    if m not in (1, 2):
        raise ValueError(f"integer order must be 1 or 2, got {m}")
    sp = space if space is not None else basis_system(nodes, kernel, max_condition)
    X = sp.coords
    # D[i, k] = d^m/dx^m phi(|x - x_k|) at x_i
    D = kernel_partial(kernel, X[None, :, :], X[:, None, :], axis, m)
    D = sp.reduce(D)
    return WeightMatrix(sp.solve(D), axis, float(m), "integer", sp.condition, sp.phi, D)


def apply_weights(W: WeightMatrix, u) -> np.ndarray:
    """Dense product ``W u`` (``u`` may carry trailing columns)."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != W.entries.shape[1]:
        raise ValueError(f"dimension mismatch: weights {W.entries.shape}, vector {u.shape}")
    return W.entries @ u


def dump_weights(path, W: WeightMatrix) -> None:
    """Row-major text dump; the header line holds ``M alpha axis side``."""
    header = f"M alpha axis side\n{W.M} {W.order!r} {W.axis} {W.side}"
    np.savetxt(path, W.entries, fmt="%.17e", header=header)


def load_weights(path) -> WeightMatrix:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2 or lines[0].strip("# ").split() != ["M", "alpha", "axis", "side"]:
        raise ValueError(f"{path} is not a weight-matrix dump")
    M, alpha, axis, side = lines[1].strip("# ").split()
    entries = np.loadtxt(path, ndmin=2)
    if entries.shape != (int(M) + 1, int(M) + 1):
        raise ValueError(f"expected {int(M) + 1} square rows, got {entries.shape}")
    return WeightMatrix(entries, int(axis), float(alpha), side)
