"""Radial basis functions, their axis-wise derivatives and interpolation systems."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

__all__ = [
    "Family",
    "KernelSpec",
    "KernelPolicy",
    "ConditioningWarning",
    "IllConditionedError",
    "kernel_value",
    "kernel_partial",
    "kernel_second_partial",
    "shape_parameter",
    "InterpolationSystem",
    "build_interpolation_system",
    "check_condition",
    "condition_estimate",
    "WARN_CONDITION",
    "MAX_CONDITION",
]

WARN_CONDITION = 1e12
MAX_CONDITION = 1e15


class Family(enum.Enum):
    MQ = "MQ"
    IMQ = "IMQ"
    IQ = "IQ"
    GA = "GA"
    PS = "PS"


class ConditioningWarning(UserWarning):
    """Emitted when an RBF system is poorly conditioned but still solved."""


class IllConditionedError(np.linalg.LinAlgError):
    """Raised when an RBF system is singular to working precision."""


@dataclass(frozen=True)
class KernelSpec:
    """An RBF family with its shape parameter ``c`` (or exponent ``s`` for PS)."""

    family: Family
    c: float | None = None
    s: int = 1

    def __post_init__(self):
        fam = Family(self.family) if not isinstance(self.family, Family) else self.family
        object.__setattr__(self, "family", fam)
        if fam is Family.PS:
            if int(self.s) != self.s or self.s < 1:
                raise ValueError(f"PS exponent must be a positive integer, got {self.s}")
        elif self.c is None or not self.c > 0:
            raise ValueError(f"{fam.value} needs a positive shape parameter, got {self.c}")

    @property
    def augmented(self) -> bool:
        """Whether the interpolant carries a constant term (MQ and PS)."""
        return self.family in (Family.MQ, Family.PS)


@dataclass(frozen=True)
class KernelPolicy:
    """Family plus the shape-parameter rule ``c = nu / (M + 1)**(sigma / 4)``."""

    family: Family
    nu: float
    sigma: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.PS:
            raise ValueError("shape-parameter policies apply to MQ, IMQ, IQ and GA only")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")

    def resolve(self, M: int) -> KernelSpec:
        return KernelSpec(self.family, shape_parameter(self.nu, self.sigma, M))


def kernel_value(k: KernelSpec, r):
    """Evaluate the radial profile at distance ``r`` (vectorized)."""
    r = np.asarray(r, dtype=float)
    return _profile(k, r * r)


def _profile(k: KernelSpec, s):
    # s = r**2
    fam = k.family
    if fam is Family.PS:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.sqrt(s)
            out = (-1.0) ** (k.s + 1) * s**k.s * np.log(r)
        return np.where(s > 0.0, out, 0.0)
    c2 = k.c * k.c
    if fam is Family.MQ:
        return np.sqrt(s + c2)
    if fam is Family.IMQ:
        return 1.0 / np.sqrt(s + c2)
    if fam is Family.IQ:
        return 1.0 / (s + c2)
    return np.exp(-s / c2)


def _reject_ps(k: KernelSpec) -> None:
    if k.family is Family.PS:
        raise ValueError("polyharmonic splines are supported for interpolation only")


def axis_second_derivative(k: KernelSpec, d, rho2):
    """``d^2 phi / dx_l^2`` given the axis offset ``d`` and squared off-axis distance ``rho2``."""
    _reject_ps(k)
    d2 = d * d
    s = d2 + rho2
    c2 = k.c * k.c
    fam = k.family
    if fam is Family.MQ:
        q = s + c2
        return (rho2 + c2) / (q * np.sqrt(q))
    if fam is Family.IMQ:
        q = s + c2
        return (2.0 * d2 - rho2 - c2) / (q * q * np.sqrt(q))
    if fam is Family.IQ:
        q = s + c2
        return (6.0 * d2 - 2.0 * rho2 - 2.0 * c2) / (q * q * q)
    return (4.0 * d2 / c2 - 2.0) / c2 * np.exp(-s / c2)


def axis_first_derivative(k: KernelSpec, d, rho2):
    """``d phi / dx_l`` given the axis offset ``d`` and squared off-axis distance ``rho2``."""
    _reject_ps(k)
    s = d * d + rho2
    c2 = k.c * k.c
    fam = k.family
    if fam is Family.MQ:
        return d / np.sqrt(s + c2)
    if fam is Family.IMQ:
        q = s + c2
        return -d / (q * np.sqrt(q))
    if fam is Family.IQ:
        q = s + c2
        return -2.0 * d / (q * q)
    return -2.0 * d / c2 * np.exp(-s / c2)


def _offsets(center, x, axis):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x - center
    d = diff[..., axis]
    rho2 = np.sum(diff * diff, axis=-1) - d * d
    return d, np.maximum(rho2, 0.0)


def kernel_partial(k: KernelSpec, center, x, axis: int, m: int = 1):
    """Analytic ``m``-th partial (m = 1 or 2) of ``phi(|x - center|)`` along ``axis``."""
    d, rho2 = _offsets(center, x, axis)
    if m == 1:
        return axis_first_derivative(k, d, rho2)
    if m == 2:
        return axis_second_derivative(k, d, rho2)
    raise ValueError(f"only first and second partials are available, got m={m}")


def kernel_second_partial(k: KernelSpec, center, x, axis: int):
    """Analytic ``d^2/dx_axis^2`` of ``phi(|x - center|)`` at ``x``."""
    return kernel_partial(k, center, x, axis, m=2)


def shape_parameter(nu: float, sigma: int, M: int) -> float:
    """Shape parameter rule ``c = nu / (M + 1)**(sigma / 4)``."""
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    return nu / (M + 1) ** (sigma / 4.0)


def condition_estimate(lu_and_piv, anorm: float) -> float:
    """1-norm condition estimate from an LU factorization (LAPACK ``gecon``)."""
    lu = lu_and_piv[0]
    if not np.all(np.isfinite(lu)):
        return np.inf
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond == 0.0:
        return np.inf
    return 1.0 / rcond


def check_condition(cond: float, what: str, max_condition: float = MAX_CONDITION) -> None:
    if not cond < max_condition:
        raise IllConditionedError(f"{what} is singular to working precision (cond ~ {cond:.3e})")
    if cond > WARN_CONDITION:
        warnings.warn(f"{what} is ill-conditioned (cond ~ {cond:.3e})", ConditioningWarning, stacklevel=3)


def factor(matrix: np.ndarray, what: str, max_condition: float = MAX_CONDITION):
    """LU-factor ``matrix`` and apply the conditioning policy; returns ``(lu, piv), cond``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu = lu_factor(matrix, check_finite=True)
    cond = condition_estimate(lu, np.abs(matrix).sum(axis=0).max())
    check_condition(cond, what, max_condition)
    return lu, cond


def distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


@dataclass
class InterpolationSystem:
    """Kernel matrix ``A`` (and constant block ``B`` when augmented) on a node set.

    Solve with :meth:`fit`, evaluate the interpolant with :meth:`evaluate`.
    """

    kernel: KernelSpec
    centers: np.ndarray
    A: np.ndarray
    B: np.ndarray | None
    condition: float
    _lu: tuple = field(repr=False, default=None)

    @property
    def augmented(self) -> bool:
        return self.B is not None

    @property
    def matrix(self) -> np.ndarray:
        if self.B is None:
            return self.A
        q = self.B.shape[0]
        return np.block([[self.A, self.B.T], [self.B, np.zeros((q, q))]])

    def fit(self, values) -> np.ndarray:
        """Return ``lambda`` (and ``mu`` appended when augmented) for nodal data."""
        values = np.asarray(values, dtype=float)
        rhs = values
        if self.B is not None:
            pad = np.zeros((self.B.shape[0],) + values.shape[1:])
            rhs = np.concatenate([values, pad])
        return lu_solve(self._lu, rhs)

    def evaluate(self, coef, points) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.centers.shape[1])
        n = len(self.centers)
        vals = kernel_value(self.kernel, distance_matrix(points, self.centers)) @ coef[:n]
        if self.B is not None:
            vals = vals + coef[n]
        return vals


def build_interpolation_system(k: KernelSpec, nodes, max_condition: float = MAX_CONDITION) -> InterpolationSystem:
    """Assemble the interpolation system of ``k`` on ``nodes`` (a NodeSet or coordinate array)."""
    coords = np.asarray(getattr(nodes, "coords", nodes), dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    r = distance_matrix(coords, coords)
    off = r + np.diag(np.full(len(coords), np.inf))
    if len(coords) > 1 and off.min() == 0.0:
        raise ValueError("duplicate nodes in interpolation set")
    A = kernel_value(k, r)
    B = np.ones((1, len(coords))) if k.augmented else None
    system = InterpolationSystem(kernel=k, centers=coords, A=A, B=B, condition=np.nan)
    lu, cond = factor(system.matrix, f"{k.family.value} interpolation matrix", max_condition)
    system._lu = lu
    system.condition = cond
    return system
