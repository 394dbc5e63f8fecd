"""Fully discrete DQ scheme for multi-term time-space-fractional diffusion.

The model is

    sum_r a_r D_t^{theta_r} u + v du/dx_m
        = sum_l [eps+_l(x) D^{alpha_l}_{l,+} u + eps-_l(x) D^{alpha_l}_{l,-} u] + f

with Dirichlet data on the boundary.  Time is discretized by the
Caputo-corrected Lubich operator of order ``q`` and space by DQ weights, so
every step solves the same dense system

    S = c_0 I - sum_l diag(eps+_l) W+_l - sum_l diag(eps-_l) W-_l + v W^1_m

with boundary rows replaced by identity rows.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import lu_solve
from scipy.spatial import cKDTree

from .fractional import SUPPORTED_ORDERS, MultiTermSpec, memory_kernel
from .geometry import Domain, NodeSet
from .kernels import MAX_CONDITION, KernelPolicy, KernelSpec, factor
from .quadrature import DEFAULT_NQUAD
from .weights import WeightMatrix, basis_system, build_fractional_weights, build_integer_weights

__all__ = [
    "Diffusion",
    "ProblemSpec",
    "SchemeConfig",
    "SolutionHistory",
    "LinearSystem",
    "build_weights",
    "mirror_permutation",
    "assemble_system",
    "step",
    "run",
    "perturbation_stability_check",
    "constant",
]

log = logging.getLogger(__name__)

Field = Callable[[np.ndarray], np.ndarray]
TimeField = Callable[[np.ndarray, float], np.ndarray]


def constant(value: float) -> Field:
    """Coefficient function returning ``value`` at every point."""

    def f(x):
        return np.full(len(x), float(value))

    f.value = float(value)
    return f


def zero_field(x, t=0.0):
    return np.zeros(len(x))


@dataclass(frozen=True)
class Diffusion:
    """Order and left/right coefficient functions for one axis.

    A side whose coefficient is ``None`` is absent from the operator.
    Plain numbers are accepted and wrapped as constants.
    """

    alpha: float
    left: Field | float | None = None
    right: Field | float | None = None

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(f"space-fractional order must lie in (1, 2], got {self.alpha}")
        for name in ("left", "right"):
            v = getattr(self, name)
            if v is not None and not callable(v):
                object.__setattr__(self, name, constant(v))

    def sides(self):
        out = []
        if self.left is not None:
            out.append(("left", self.left))
        if self.right is not None:
            out.append(("right", self.right))
        return out


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A multi-term TSFPDE instance with Dirichlet boundary data.

    ``source(x, t)``, ``initial(x)``, ``boundary(x, t)`` and ``exact(x, t)``
    take an ``(n, d)`` array of points.  ``advection=(v, axis)`` adds
    ``v du/dx_axis`` to the left-hand side.
    """

    domain: Domain
    terms: MultiTermSpec
    diffusion: tuple[Diffusion, ...]
    source: TimeField = zero_field
    initial: Field = zero_field
    boundary: TimeField = zero_field
    advection: tuple[float, int] | None = None
    exact: TimeField | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "diffusion", tuple(self.diffusion))
        if len(self.diffusion) != self.domain.dim:
            raise ValueError(f"need one Diffusion entry per axis ({self.domain.dim}), got {len(self.diffusion)}")
        if self.advection is not None and not 0 <= self.advection[1] < self.domain.dim:
            raise ValueError(f"advection axis {self.advection[1]} out of range")

    @property
    def dim(self) -> int:
        return self.domain.dim


@dataclass(frozen=True)
class SchemeConfig:
    """Time step, final time, operator order and spatial discretization."""

    q: int
    tau: float
    T: float
    kernel: KernelPolicy | KernelSpec
    n_quad: int = DEFAULT_NQUAD
    max_condition: float = MAX_CONDITION

    def __post_init__(self):
        if self.q not in SUPPORTED_ORDERS:
            raise ValueError(f"q must be one of {SUPPORTED_ORDERS}, got {self.q}")
        if not self.tau > 0 or not self.T > 0:
            raise ValueError("tau and T must be positive")
        ratio = self.T / self.tau
        if abs(ratio - round(ratio)) > 1e-8 * max(1.0, ratio):
            raise ValueError(f"T / tau = {ratio} is not an integer")

    @property
    def N(self) -> int:
        return int(round(self.T / self.tau))

    def kernel_for(self, nodes: NodeSet) -> KernelSpec:
        if isinstance(self.kernel, KernelSpec):
            return self.kernel
        return self.kernel.resolve(nodes.M)


@dataclass(frozen=True, eq=False)
class SolutionHistory:
    """Nodal solutions ``u^0 .. u^N`` (rows of ``values``) at ``times``."""

    nodes: NodeSet
    times: np.ndarray
    values: np.ndarray
    seconds: float = 0.0

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def at(self, t: float) -> np.ndarray:
        """Solution at the stored time level closest to ``t``."""
        n = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[n] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t = {t} is not a time level")
        return self.values[n]


@dataclass(eq=False)
class LinearSystem:
    """The factored step matrix together with the memory kernel."""

    matrix: np.ndarray
    nodes: NodeSet
    memory: np.ndarray
    condition: float
    _lu: tuple = field(repr=False, default=None)

    @property
    def c0(self) -> float:
        return float(self.memory[0])

    def solve(self, rhs):
        return lu_solve(self._lu, rhs)


def mirror_permutation(nodes: NodeSet, axis: int, value: float, tol: float = 1e-12) -> np.ndarray:
    """Index map ``P`` with ``nodes[P[i]]`` the reflection of ``nodes[i]`` about ``x_axis = value``.

    Raises ``ValueError`` if the node set (or its boundary mask) is not symmetric.
    """
    X = nodes.coords
    Y = X.copy()
    Y[:, axis] = 2.0 * value - Y[:, axis]
    dist, P = cKDTree(X).query(Y)
    if dist.max() > tol or len(np.unique(P)) != len(P):
        raise ValueError(f"node set is not symmetric about x_{axis} = {value}")
    if np.any(nodes.boundary[P] != nodes.boundary):
        raise ValueError("boundary mask is not symmetric")
    return P


def build_weights(
    problem: ProblemSpec,
    nodes: NodeSet,
    cfg: SchemeConfig,
    mirror: tuple[int, float] | None = None,
) -> dict:
    """All weight matrices the problem needs, keyed by ``(axis, side)``.

    Fractional operators use ``side`` in {'left', 'right'}; the advection
    operator is stored under ``(axis, 'integer')``.

    With ``mirror=(axis, value)`` and a node set symmetric under that
    reflection, the right-side weights along ``axis`` are taken as the
    reflected left-side weights and every other operator is averaged with
    its reflection.  Both are identities in exact arithmetic; they keep the
    discrete operator exactly symmetric so rounding in ill-conditioned
    weight solves cannot break the symmetry of the computed field.
    """
    kernel = cfg.kernel_for(nodes)
    space = basis_system(nodes, kernel, cfg.max_condition)
    P = None
    if mirror is not None:
        P = mirror_permutation(nodes, *mirror)
        d = problem.diffusion[mirror[0]]
        if (d.left is None) != (d.right is None):
            raise ValueError("a one-sided operator along the mirror axis is not reflection invariant")
    out = {}
    for axis, diff in enumerate(problem.diffusion):
        for side, _ in diff.sides():
            if P is not None and axis == mirror[0] and side == "right":
                continue
            out[(axis, side)] = build_fractional_weights(
                nodes, kernel, diff.alpha, axis, side, problem.domain, cfg.n_quad, space=space
            )
    if problem.advection is not None:
        axis = problem.advection[1]
        out[(axis, "integer")] = build_integer_weights(nodes, kernel, 1, axis, space=space)
    if P is not None:
        for (axis, side), W in list(out.items()):
            E = W.entries
            R = E[np.ix_(P, P)]
            if axis != mirror[0]:
                out[(axis, side)] = replace(W, entries=0.5 * (E + R), _rhs=None)
            elif side == "left":
                out[(axis, "right")] = replace(W, entries=R, side="right", _rhs=None)
            else:
                # first derivative along the mirror axis is odd under reflection
                out[(axis, side)] = replace(W, entries=0.5 * (E - R), _rhs=None)
    return out


def assemble_system(problem: ProblemSpec, nodes: NodeSet, cfg: SchemeConfig, weights: dict) -> LinearSystem:
    """Assemble and factor the step matrix ``S``."""
    x = nodes.coords
    memory = memory_kernel(problem.terms, cfg.q, cfg.tau, cfg.N)
    S = memory[0] * np.eye(len(x))
    for axis, diff in enumerate(problem.diffusion):
        for side, eps in diff.sides():
            key = (axis, side)
            if key not in weights:
                raise KeyError(f"missing weight matrix for axis {axis}, side {side}")
            S -= np.asarray(eps(x), dtype=float)[:, None] * weights[key].entries
    if problem.advection is not None:
        v, axis = problem.advection
        key = (axis, "integer")
        if key not in weights:
            raise KeyError(f"missing first-derivative weights for axis {axis}")
        S += v * weights[key].entries
    b = np.flatnonzero(nodes.boundary)
    S[b] = 0.0
    S[b, b] = 1.0
    lu, cond = factor(S, "step matrix", cfg.max_condition)
    return LinearSystem(S, nodes, memory, cond, lu)


def step(system: LinearSystem, history: np.ndarray, problem: ProblemSpec, cfg: SchemeConfig, n: int) -> np.ndarray:
    """Compute ``u^n`` from ``history`` rows ``u^0 .. u^{n-1}``."""
    if n < 1 or len(history) < n:
        raise ValueError(f"history must hold u^0..u^{n - 1}")
    c = system.memory
    x = system.nodes.coords
    t = n * cfg.tau
    rhs = np.array(problem.source(x, t), dtype=float)
    if n > 1:
        # sum_{k=1}^{n-1} c_k u^{n-k}
        rhs -= c[n - 1 : 0 : -1] @ history[1:n]
    rhs += c[:n].sum() * history[0]
    b = system.nodes.boundary
    g = np.asarray(problem.boundary(x[b], t), dtype=float)
    rhs[b] = g
    u = system.solve(rhs)
    u[b] = g
    return u


def run(
    problem: ProblemSpec,
    nodes: NodeSet,
    cfg: SchemeConfig,
    weights: dict | None = None,
    initial: np.ndarray | None = None,
    mirror: tuple[int, float] | None = None,
) -> SolutionHistory:
    """Advance the scheme from ``t = 0`` to ``T``.

    ``initial`` overrides the nodal initial vector (used by the stability
    probe); ``mirror`` is passed to :func:`build_weights`.
    """
    t0 = time.perf_counter()
    if weights is None:
        weights = build_weights(problem, nodes, cfg, mirror)
    system = assemble_system(problem, nodes, cfg, weights)
    N = cfg.N
    U = np.empty((N + 1, len(nodes)))
    U[0] = problem.initial(nodes.coords) if initial is None else initial
    for n in range(1, N + 1):
        U[n] = step(system, U, problem, cfg, n)
    U.flags.writeable = False
    times = cfg.tau * np.arange(N + 1)
    secs = time.perf_counter() - t0
    log.info("%s: %d nodes, %d steps in %.2f s", problem.name or "run", len(nodes), N, secs)
    return SolutionHistory(nodes, times, U, secs)


def perturbation_stability_check(
    problem: ProblemSpec,
    nodes: NodeSet,
    cfg: SchemeConfig,
    delta: float,
    seed: int = 0,
    weights: dict | None = None,
) -> float:
    """Amplification of an initial perturbation, ``max_n ||U'^n - U^n|| / ||delta r||``.

    The perturbation ``delta * r`` (``r`` standard normal, zero on boundary
    nodes) is added to the initial data and both trajectories are advanced;
    the maximum is taken over ``n = 1..N`` in the discrete L2 norm.
    """
    if cfg.q != 1:
        raise ValueError("the stability probe is defined for q = 1")
    if delta == 0.0:
        return 0.0
    if weights is None:
        weights = build_weights(problem, nodes, cfg)
    rng = np.random.default_rng(seed)
    r = rng.standard_normal(len(nodes))
    r[nodes.boundary] = 0.0
    u0 = np.asarray(problem.initial(nodes.coords), dtype=float)
    base = run(problem, nodes, cfg, weights)
    pert = run(problem, nodes, cfg, weights, initial=u0 + delta * r)
    diff = pert.values[1:] - base.values[1:]
    num = np.sqrt(np.mean(diff**2, axis=1)).max()
    den = math.sqrt(np.mean((delta * r) ** 2))
    return float(num / den)
