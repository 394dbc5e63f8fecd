"""Built-in benchmark problems with manufactured solutions.

Each entry of :data:`REGISTRY` bundles a problem factory with the default
discretization used to study it (kernel family, shape-parameter rule,
temporal order, step, node counts).  Node counts are listed as ``M``; the
node sets hold ``M + 1`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import gamma

from .fractional import MultiTermSpec
from .geometry import Ball, Ellipse, Interval, Rectangle, Triangle
from .kernels import Family, KernelPolicy
from .solver import Diffusion, ProblemSpec

__all__ = [
    "Example",
    "REGISTRY",
    "get_example",
    "riesz_coefficient",
    "ex62_problem",
    "ex63_problem",
    "ex64_problem",
    "ex65_problem",
    "ex66_problem",
    "ex68_problem",
    "plume_problem",
    "plume_initial",
]


def riesz_coefficient(alpha: float, scale: float = 1.0) -> float:
    """Coefficient ``-scale / (2 cos(alpha pi / 2))`` of each side of a Riesz-type operator.

    Positive for ``1 < alpha < 2``.
    """
    return -scale / (2.0 * math.cos(alpha * math.pi / 2.0))


def _caputo_time(terms: MultiTermSpec, p: float, t: float) -> float:
    # sum_r a_r D^theta_r t^p
    return sum(a * gamma(p + 1) / gamma(p + 1 - th) * t ** (p - th) for a, th in terms.terms)


# -- 1D ----------------------------------------------------------------------


def ex62_problem(alpha: float = 1.8) -> ProblemSpec:
    """``u_t = Gamma(5-alpha) x^alpha / 4 * D^alpha_+ u + f`` on [0, 2], ``u = 4 e^-t x^2 (2-x)^2``."""

    def exact(x, t):
        s = x[:, 0]
        return 4.0 * math.exp(-t) * s**2 * (2.0 - s) ** 2

    def source(x, t):
        s = x[:, 0]
        return -28.0 * math.exp(-t) * s**2 * (2.0 - s) ** 2 - 8.0 * math.exp(-t) * s**2 * (
            alpha * (alpha - 7.0) + 3.0 * alpha * s
        )

    return ProblemSpec(
        domain=Interval(0.0, 2.0),
        terms=MultiTermSpec.single(1.0),
        diffusion=(Diffusion(alpha, left=lambda x: gamma(5.0 - alpha) * x[:, 0] ** alpha / 4.0),),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.2",
    )


EX63_TERMS = MultiTermSpec(((1.0, 0.3), (1.0, 0.5), (1.0, 0.7), (1.0, 0.9)))


def ex63_problem(mu: float = 1.0, alpha: float = 1.2) -> ProblemSpec:
    """Four-term equation on [0, 1] with ``u = t^mu x^4`` and a left derivative of order ``alpha``."""
    terms = EX63_TERMS

    def exact(x, t):
        return t**mu * x[:, 0] ** 4

    def source(x, t):
        s = x[:, 0]
        return _caputo_time(terms, mu, t) * s**4 - 24.0 * t**mu * s ** (4.0 - alpha) / gamma(5.0 - alpha)

    return ProblemSpec(
        domain=Interval(0.0, 1.0),
        terms=terms,
        diffusion=(Diffusion(alpha, left=1.0),),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.3",
    )


# -- 2D ----------------------------------------------------------------------


def _two_sided_quartic(s, alpha):
    # left + right Caputo derivatives of s^2 (1 - s)^2 on [0, 1]
    r = 1.0 - s
    return (
        2.0 * (s ** (2 - alpha) + r ** (2 - alpha)) / gamma(3 - alpha)
        - 12.0 * (s ** (3 - alpha) + r ** (3 - alpha)) / gamma(4 - alpha)
        + 24.0 * (s ** (4 - alpha) + r ** (4 - alpha)) / gamma(5 - alpha)
    )


def ex64_problem(theta: float = 0.5, alpha: float = 1.6, beta: float = 1.6) -> ProblemSpec:
    """Riesz-type equation on the unit square, ``u = (1 + t^2) x^2 (1-x)^2 y^2 (1-y)^2``."""
    terms = MultiTermSpec.single(theta)

    def shape(x):
        return (x[:, 0] * (1 - x[:, 0]) * x[:, 1] * (1 - x[:, 1])) ** 2

    def exact(x, t):
        return (1.0 + t * t) * shape(x)

    def source(x, t):
        X, Y = x[:, 0], x[:, 1]
        time = 2.0 * t ** (2 - theta) / gamma(3 - theta) * shape(x)
        gx = (Y * (1 - Y)) ** 2 * _two_sided_quartic(X, alpha) / (2 * math.cos(alpha * math.pi / 2))
        gy = (X * (1 - X)) ** 2 * _two_sided_quartic(Y, beta) / (2 * math.cos(beta * math.pi / 2))
        return time + (1.0 + t * t) * (gx + gy)

    ex, ey = riesz_coefficient(alpha), riesz_coefficient(beta)
    return ProblemSpec(
        domain=Rectangle(0.0, 1.0, 0.0, 1.0),
        terms=terms,
        diffusion=(Diffusion(alpha, ex, ex), Diffusion(beta, ey, ey)),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.4",
    )


EX65_TERMS = MultiTermSpec(((2.0, 0.1), (0.5, 0.3), (3.0, 0.5)))


def ex65_problem(alpha: float = 1.5, beta: float = 1.8) -> ProblemSpec:
    """Three-term equation on the unit right triangle with ``u = t^3 x^2 y^2``."""
    terms = EX65_TERMS

    def exact(x, t):
        return t**3 * x[:, 0] ** 2 * x[:, 1] ** 2

    def source(x, t):
        base = x[:, 0] ** 2 * x[:, 1] ** 2
        return _caputo_time(terms, 3.0, t) * base - t**3 * base * (1 / gamma(3 - alpha) + 1 / gamma(3 - beta))

    return ProblemSpec(
        domain=Triangle(),
        terms=terms,
        diffusion=(
            Diffusion(alpha, left=lambda x: x[:, 0] ** alpha / 2.0),
            Diffusion(beta, left=lambda x: x[:, 1] ** beta / 2.0),
        ),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.5",
    )


EX66_TERMS = MultiTermSpec(((1.0, 0.6), (1.0, 0.7), (1.0, 1.0)))


def _ellipse_chord_derivatives(s, lo, hi, alpha):
    """Left + right derivatives along one axis of ``(k (s - lo)(s - hi))^2`` scaled to ``16 (s^2 - h^2)^2``.

    With ``h = hi = -lo`` the profile is ``16 xi^2 (xi + 2 lo)^2`` in ``xi = s - lo``
    and ``16 eta^2 (eta - 2 hi)^2`` in ``eta = hi - s``.
    """
    xi = np.maximum(s - lo, 0.0)
    eta = np.maximum(hi - s, 0.0)
    g3, g4, g5 = gamma(3 - alpha), gamma(4 - alpha), gamma(5 - alpha)
    left = 128 * lo**2 * xi ** (2 - alpha) / g3 + 384 * lo * xi ** (3 - alpha) / g4 + 384 * xi ** (4 - alpha) / g5
    right = 128 * hi**2 * eta ** (2 - alpha) / g3 - 384 * hi * eta ** (3 - alpha) / g4 + 384 * eta ** (4 - alpha) / g5
    return left + right


def ex66_problem(alpha: float = 1.6, beta: float = 1.6) -> ProblemSpec:
    """Riesz-type three-term equation on ``4x^2 + y^2 <= 1``, ``u = (1 + t^2)(4x^2 + y^2 - 1)^2 / 10``."""
    terms = EX66_TERMS
    domain = Ellipse((0.0, 0.0), (0.5, 1.0))

    def exact(x, t):
        return (1.0 + t * t) * (4 * x[:, 0] ** 2 + x[:, 1] ** 2 - 1.0) ** 2 / 10.0

    def source(x, t):
        X, Y = x[:, 0], x[:, 1]
        xl, xr = domain.chord(x, 0)
        yl, yr = domain.chord(x, 1)
        time = _caputo_time(terms, 2.0, t) / 10.0 * (4 * X**2 + Y**2 - 1.0) ** 2
        # (4x^2 + y^2 - 1)^2 = 16 (x^2 - xr^2)^2 along x and (y^2 - yr^2)^2 along y
        dx = _ellipse_chord_derivatives(X, xl, xr, alpha)
        dy = _ellipse_chord_derivatives(Y, yl, yr, beta) / 16.0
        return (
            time
            + (1 + t * t) / (20 * math.cos(alpha * math.pi / 2)) * dx
            + (1 + t * t) / (20 * math.cos(beta * math.pi / 2)) * dy
        )

    ex, ey = riesz_coefficient(alpha), riesz_coefficient(beta)
    return ProblemSpec(
        domain=domain,
        terms=terms,
        diffusion=(Diffusion(alpha, ex, ex), Diffusion(beta, ey, ey)),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.6",
    )


# -- 3D ----------------------------------------------------------------------

EX68_TERMS = MultiTermSpec(((0.5, 0.3), (1.5, 0.8)))


def ex68_problem(beta: float = 1.9) -> ProblemSpec:
    """Two-term equation on a ball with a variable-coefficient left derivative along y."""
    terms = EX68_TERMS
    domain = Ball((0.5, 0.5, 0.0), 0.5)

    def depth(x):
        # distance from the lower y-boundary along the y-chord
        lo, _ = domain.chord(x, 1)
        return np.maximum(x[:, 1] - lo, 0.0)

    def exact(x, t):
        return (1.0 + t**4) * depth(x) ** 3 * x[:, 2] ** 3

    def source(x, t):
        base = depth(x) ** 3 * x[:, 2] ** 3
        return _caputo_time(terms, 4.0, t) * base - (1.0 + t**4) * base / gamma(4.0 - beta)

    return ProblemSpec(
        domain=domain,
        terms=terms,
        diffusion=(
            Diffusion(2.0),
            Diffusion(beta, left=lambda x: depth(x) ** beta / 6.0),
            Diffusion(2.0),
        ),
        source=source,
        initial=lambda x: exact(x, 0.0),
        boundary=exact,
        exact=exact,
        name="6.8",
    )


# -- plume ---------------------------------------------------------------------


def plume_initial(x) -> np.ndarray:
    """Compactly supported bump of height 1000 and radius 0.2 centred at (0.5, 0.5)."""
    g = 1.0 - ((x[:, 0] - 0.5) ** 2 + (x[:, 1] - 0.5) ** 2) / 0.04
    out = np.zeros(len(x))
    inside = g > 0
    out[inside] = 1000.0 * 2.0 ** (1.0 - 1.0 / g[inside])
    return out


def plume_problem(alpha: float = 1.9, beta: float | None = None, velocity: float = 0.012) -> ProblemSpec:
    """Advection plus two-sided fractional diffusion on [0, 4] x [0, 1] with zero boundary data."""
    beta = alpha if beta is None else beta
    ex = riesz_coefficient(alpha, 0.03 / (2.0 * math.pi))
    ey = riesz_coefficient(beta, 0.03 / (2.0 * math.pi))
    return ProblemSpec(
        domain=Rectangle(0.0, 4.0, 0.0, 1.0),
        terms=MultiTermSpec.single(1.0),
        diffusion=(Diffusion(alpha, ex, ex), Diffusion(beta, ey, ey)),
        initial=plume_initial,
        advection=(velocity, 0),
        name="plume",
    )


# -- registry ----------------------------------------------------------------


@dataclass(frozen=True)
class Example:
    """Default study setup for one benchmark.

    ``kind`` is ``'derivative'`` (operator accuracy only), ``'pde'`` (space
    sweep against a manufactured solution) or ``'plume'``.  ``nodes`` is
    ``'cgl'``, ``'equispaced'``, ``'generated'`` or ``'grid'``.  ``reference``
    holds reference L2 errors aligned with ``sizes``, for comparison only.
    """

    id: str
    kind: str
    description: str
    kernel: KernelPolicy
    sizes: tuple[int, ...]
    factory: Callable[..., ProblemSpec] | None = None
    params: dict = field(default_factory=dict)
    q: int = 1
    tau: float = 1e-3
    T: float = 1.0
    nodes: str = "cgl"
    seed: int = 0
    max_condition: float | None = None
    reference: tuple[float, ...] = ()

    def problem(self, **overrides) -> ProblemSpec:
        if self.factory is None:
            raise ValueError(f"example {self.id} has no PDE")
        return self.factory(**{**self.params, **overrides})

    def with_overrides(self, **kw) -> "Example":
        params = dict(self.params)
        for key in list(kw):
            if key in ("alpha", "beta", "mu", "theta"):
                params[key] = kw.pop(key)
        kernel = self.kernel
        if any(k in kw for k in ("family", "nu", "sigma")):
            kernel = KernelPolicy(
                kw.pop("family", kernel.family), kw.pop("nu", kernel.nu), kw.pop("sigma", kernel.sigma)
            )
        return replace(self, params=params, kernel=kernel, **kw)


REGISTRY: dict[str, Example] = {
    e.id: e
    for e in [
        Example(
            "6.1a",
            "derivative",
            "left derivative of (x+1)^2 of order 1.5 on [-1, 1]",
            KernelPolicy(Family.IMQ, 1.3, 1),
            (10, 15, 20, 25),
            params={"alpha": 1.5, "mu": 2.0},
            reference=(1.8198e-01, 3.0272e-02, 7.5563e-03, 2.4133e-03),
        ),
        Example(
            "6.1b",
            "derivative",
            "left derivative of (x+1)^mu of order 1.1 (weak regularity)",
            KernelPolicy(Family.IMQ, 0.9, 1),
            (10, 15, 20, 25),
            params={"alpha": 1.1, "mu": 1.5},
            reference=(1.7201e-01, 9.4085e-02, 6.6809e-02, 5.8687e-02),
        ),
        Example(
            "6.2",
            "pde",
            "variable-coefficient space-fractional diffusion on [0, 2]",
            KernelPolicy(Family.MQ, 0.4, 1),
            (3, 7, 15, 31),
            factory=ex62_problem,
            q=1,
            tau=1.0 / 600.0,
            T=1.0,
            reference=(4.0201e-01, 1.3893e-01, 9.0354e-03, 4.6974e-04),
        ),
        Example(
            "6.3",
            "pde",
            "four-term time-fractional equation on [0, 1]",
            KernelPolicy(Family.MQ, 0.1, 1),
            (10, 15, 20, 25),
            factory=ex63_problem,
            params={"mu": 1.0},
            q=1,
            tau=5e-5,
            T=0.5,
            reference=(1.4636e-03, 3.9252e-04, 1.4515e-04, 5.8617e-05),
        ),
        Example(
            "6.4",
            "pde",
            "Riesz-type single-term equation on the unit square",
            KernelPolicy(Family.IMQ, 8.0, 2),
            (24, 80, 288, 1088),
            factory=ex64_problem,
            q=2,
            tau=1e-3,
            T=1.0,
            nodes="grid",
            max_condition=np.inf,
            reference=(2.4378e-04, 7.7419e-05, 2.1523e-05, 6.5475e-06),
        ),
        Example(
            "6.5",
            "pde",
            "three-term equation on a right triangle",
            KernelPolicy(Family.MQ, 0.3, 1),
            (55, 79, 114, 152),
            factory=ex65_problem,
            q=3,
            tau=1e-3,
            T=0.5,
            nodes="generated",
            max_condition=np.inf,
            reference=(5.7083e-05, 4.4719e-05, 3.8698e-05, 2.9558e-05),
        ),
        Example(
            "6.6",
            "pde",
            "Riesz-type three-term equation on an ellipse",
            KernelPolicy(Family.IQ, 11.0, 2),
            (34, 112, 238, 412),
            factory=ex66_problem,
            q=2,
            tau=1e-3,
            T=1.0,
            nodes="generated",
            max_condition=np.inf,
            reference=(7.4516e-03, 1.2389e-03, 6.6484e-04, 4.2034e-04),
        ),
        Example(
            "6.8",
            "pde",
            "two-term equation on a ball, one-sided derivative along y",
            KernelPolicy(Family.MQ, 3.0, 1),
            (73, 101, 180, 336),
            factory=ex68_problem,
            q=4,
            tau=1e-3,
            T=0.5,
            nodes="generated",
            max_condition=np.inf,
            reference=(1.7998e-04, 1.2964e-04, 5.7266e-05, 2.1243e-05),
        ),
        Example(
            "plume",
            "plume",
            "advection and two-sided fractional diffusion of a contaminant plume",
            KernelPolicy(Family.IMQ, 9.0, 2),
            (1104,),
            factory=plume_problem,
            params={"alpha": 1.9},
            q=2,
            tau=1e-3,
            T=3.0,
            nodes="generated",
            max_condition=np.inf,
        ),
    ]
}


def get_example(example_id: str) -> Example:
    try:
        return REGISTRY[example_id]
    except KeyError:
        raise KeyError(f"unknown example {example_id!r}; choose from {', '.join(REGISTRY)}") from None
