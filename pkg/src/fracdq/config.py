"""Flat ``key = value`` run configurations.

A config either names a built-in example and overrides some of its
parameters, or describes a problem directly::

    # 1D, left derivative only
    domain = interval 0 1
    orders = 1.5
    terms = 1:1, 0.5:0.5
    eps_left = 1
    source = 0
    initial = sin(pi * x)
    boundary = 0
    kernel = MQ
    nu = 0.3
    q = 2
    tau = 1e-3
    T = 0.5
    M = 20
    layout = cgl

Keys (``-`` and ``_`` are interchangeable, ``#`` starts a comment):

example
    Registry id; problem and defaults come from the example.
domain
    ``interval a b``, ``rectangle x0 x1 y0 y1``, ``box x0 x1 y0 y1 z0 z1``,
    ``triangle x1 y1 x2 y2 x3 y3``, ``tetrahedron`` (12 numbers),
    ``ellipse cx cy a b``, ``ellipsoid cx cy cz a b c`` or ``ball cx cy cz r``.
orders
    Space-fractional order per axis, each in (1, 2].
terms
    Comma-separated ``a:theta`` pairs of the multi-term time operator.
eps_left, eps_right
    Constant coefficient per axis (one value is broadcast); 0 drops the side.
advection
    ``v axis``.
source, initial, boundary, exact
    Numpy expressions in ``x, y, z, t`` (``exact`` is optional).
kernel, nu, sigma
    Test-function family and shape-parameter policy ``c = nu / (M+1)^(sigma/4)``.
q, tau, T, n_quad, max_condition
    Scheme settings.
M, taus
    Node counts (``M + 1`` nodes) and step sizes for sweeps.
layout
    ``cgl``, ``equispaced``, ``grid`` or ``generated``.
seed, nodes_file
    Node generator seed or a node file that replaces generation.
alpha, beta, mu, theta
    Example parameters (only with ``example``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
from scipy.special import gamma

from .fractional import MultiTermSpec
from .geometry import (
    Ball,
    Box,
    Domain,
    Ellipse,
    Ellipsoid,
    Interval,
    NodeSet,
    Rectangle,
    Tetrahedron,
    Triangle,
    chebyshev_gauss_lobatto,
    equispaced_nodes,
    generate_nodes,
    grid_nodes,
    read_nodes,
)
from .harness import _config, example_nodes
from .kernels import MAX_CONDITION, Family, KernelPolicy
from .problems import get_example
from .solver import Diffusion, ProblemSpec, SchemeConfig

__all__ = ["RunConfig", "load_config", "parse_config", "make_domain", "compile_field"]

_DOMAINS = {
    "interval": (2, lambda v: Interval(*v)),
    "rectangle": (4, lambda v: Rectangle(*v)),
    "box": (6, lambda v: Box(*v)),
    "triangle": (6, lambda v: Triangle(np.reshape(v, (3, 2)))),
    "tetrahedron": (12, lambda v: Tetrahedron(np.reshape(v, (4, 3)))),
    "ellipse": (4, lambda v: Ellipse(v[:2], v[2:])),
    "ellipsoid": (6, lambda v: Ellipsoid(v[:3], v[3:])),
    "ball": (4, lambda v: Ball(v[:3], v[3])),
}

# names visible inside field expressions
_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sinh", "cosh", "where", "maximum", "minimum")
}
_NAMESPACE.update(pi=math.pi, e=math.e, gamma=gamma, np=np)


def make_domain(text: str) -> Domain:
    """Build a domain from ``'<kind> <numbers...>'``."""
    parts = text.split()
    if not parts or parts[0].lower() not in _DOMAINS:
        raise ValueError(f"unknown domain {text!r}; expected one of {sorted(_DOMAINS)}")
    n, build = _DOMAINS[parts[0].lower()]
    values = [float(v) for v in parts[1:]]
    if len(values) != n:
        raise ValueError(f"domain {parts[0]} takes {n} numbers, got {len(values)}")
    return build(values)


def compile_field(expr: str, dim: int):
    """Vectorized ``f(points, t=0)`` from a numpy expression in ``x, y, z, t``."""
    code = compile(expr, "<config>", "eval")
    for name in code.co_names:
        if name not in _NAMESPACE and name not in ("x", "y", "z", "t"):
            raise ValueError(f"unknown name {name!r} in expression {expr!r}")

    def f(points, t=0.0):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        env = dict(_NAMESPACE, t=float(t))
        for k, name in enumerate("xyz"[:dim]):
            env[name] = points[:, k]
        val = eval(code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(val, dtype=float), (len(points),)).copy()

    f.expression = expr
    return f


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


@dataclass
class RunConfig:
    """Parsed configuration; unset keys are ``None`` and fall back to defaults."""

    example: str | None = None
    domain: str | None = None
    orders: list[float] | None = None
    terms: list[tuple[float, float]] | None = None
    eps_left: list[float] | None = None
    eps_right: list[float] | None = None
    advection: tuple[float, int] | None = None
    source: str | None = None
    initial: str | None = None
    boundary: str | None = None
    exact: str | None = None
    kernel: str | None = None
    nu: float | None = None
    sigma: int | None = None
    q: int | None = None
    tau: float | None = None
    T: float | None = None
    n_quad: int | None = None
    max_condition: float | None = None
    M: list[int] | None = None
    taus: list[float] | None = None
    layout: str | None = None
    seed: int | None = None
    nodes_file: str | None = None
    alpha: float | None = None
    beta: float | None = None
    mu: float | None = None
    theta: float | None = None

    # -- derived objects ---------------------------------------------------

    def _example(self):
        if self.example is None:
            return None
        kw = {k: getattr(self, k) for k in ("alpha", "beta", "mu", "theta", "q", "tau", "T", "nu", "sigma", "seed")}
        kw = {k: v for k, v in kw.items() if v is not None}
        if self.kernel is not None:
            kw["family"] = Family(self.kernel.upper())
        if self.layout is not None:
            kw["nodes"] = self.layout
        if self.M is not None:
            kw["sizes"] = tuple(self.M)
        if self.max_condition is not None:
            kw["max_condition"] = self.max_condition
        return get_example(self.example).with_overrides(**kw)

    def problem(self) -> ProblemSpec:
        ex = self._example()
        if ex is not None:
            return ex.problem()
        missing = [k for k in ("domain", "orders") if getattr(self, k) is None]
        if missing:
            raise ValueError(f"config needs {', '.join(missing)} (or an example id)")
        dom = make_domain(self.domain)
        d = dom.dim
        orders = _per_axis(self.orders, d, "orders")
        left = _per_axis(self.eps_left if self.eps_left is not None else [1.0], d, "eps_left")
        right = _per_axis(self.eps_right if self.eps_right is not None else [0.0], d, "eps_right")
        diffusion = tuple(
            Diffusion(a, lv if lv != 0.0 else None, rv if rv != 0.0 else None)
            for a, lv, rv in zip(orders, left, right)
        )
        terms = MultiTermSpec(tuple(self.terms)) if self.terms else MultiTermSpec.single(1.0)
        src = compile_field(self.source or "0", d)
        ini = compile_field(self.initial or "0", d)
        bnd = compile_field(self.boundary or "0", d)
        exact = compile_field(self.exact, d) if self.exact else None
        return ProblemSpec(
            domain=dom,
            terms=terms,
            diffusion=diffusion,
            source=src,
            initial=lambda x: ini(x, 0.0),
            boundary=bnd,
            advection=self.advection,
            exact=exact,
            name="config",
        )

    def scheme(self) -> SchemeConfig:
        ex = self._example()
        if ex is not None:
            cfg = _config(ex)
            return cfg if self.n_quad is None else replace(cfg, n_quad=self.n_quad)
        missing = [k for k in ("tau", "T") if getattr(self, k) is None]
        if missing:
            raise ValueError(f"config needs {', '.join(missing)}")
        family = Family((self.kernel or "MQ").upper())
        return SchemeConfig(
            q=self.q or 1,
            tau=self.tau,
            T=self.T,
            kernel=KernelPolicy(family, self.nu if self.nu is not None else 1.0, self.sigma if self.sigma is not None else 1),
            n_quad=self.n_quad or 30,
            max_condition=self.max_condition if self.max_condition is not None else MAX_CONDITION,
        )

    def sizes(self) -> list[int]:
        ex = self._example()
        if ex is not None:
            return list(ex.sizes)
        if not self.M:
            raise ValueError("config needs M")
        return list(self.M)

    def nodes(self, M: int, problem: ProblemSpec | None = None) -> NodeSet:
        """Node set with ``M + 1`` points (or the nodes file when given)."""
        if self.nodes_file:
            return read_nodes(self.nodes_file)
        problem = problem or self.problem()
        ex = self._example()
        if ex is not None:
            return example_nodes(ex, M, problem.domain)
        dom = problem.domain
        layout = self.layout or ("cgl" if dom.dim == 1 else "generated")
        if layout in ("cgl", "equispaced"):
            if not isinstance(dom, Interval):
                raise ValueError(f"layout {layout!r} needs an interval domain")
            make = chebyshev_gauss_lobatto if layout == "cgl" else equispaced_nodes
            return make(dom.a, dom.b_, M)
        if layout == "grid":
            n = round((M + 1) ** (1.0 / dom.dim))
            if n**dom.dim != M + 1:
                raise ValueError(f"M + 1 = {M + 1} is not a perfect power for a grid layout")
            return grid_nodes(dom, [n] * dom.dim)
        if layout == "generated":
            return generate_nodes(dom, M + 1, seed=self.seed or 0)
        raise ValueError(f"unknown layout {layout!r}")

    def to_text(self) -> str:
        """Serialize back to the key-value format (set keys only)."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "terms":
                v = ", ".join(f"{a!r}:{th!r}" for a, th in v)
            elif f.name == "advection":
                v = f"{v[0]!r} {v[1]}"
            elif isinstance(v, list):
                v = " ".join(repr(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _per_axis(values, dim: int, name: str) -> list[float]:
    values = list(values)
    if len(values) == 1:
        values = values * dim
    if len(values) != dim:
        raise ValueError(f"{name} needs 1 or {dim} values, got {len(values)}")
    return [float(v) for v in values]


def _parse_terms(text: str):
    out = []
    for item in text.split(","):
        a, _, th = item.partition(":")
        if not th:
            raise ValueError(f"term {item.strip()!r} is not of the form a:theta")
        out.append((float(a), float(th)))
    return out


_CONVERT = {
    "orders": _floats,
    "terms": _parse_terms,
    "eps_left": _floats,
    "eps_right": _floats,
    "advection": lambda s: (float(s.split()[0]), int(s.split()[1])),
    "nu": float,
    "sigma": int,
    "q": int,
    "tau": float,
    "T": float,
    "n_quad": int,
    "max_condition": float,
    "M": lambda s: [int(v) for v in _floats(s)],
    "taus": _floats,
    "seed": int,
    "alpha": float,
    "beta": float,
    "mu": float,
    "theta": float,
}


def parse_config(text: str) -> RunConfig:
    """Parse config text; unknown keys raise ``ValueError``."""
    names = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key = key.strip().replace("-", "_")
        key = key.upper() if key.lower() in ("t", "m") else key.lower()
        if key not in names:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        val = val.strip()
        try:
            values[key] = _CONVERT.get(key, str)(val)
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
