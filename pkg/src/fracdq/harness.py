"""Error norms, convergence sweeps, report/field exporters and example runners."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .fractional import frac_deriv_power, gl_fractional_derivative
from .geometry import (
    Domain,
    Interval,
    NodeSet,
    chebyshev_gauss_lobatto,
    equispaced_nodes,
    generate_nodes,
    grid_nodes,
)
from .kernels import MAX_CONDITION, ConditioningWarning, Family, KernelSpec, build_interpolation_system, distance_matrix
from .problems import Example, get_example
from .solver import ProblemSpec, SchemeConfig, SolutionHistory, build_weights, mirror_permutation, run
from .weights import build_fractional_weights

__all__ = [
    "error_norms",
    "convergence_rate",
    "ReportRow",
    "RunReport",
    "FieldDump",
    "field_dump",
    "export",
    "parse",
    "sweep",
    "derivative_sweep",
    "gl_sweep",
    "example_nodes",
    "run_example",
    "ExampleResult",
    "REPORT_HEADER",
]

log = logging.getLogger(__name__)

REPORT_HEADER = ("parameter", "l2", "linf", "rate", "seconds")
_FMT = "%.15e"


def error_norms(u_exact, u_num, M: int | None = None) -> tuple[float, float]:
    """Discrete ``L2 = sqrt(sum e^2 / (M + 1))`` and ``Linf = max |e|``."""
    u_exact = np.asarray(u_exact, dtype=float)
    u_num = np.asarray(u_num, dtype=float)
    if u_exact.shape != u_num.shape:
        raise ValueError(f"length mismatch: {u_exact.shape} vs {u_num.shape}")
    if M is None:
        M = len(u_exact) - 1
    e = u_exact - u_num
    return float(np.sqrt(np.sum(e * e) / (M + 1))), float(np.max(np.abs(e), initial=0.0))


def convergence_rate(e1: float, e2: float, p1: float, p2: float, kind: str = "space") -> float:
    """Observed order ``log2(e1/e2) / log2(p2/p1)``.

    For ``kind='time'`` the parameters are step sizes and enter as ``1/tau``,
    so halving the step with halved error gives +1.
    """
    if not (e1 > 0 and e2 > 0):
        raise ValueError(f"errors must be positive, got {e1}, {e2}")
    if p1 == p2:
        raise ValueError("parameters must differ")
    if kind == "time":
        p1, p2 = 1.0 / p1, 1.0 / p2
    elif kind != "space":
        raise ValueError(f"kind must be 'space' or 'time', got {kind!r}")
    return math.log2(e1 / e2) / math.log2(p2 / p1)


@dataclass(frozen=True)
class ReportRow:
    parameter: float
    l2: float
    linf: float
    rate: float = math.nan
    seconds: float = 0.0


@dataclass
class RunReport:
    """Rows of (parameter, L2, Linf, observed L2 rate, wall time)."""

    label: str = ""
    kind: str = "space"
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, parameter: float, l2: float, linf: float, seconds: float = 0.0) -> ReportRow:
        rate = math.nan
        if self.rows:
            prev = self.rows[-1]
            if prev.parameter != parameter and prev.l2 > 0 and l2 > 0:
                rate = convergence_rate(prev.l2, l2, prev.parameter, parameter, self.kind)
        row = ReportRow(float(parameter), float(l2), float(linf), rate, float(seconds))
        self.rows.append(row)
        return row

    @property
    def parameters(self):
        return np.array([r.parameter for r in self.rows])

    @property
    def l2(self):
        return np.array([r.l2 for r in self.rows])

    @property
    def linf(self):
        return np.array([r.linf for r in self.rows])

    @property
    def rates(self):
        return np.array([r.rate for r in self.rows[1:]])

    def __len__(self):
        return len(self.rows)

    def format(self) -> str:
        lines = [f"{self.label}" if self.label else ""]
        lines.append(f"{'param':>10} {'L2':>12} {'Linf':>12} {'rate':>6} {'sec':>8}")
        for r in self.rows:
            rate = "-" if math.isnan(r.rate) else f"{r.rate:.2f}"
            lines.append(f"{r.parameter:>10.6g} {r.l2:>12.4e} {r.linf:>12.4e} {rate:>6} {r.seconds:>8.2f}")
        return "\n".join(line for line in lines if line is not None)


@dataclass
class FieldDump:
    """A nodal field resampled on a regular grid over the bounding box.

    ``mask`` is 1 inside the domain and 0 outside; outside cells hold NaN.
    """

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    mask: np.ndarray
    time: float
    label: str = ""

    @property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    @property
    def size(self) -> int:
        return int(np.prod([len(a) for a in self.axes]))

    def peak(self) -> float:
        return float(np.nanmax(self.values))

    def area_above(self, threshold: float) -> float:
        """Measure of the grid region where the field exceeds ``threshold``."""
        cell = np.prod([a[1] - a[0] for a in self.axes])
        return float(np.sum(np.nan_to_num(self.values, nan=-np.inf) > threshold) * cell)


def field_dump(history_or_values, nodes: NodeSet, domain: Domain, t: float, shape: Sequence[int], label: str = "") -> FieldDump:
    """Resample nodal values at time ``t`` on a regular grid of ``shape`` points.

    Uses an IMQ interpolant with shape parameter twice the mean
    nearest-neighbour spacing of the nodes.
    """
    if isinstance(history_or_values, SolutionHistory):
        values = history_or_values.at(t)
    else:
        values = np.asarray(history_or_values, dtype=float)
    lo, hi = domain.bounding_box()
    axes = tuple(np.linspace(lo[k], hi[k], n) for k, n in enumerate(shape))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    inside = domain.contains(pts, tol=1e-12)
    X = nodes.coords
    r = distance_matrix(X, X) + np.diag(np.full(len(X), np.inf))
    c = 2.0 * float(np.mean(r.min(axis=1)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        system = build_interpolation_system(KernelSpec(Family.IMQ, c), X, max_condition=np.inf)
    coef = system.fit(values)
    out = np.full(len(pts), np.nan)
    out[inside] = system.evaluate(coef, pts[inside])
    return FieldDump(axes, out.reshape(tuple(shape)), inside.reshape(tuple(shape)).astype(int), float(t), label)


# -- CSV ---------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else _FMT % v


def export(obj, path=None, format: str = "csv") -> str:
    """Write a :class:`RunReport` or :class:`FieldDump` as CSV; returns the text.

    Reports use the header ``parameter,l2,linf,rate,seconds`` with an empty
    rate on the first row.  Field dumps list grid coordinates, value and mask.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(obj, RunReport):
        w.writerow(REPORT_HEADER)
        for r in obj.rows:
            w.writerow([_fmt(r.parameter), _fmt(r.l2), _fmt(r.linf), _fmt(r.rate), _fmt(r.seconds)])
    elif isinstance(obj, FieldDump):
        coords = ["x", "y", "z"][: len(obj.axes)]
        w.writerow(coords + ["value", "mask"])
        vals = obj.values.ravel()
        mask = obj.mask.ravel()
        for p, v, m in zip(obj.points, vals, mask):
            w.writerow([_FMT % c for c in p] + ["nan" if math.isnan(v) else _FMT % v, int(m)])
    else:
        raise TypeError(f"cannot export {type(obj).__name__}")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def parse(source, label: str = "", kind: str = "space") -> RunReport:
    """Read a report written by :func:`export` (path or CSV text)."""
    text = source
    if not (isinstance(source, str) and "\n" in source):
        text = Path(source).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != REPORT_HEADER:
        raise ValueError("not a run report: bad header")
    report = RunReport(label, kind)
    for r in rows[1:]:
        vals = [math.nan if s == "" else float(s) for s in r]
        report.rows.append(ReportRow(*vals))
    return report


# -- sweeps --------------------------------------------------------------------


def sweep(
    problem: ProblemSpec | Callable[[], ProblemSpec],
    cfg: SchemeConfig,
    nodes_for: Callable[[int], NodeSet] | None = None,
    sizes: Sequence[int] | None = None,
    taus: Sequence[float] | None = None,
    M: int | None = None,
    label: str = "",
) -> RunReport:
    """Space sweep over ``sizes`` or time sweep over ``taus`` against ``problem.exact``.

    Exactly one of ``sizes``/``taus`` must be given.  A time sweep uses
    ``nodes_for(M)`` for the fixed node set.
    """
    if (sizes is None) == (taus is None):
        raise ValueError("give exactly one of sizes or taus")
    prob = problem() if callable(problem) and not isinstance(problem, ProblemSpec) else problem
    if prob.exact is None:
        raise ValueError("sweeps need a problem with an exact solution")
    if nodes_for is None:
        dom = prob.domain
        if not isinstance(dom, Interval):
            raise ValueError("a node factory is required outside 1D")
        nodes_for = lambda m: chebyshev_gauss_lobatto(dom.a, dom.b_, m)  # noqa: E731
    report = RunReport(label, "space" if sizes is not None else "time")
    if sizes is not None:
        for m in sizes:
            nodes = nodes_for(m)
            hist = run(prob, nodes, cfg)
            l2, linf = error_norms(prob.exact(nodes.coords, cfg.T), hist.final)
            report.add(m, l2, linf, hist.seconds)
    else:
        if M is None:
            raise ValueError("time sweeps need a node count M")
        nodes = nodes_for(M)
        weights = build_weights(prob, nodes, cfg)
        for tau in taus:
            c = replace(cfg, tau=tau)
            hist = run(prob, nodes, c, weights)
            l2, linf = error_norms(prob.exact(nodes.coords, c.T), hist.final)
            report.add(tau, l2, linf, hist.seconds)
    return report


def derivative_sweep(kernel_policy, alpha: float, mu: float, sizes: Sequence[int], a: float = -1.0, b: float = 1.0,
                     n_quad: int = 30, label: str = "") -> RunReport:
    """Accuracy of DQ weights for the left derivative of ``(x - a)^mu`` on CGL nodes."""
    report = RunReport(label or f"DQ, alpha={alpha}, mu={mu}")
    dom = Interval(a, b)
    for m in sizes:
        t0 = time.perf_counter()
        nodes = chebyshev_gauss_lobatto(a, b, m)
        x = nodes.coords[:, 0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            W = build_fractional_weights(nodes, kernel_policy.resolve(m), alpha, 0, "left", dom, n_quad)
        approx = W @ (x - a) ** mu
        exact = frac_deriv_power(alpha, mu, a, x)
        l2, linf = error_norms(exact, approx)
        report.add(m, l2, linf, time.perf_counter() - t0)
    return report


def gl_sweep(alpha: float, mu: float, sizes: Sequence[int], a: float = -1.0, b: float = 1.0) -> RunReport:
    """Same study with the first-order Grunwald-Letnikov operator on uniform grids."""
    report = RunReport(f"GL, alpha={alpha}, mu={mu}")
    for m in sizes:
        t0 = time.perf_counter()
        x = np.linspace(a, b, m + 1)
        approx = gl_fractional_derivative(x, (x - a) ** mu, alpha)
        l2, linf = error_norms(frac_deriv_power(alpha, mu, a, x), approx)
        report.add(m, l2, linf, time.perf_counter() - t0)
    return report


# -- examples ------------------------------------------------------------------


def example_nodes(ex: Example, M: int, domain: Domain, seed: int | None = None) -> NodeSet:
    """Node set with ``M + 1`` points following the example's layout policy."""
    seed = ex.seed if seed is None else seed
    if ex.nodes == "cgl":
        return chebyshev_gauss_lobatto(domain.a, domain.b_, M)
    if ex.nodes == "equispaced":
        return equispaced_nodes(domain.a, domain.b_, M)
    if ex.nodes == "grid":
        n = round((M + 1) ** (1.0 / domain.dim))
        if n**domain.dim != M + 1:
            raise ValueError(f"M + 1 = {M + 1} is not a perfect power for a grid layout")
        return grid_nodes(domain, [n] * domain.dim)
    mirror = PLUME_MIRROR if ex.kind == "plume" else None
    return generate_nodes(domain, M + 1, seed=seed, mirror=mirror)


@dataclass
class ExampleResult:
    report: RunReport
    fields: list[FieldDump] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _config(ex: Example, **kw) -> SchemeConfig:
    return SchemeConfig(
        q=kw.get("q", ex.q),
        tau=kw.get("tau", ex.tau),
        T=kw.get("T", ex.T),
        kernel=ex.kernel,
        n_quad=kw.get("n_quad", 30),
        max_condition=ex.max_condition if ex.max_condition is not None else MAX_CONDITION,
    )


PLUME_TIMES = (0.02, 1.0, 3.0)
PLUME_GRID = (161, 41)
PLUME_MIRROR = (1, 0.5)


def run_example(example_id: str, nodes_file: NodeSet | None = None, **overrides) -> ExampleResult:
    """Run a registry example with optional overrides.

    Recognized overrides: ``sizes``, ``tau``, ``T``, ``q``, ``seed``,
    ``nodes`` (layout), ``family``, ``nu``, ``sigma``, ``alpha``, ``beta``,
    ``mu``, ``theta``, ``n_quad``, ``times`` (plume dump times) and
    ``grid`` (plume dump grid shape).
    """
    ex = get_example(example_id)
    run_kw = {k: overrides.pop(k) for k in ("n_quad", "times", "grid") if k in overrides}
    ex = ex.with_overrides(**overrides)
    if ex.kind == "derivative":
        report = derivative_sweep(ex.kernel, ex.params["alpha"], ex.params["mu"], ex.sizes,
                                  n_quad=run_kw.get("n_quad", 30), label=f"example {ex.id}")
        res = ExampleResult(report)
        if ex.id == "6.1a":
            res.extra["gl"] = gl_sweep(ex.params["alpha"], ex.params["mu"], ex.sizes)
        return res

    cfg = _config(ex, **run_kw)
    problem = ex.problem()
    if ex.kind == "plume":
        nodes = nodes_file if nodes_file is not None else example_nodes(ex, ex.sizes[0], problem.domain)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            mirror = PLUME_MIRROR
            try:
                mirror_permutation(nodes, *mirror)
            except ValueError:
                log.info("plume nodes are not mirror symmetric; assembling without reflection")
                mirror = None
            hist = run(problem, nodes, cfg, mirror=mirror)
        report = RunReport(f"plume alpha={ex.params.get('alpha')}", "space")
        fields = []
        for t in run_kw.get("times", PLUME_TIMES):
            if t > cfg.T * (1 + 1e-12):
                continue
            fields.append(field_dump(hist, nodes, problem.domain, t, run_kw.get("grid", PLUME_GRID), f"t={t:g}"))
        report.rows.append(ReportRow(len(nodes) - 1, math.nan, math.nan, math.nan, hist.seconds))
        return ExampleResult(report, fields, {"history": hist, "nodes": nodes})

    report = RunReport(f"example {ex.id}", "space")
    for m in ex.sizes:
        nodes = nodes_file if nodes_file is not None else example_nodes(ex, m, problem.domain)
        with warnings.catch_warnings():
            if ex.max_condition is not None:
                warnings.simplefilter("ignore", ConditioningWarning)
            hist = run(problem, nodes, cfg)
        l2, linf = error_norms(problem.exact(nodes.coords, cfg.T), hist.final)
        report.add(len(nodes) - 1, l2, linf, hist.seconds)
        if nodes_file is not None:
            break
    return ExampleResult(report)
