"""Command-line front end.

    fracdq derivative [--family IMQ --nu 1.3 --sigma 1 --alpha 1.5 --mu 2 --sizes 10 15 20 25 --gl]
    fracdq solve --config run.cfg [--nodes nodes.txt]
    fracdq sweep --config run.cfg [--vary M|tau]
    fracdq example 6.4 [--set tau=2e-3 --set sizes=24,80]
    fracdq simulate [--alpha 1.9 1.3 --times 0.02 1 3]

Every subcommand accepts ``--config``, ``--nodes``, ``--seed``, ``--out`` and
``--format csv``.  Failures print one JSON line ``{"error": ..., "message": ...}``
to stderr and exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .geometry import read_nodes, write_nodes
from .harness import (
    PLUME_GRID,
    PLUME_TIMES,
    RunReport,
    derivative_sweep,
    error_norms,
    export,
    gl_sweep,
    run_example,
    sweep,
)
from .kernels import ConditioningWarning, Family, KernelPolicy
from .problems import REGISTRY
from .solver import run

log = logging.getLogger("fracdq")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report_error("UsageError", message)
        raise SystemExit(2)


def _report_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _value(text: str):
    """Parse an override value: int, float, comma list or string."""
    if "," in text:
        return tuple(_value(t) for t in text.split(",") if t)
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(obj, path: Path, fmt: str) -> None:
    export(obj, path, fmt)
    log.info("wrote %s", path)


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.nodes:
        cfg.nodes_file = args.nodes
    return cfg


# -- subcommands ---------------------------------------------------------------


def cmd_derivative(args) -> int:
    cfg = _config(args)
    base = REGISTRY[cfg.example or "6.1a"]
    if base.kind != "derivative":
        raise ValueError(f"example {base.id} is not a derivative study")
    family = args.family or cfg.kernel or base.kernel.family.value
    nu = args.nu if args.nu is not None else cfg.nu if cfg.nu is not None else base.kernel.nu
    sigma = args.sigma if args.sigma is not None else cfg.sigma if cfg.sigma is not None else base.kernel.sigma
    alpha = args.alpha if args.alpha is not None else cfg.alpha if cfg.alpha is not None else base.params["alpha"]
    mu = args.mu if args.mu is not None else cfg.mu if cfg.mu is not None else base.params["mu"]
    sizes = args.sizes or cfg.M or list(base.sizes)
    policy = KernelPolicy(Family(family.upper()), nu, sigma)
    report = derivative_sweep(policy, alpha, mu, sizes, n_quad=cfg.n_quad or 30)
    out = _out(args)
    print(report.format())
    _write(report, out / "derivative.csv", args.format)
    if args.gl:
        gl = gl_sweep(alpha, mu, sizes)
        print(gl.format())
        _write(gl, out / "derivative_gl.csv", args.format)
    return 0


def cmd_solve(args) -> int:
    cfg = _config(args)
    problem = cfg.problem()
    scheme = cfg.scheme()
    M = args.M if args.M is not None else cfg.sizes()[0]
    nodes = cfg.nodes(M, problem)
    with warnings.catch_warnings():
        if not np.isfinite(scheme.max_condition):
            warnings.simplefilter("ignore", ConditioningWarning)
        hist = run(problem, nodes, scheme)
    out = _out(args)
    X = nodes.coords
    cols = ["x", "y", "z"][: X.shape[1]] + ["u"]
    data = [X, hist.final[:, None]]
    if problem.exact is not None:
        exact = problem.exact(X, scheme.T)
        cols.append("exact")
        data.append(exact[:, None])
        report = RunReport("solve")
        report.add(len(nodes) - 1, *error_norms(exact, hist.final), hist.seconds)
        print(report.format())
        _write(report, out / "report.csv", args.format)
    np.savetxt(out / "solution.csv", np.hstack(data), delimiter=",", fmt="%.15e", header=",".join(cols), comments="")
    write_nodes(out / "nodes.txt", nodes)
    print(f"solved {len(nodes)} nodes, {scheme.N} steps in {hist.seconds:.2f} s")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    problem = cfg.problem()
    scheme = cfg.scheme()
    vary = args.vary or ("tau" if cfg.taus else "M")
    with warnings.catch_warnings():
        if not np.isfinite(scheme.max_condition):
            warnings.simplefilter("ignore", ConditioningWarning)
        if vary == "M":
            report = sweep(problem, scheme, lambda m: cfg.nodes(m, problem), sizes=cfg.sizes(), label="sweep over M")
        else:
            if not cfg.taus:
                raise ValueError("a tau sweep needs 'taus' in the config")
            M = args.M if args.M is not None else cfg.sizes()[0]
            report = sweep(problem, scheme, lambda m: cfg.nodes(m, problem), taus=cfg.taus, M=M,
                           label=f"sweep over tau, M={M}")
    print(report.format())
    _write(report, _out(args) / "sweep.csv", args.format)
    return 0


def _example_overrides(args, cfg: RunConfig) -> dict:
    kw = {}
    for key in ("q", "tau", "T", "nu", "sigma", "alpha", "beta", "mu", "theta", "n_quad"):
        v = getattr(cfg, key)
        if v is not None:
            kw[key] = v
    if cfg.kernel:
        kw["family"] = Family(cfg.kernel.upper())
    if cfg.M:
        kw["sizes"] = tuple(cfg.M)
    if cfg.layout:
        kw["nodes"] = cfg.layout
    if cfg.seed is not None:
        kw["seed"] = cfg.seed
    for item in args.set or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        v = _value(val.strip())
        key = key.strip()
        if key == "family":
            v = Family(str(v).upper())
        if key == "sizes" and not isinstance(v, tuple):
            v = (v,)
        kw[key] = v
    return kw


def cmd_example(args) -> int:
    if args.id not in REGISTRY:
        raise KeyError(f"unknown example {args.id!r}; known: {', '.join(REGISTRY)}")
    cfg = _config(args)
    kw = _example_overrides(args, cfg)
    nodes = read_nodes(cfg.nodes_file) if cfg.nodes_file else None
    res = run_example(args.id, nodes_file=nodes, **kw)
    out = _out(args)
    stem = f"example_{args.id}"
    print(res.report.format())
    _write(res.report, out / f"{stem}.csv", args.format)
    if "gl" in res.extra:
        print(res.extra["gl"].format())
        _write(res.extra["gl"], out / f"{stem}_gl.csv", args.format)
    for f in res.fields:
        _write(f, out / f"{stem}_{f.label.replace('=', '')}.csv", args.format)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args)
    kw = _example_overrides(args, cfg)
    kw.pop("alpha", None)
    kw["times"] = tuple(args.times)
    kw["grid"] = tuple(args.grid)
    nodes = read_nodes(cfg.nodes_file) if cfg.nodes_file else None
    out = _out(args)
    lines = ["alpha,time,peak,area_above,threshold"]
    for a in args.alpha:
        res = run_example("plume", nodes_file=nodes, alpha=a, **kw)
        if nodes is None:
            write_nodes(out / "plume_nodes.txt", res.extra["nodes"])
        for f in res.fields:
            _write(f, out / f"plume_alpha{a:g}_{f.label.replace('=', '')}.csv", args.format)
            lines.append(f"{a!r},{f.time!r},{f.peak():.15e},{f.area_above(args.threshold):.15e},{args.threshold!r}")
        print(f"alpha={a:g}: {res.report.rows[-1].seconds:.1f} s")
    (out / "plume_summary.csv").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--nodes", help="node file (coordinates then a 0/1 boundary flag per line)")
    common.add_argument("--seed", type=int, help="node generator seed")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--format", default="csv", choices=["csv"], help="output format")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = _Parser(prog="fracdq", description="RBF-DQ solvers for multi-term time-space fractional diffusion.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("derivative", parents=[common], help="accuracy of one-sided fractional DQ weights")
    d.add_argument("--family", choices=[f.value for f in Family if f is not Family.PS])
    d.add_argument("--nu", type=float)
    d.add_argument("--sigma", type=int)
    d.add_argument("--alpha", type=float)
    d.add_argument("--mu", type=float, help="power of the test function (x - a)^mu")
    d.add_argument("--sizes", type=int, nargs="+", help="values of M (M + 1 CGL nodes)")
    d.add_argument("--gl", action="store_true", help="also run the Grunwald-Letnikov baseline")
    d.set_defaults(func=cmd_derivative)

    s = sub.add_parser("solve", parents=[common], help="run one configuration")
    s.add_argument("--M", type=int, help="node count parameter (M + 1 nodes)")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", parents=[common], help="convergence sweep over M or tau")
    w.add_argument("--vary", choices=["M", "tau"])
    w.add_argument("--M", type=int, help="fixed M for a tau sweep")
    w.set_defaults(func=cmd_sweep)

    e = sub.add_parser("example", parents=[common], help="run a built-in example")
    e.add_argument("id", help=f"one of {', '.join(REGISTRY)}")
    e.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a default (repeatable)")
    e.set_defaults(func=cmd_example)

    m = sub.add_parser("simulate", parents=[common], help="contaminant plume runs")
    m.add_argument("--alpha", type=float, nargs="+", default=[1.9, 1.3])
    m.add_argument("--times", type=float, nargs="+", default=list(PLUME_TIMES))
    m.add_argument("--grid", type=int, nargs=2, default=list(PLUME_GRID), metavar=("NX", "NY"))
    m.add_argument("--threshold", type=float, default=100.0, help="level for the super-threshold area")
    m.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a default (repeatable)")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        _report_error(type(exc).__name__, str(msg))
        return 1


if __name__ == "__main__":
    sys.exit(main())
