"""Temporal order of the multi-term Lubich scheme.

Four Caputo terms of orders 0.3, 0.5, 0.7 and 0.9 act on u = t^4 x^4 on
[0, 1] up to t = 0.5.  With M = 50 CGL nodes the spatial error is far below
the time error, so the error should fall like tau^q.

The scheme starts from zero history, so full order q needs u(t) - u(0) to
vanish to high order at t = 0; t^4 does.

    python demos/temporal_orders.py
"""

import warnings

from fracdq import Family, KernelPolicy, SchemeConfig, chebyshev_gauss_lobatto
from fracdq.harness import sweep
from fracdq.kernels import ConditioningWarning
from fracdq.problems import ex63_problem

problem = ex63_problem(mu=4.0)
taus = [1 / 10, 1 / 20, 1 / 30, 1 / 40]

with warnings.catch_warnings():
    warnings.simplefilter("ignore", ConditioningWarning)
    for q in (1, 2, 3, 4):
        cfg = SchemeConfig(q=q, tau=taus[0], T=0.5, kernel=KernelPolicy(Family.MQ, 0.15, 1))
        report = sweep(problem, cfg, lambda m: chebyshev_gauss_lobatto(0, 1, m), taus=taus, M=50, label=f"q = {q}")
        print(report.format())
        print()
