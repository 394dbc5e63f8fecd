"""Two-sided (Riesz-type) fractional diffusion on the unit square.

u = (1 + t^2) x^2 (1-x)^2 y^2 (1-y)^2 solves a single-term equation with a
Caputo time derivative of order 0.5 and orders 1.6 in both directions.  IMQ
test functions with c = 8 / (M+1)^(1/2) are used on tensor grids; each run
takes 1000 steps of the second-order scheme.

The default sizes stop at 289 nodes to keep the demo short; pass --full for
the 1089-node run as well.  Rates are measured against the node count.

    python demos/riesz_square.py [--full]
"""

import sys

from fracdq.harness import run_example

sizes = (24, 80, 288, 1088) if "--full" in sys.argv else (24, 80, 288)
result = run_example("6.4", sizes=sizes)
print(result.report.format())
