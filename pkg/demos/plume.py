"""Contaminant plume: heavier tails spread more slowly.

A compactly supported bump of height 1000 at (0.5, 0.5) is carried along x
at speed 0.012 and spreads by two-sided fractional diffusion on [0, 4] x [0, 1].
Lowering the order from 1.9 to 1.3 slows the spreading, so at t = 3 the
alpha = 1.3 plume keeps a higher peak and covers less area above a fixed
level.  Fields are written as CSV grids for plotting elsewhere.

Each run takes about 20 s on 1105 nodes.

    python demos/plume.py [outdir]
"""

import sys
from pathlib import Path

from fracdq.harness import export, run_example

out = Path(sys.argv[1] if len(sys.argv) > 1 else "plume_out")
out.mkdir(exist_ok=True)
threshold = 100.0

for alpha in (1.9, 1.3):
    res = run_example("plume", alpha=alpha)
    print(f"alpha = {alpha}: {len(res.extra['nodes'])} nodes, {res.report.rows[0].seconds:.1f} s")
    for f in res.fields:
        export(f, out / f"plume_alpha{alpha:g}_{f.label.replace('=', '')}.csv")
        print(f"  t = {f.time:<5g} peak {f.peak():8.2f}   area above {threshold:g}: {f.area_above(threshold):.4f}")
