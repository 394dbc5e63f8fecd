"""How accurate are fractional DQ weights compared with Grunwald-Letnikov?

We differentiate u(x) = (x + 1)^2 with the left Caputo operator of order 1.5
on [-1, 1].  The exact answer is Gamma(3)/Gamma(1.5) (x + 1)^0.5.  The DQ
weights use IMQ test functions on Chebyshev-Gauss-Lobatto nodes, the baseline
is the shifted GL sum on a uniform grid.

DQ converges spectrally (rates grow with M), GL stays near first order.

    python demos/derivative_accuracy.py
"""

import numpy as np

from fracdq import Family, KernelPolicy
from fracdq.harness import derivative_sweep, gl_sweep

sizes = (10, 15, 20, 25, 30)
policy = KernelPolicy(Family.IMQ, nu=1.3, sigma=1)

dq = derivative_sweep(policy, alpha=1.5, mu=2.0, sizes=sizes, label="DQ, IMQ nu=1.3")
gl = gl_sweep(alpha=1.5, mu=2.0, sizes=sizes)
print(dq.format())
print()
print(gl.format())

# lower regularity: (x + 1)^mu with mu close to alpha slows DQ down
print("\nalpha = 1.1, observed mean rate as mu approaches alpha")
for mu in (1.5, 1.3, 1.1):
    r = derivative_sweep(KernelPolicy(Family.IMQ, 0.9, 1), 1.1, mu, (10, 15, 20, 25))
    print(f"  mu = {mu}: {np.mean(r.rates):.2f}")
