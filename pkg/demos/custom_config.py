"""Running a user-defined problem from a key-value config.

The same text can be saved to a file and passed to ``fracdq solve --config``.
Here a heat-like equation with a left derivative of order 1.7 and a two-term
time operator is driven by a source term; the script prints the solution
at the final time.

    python demos/custom_config.py
"""

from fracdq.config import parse_config
from fracdq.solver import run

text = """
domain = interval 0 1
orders = 1.7
terms = 1:0.9, 0.5:0.4
eps_left = 1
eps_right = 0.5
source = sin(pi * x) * (1 + t)
initial = 0
boundary = 0
kernel = MQ
nu = 0.3
q = 2
tau = 0.01
T = 0.5
M = 16
"""

cfg = parse_config(text)
problem = cfg.problem()
nodes = cfg.nodes(cfg.sizes()[0], problem)
history = run(problem, nodes, cfg.scheme())
for x, u in zip(nodes.coords[:, 0], history.final):
    print(f"{x:8.4f} {u: .6e}")
