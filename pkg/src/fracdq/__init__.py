"""Meshless RBF differential quadrature for multi-term time-space fractional diffusion.

Modules by layer: ``fractional`` (Lubich weights and Caputo operators),
``kernels`` (RBF families and conditioning), ``geometry`` (domains, node
sets, integral paths), ``quadrature`` (Gauss-Jacobi rules and fractional
derivatives of RBFs), ``weights`` (DQ weight matrices), ``solver`` (the
fully discrete scheme) and ``harness`` (norms, sweeps, examples, export).
"""

from .fractional import (
    LubichCoefficients,
    MultiTermSpec,
    caputo_operator_apply,
    lubich_coefficients,
    memory_kernel,
    multi_term_apply,
)
from .geometry import (
    Ball,
    Box,
    ConvexDomain,
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
    integral_path,
    read_nodes,
    write_nodes,
)
from .harness import RunReport, FieldDump, convergence_rate, error_norms, export, parse, run_example, sweep
from .kernels import ConditioningWarning, Family, IllConditionedError, KernelPolicy, KernelSpec, build_interpolation_system
from .quadrature import frac_deriv_rbf, jacobi_rule
from .solver import (
    Diffusion,
    ProblemSpec,
    SchemeConfig,
    SolutionHistory,
    assemble_system,
    build_weights,
    perturbation_stability_check,
    run,
    step,
)
from .weights import WeightMatrix, build_fractional_weights, build_integer_weights

__version__ = "0.1.0"
