import math
import warnings

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma

from fracdq.geometry import generate_nodes
from fracdq.kernels import Family
from fracdq.problems import REGISTRY, get_example, plume_initial, plume_problem, riesz_coefficient

PDE_IDS = [k for k, e in REGISTRY.items() if e.kind == "pde"]


# -- independent residual oracle ------------------------------------------------------
#
# Each manufactured solution must satisfy
#   sum_r a_r D_t^theta_r u + v u_x = sum_l (eps+ D_left + eps- D_right) u + f.
# Derivatives here are computed from their integral definitions by adaptive
# quadrature with five-point finite-difference integrands (exact for the
# quartic profiles along each line), independently of the closed
# forms used to write the source terms.


def _stencil(offsets, order):
    """Weights of the finite-difference rule for the ``order``-th derivative on ``offsets``."""
    V = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


_CENTRED = np.arange(-2.0, 3.0)


def _d1(g, s, h=1e-3):
    w = _stencil(_CENTRED, 1)
    return sum(wi * g(s + o * h) for wi, o in zip(w, _CENTRED)) / h


def _d2_inside(g, s, lo, hi):
    """Five-point second derivative with all samples in [lo, hi]; exact for quartics."""
    h = (hi - lo) / 16.0
    shift = np.clip(0.0, (lo - s) / h + 2.0, (hi - s) / h - 2.0)
    offsets = _CENTRED + shift
    w = _stencil(offsets, 2)
    return sum(wi * g(s + o * h) for wi, o in zip(w, offsets)) / (h * h)


def caputo_time(u, t, theta):
    if theta == 1.0:
        return _d1(u, t)
    val = quad(lambda s: _d1(u, s), 0, t, weight="alg", wvar=(0, -theta), epsabs=0, epsrel=1e-11, limit=200)[0]
    return val / gamma(1 - theta)


def caputo_space(g, x, lo, hi, alpha, side):
    """Left derivative over [lo, x] or right derivative over [x, hi] of the line function g."""

    def _d2(s):
        return _d2_inside(g, s, lo, hi)

    if alpha == 2.0:
        return _d2(x)
    if side == "left":
        val = quad(_d2, lo, x, weight="alg", wvar=(0, 1 - alpha), epsabs=0, epsrel=1e-11, limit=200)[0]
    else:
        val = quad(_d2, x, hi, weight="alg", wvar=(1 - alpha, 0), epsabs=0, epsrel=1e-11, limit=200)[0]
    return val / gamma(2 - alpha)


def residual(prob, p, t):
    P = p[None, :]
    lhs = 0.0
    for a, th in prob.terms.terms:
        lhs += a * caputo_time(lambda s: float(prob.exact(P, s)[0]), t, th)
    rhs = float(prob.source(P, t)[0])
    for axis, diff in enumerate(prob.diffusion):
        l, r = prob.domain.chord(P, axis)

        def line(s, axis=axis):
            q = p.copy()
            q[axis] = s
            return float(prob.exact(q[None, :], t)[0])

        for side, eps in diff.sides():
            rhs += float(eps(P)[0]) * caputo_space(line, p[axis], float(l[0]), float(r[0]), diff.alpha, side)
    return lhs - rhs, max(abs(lhs), abs(rhs))


@pytest.fixture(autouse=True)
def _no_roundoff_noise():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        yield


@pytest.mark.parametrize("example_id", PDE_IDS)
def test_source_term_transcription(example_id):
    ex = get_example(example_id)
    prob = ex.problem()
    nodes = generate_nodes(prob.domain, 40, seed=11)
    pts = nodes.coords[nodes.interior][:8]
    for t in (0.3, ex.T):
        for p in pts:
            res, scale = residual(prob, p.copy(), t)
            assert abs(res) <= 1e-8 * max(scale, 1e-3), (example_id, p, t, res, scale)


# -- registry ------------------------------------------------------------------------


def test_registry_defaults():
    assert set(REGISTRY) == {"6.1a", "6.1b", "6.2", "6.3", "6.4", "6.5", "6.6", "6.8", "plume"}
    e = REGISTRY["6.3"]
    assert (e.kernel.family, e.kernel.nu, e.kernel.sigma, e.q, e.tau, e.T) == (Family.MQ, 0.1, 1, 1, 5e-5, 0.5)
    e = REGISTRY["6.4"]
    assert (e.kernel.family, e.kernel.nu, e.kernel.sigma, e.q) == (Family.IMQ, 8.0, 2, 2)
    assert e.sizes[-1] + 1 == 1089
    for e in REGISTRY.values():
        if e.reference:
            assert len(e.reference) == len(e.sizes)


def test_unknown_example():
    with pytest.raises(KeyError):
        get_example("6.7")


def test_overrides():
    e = get_example("6.1b").with_overrides(mu=1.1, nu=2.0, tau=1e-2)
    assert e.params["mu"] == 1.1 and e.kernel.nu == 2.0 and e.tau == 1e-2
    assert get_example("6.1b").params["mu"] == 1.5
    with pytest.raises(ValueError):
        get_example("6.1a").problem()


def test_riesz_coefficient_sign():
    for alpha in (1.1, 1.5, 1.9):
        assert riesz_coefficient(alpha) > 0
    assert riesz_coefficient(1.5) == pytest.approx(1 / math.sqrt(2))


def test_plume_setup():
    x = np.array([[0.5, 0.5], [0.7, 0.5], [2.0, 0.5]])
    u = plume_initial(x)
    assert u[0] == pytest.approx(1000.0)
    assert u[1] == 0.0 and u[2] == 0.0
    r = np.linspace(0, 0.2, 50, endpoint=False)
    ring = plume_initial(np.column_stack([0.5 + r, np.full(50, 0.5)]))
    assert np.all(np.diff(ring) < 0) and ring[-1] > 0
    prob = plume_problem(1.3)
    assert prob.advection == (0.012, 0)
    ex, ey = prob.diffusion
    assert ex.alpha == ey.alpha == 1.3
    assert ex.left(x)[0] == pytest.approx(riesz_coefficient(1.3, 0.03 / (2 * math.pi)))
