import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdq.geometry import (
    Ball,
    Box,
    Ellipse,
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

DOMAINS = {
    "interval": Interval(-1.0, 1.0),
    "square": Rectangle(0, 1, 0, 1),
    "strip": Rectangle(0, 4, 0, 1),
    "triangle": Triangle(),
    "ellipse": Ellipse((0, 0), (0.5, 1.0)),
    "box": Box(0, 1, 0, 1, 0, 1),
    "tetrahedron": Tetrahedron(),
    "ball": Ball((0.5, 0.5, 0.0), 0.5),
}


# -- CGL nodes -----------------------------------------------------------------


def test_cgl_three_nodes():
    n = chebyshev_gauss_lobatto(0, 1, 2)
    np.testing.assert_allclose(n.coords[:, 0], [0.0, 0.5, 1.0], atol=1e-15)
    assert n.boundary.tolist() == [True, False, True]


def test_cgl_symmetric():
    x = chebyshev_gauss_lobatto(-1, 1, 4).coords[:, 0]
    np.testing.assert_allclose(x, -x[::-1], atol=1e-15)


def test_cgl_clustering():
    gaps = np.diff(chebyshev_gauss_lobatto(0, 2, 10).coords[:, 0])
    assert gaps.argmin() in (0, 9)
    assert gaps.argmax() in (4, 5)
    assert gaps[0] == pytest.approx(gaps[-1])


def test_cgl_formula():
    M, a, b = 17, -0.3, 2.1
    i = np.arange(M + 1)
    ref = (1 - np.cos(i * np.pi / M)) * (b - a) / 2 + a
    np.testing.assert_allclose(chebyshev_gauss_lobatto(a, b, M).coords[:, 0], ref, atol=1e-15)


@pytest.mark.parametrize("a, b, M", [(1, 0, 4), (0, 0, 4), (0, 1, 0)])
def test_cgl_rejects_bad_arguments(a, b, M):
    with pytest.raises(ValueError):
        chebyshev_gauss_lobatto(a, b, M)


def test_equispaced_nodes():
    n = equispaced_nodes(0, 1, 4)
    np.testing.assert_allclose(n.coords[:, 0], [0, 0.25, 0.5, 0.75, 1])
    assert n.boundary.sum() == 2


# -- NodeSet -------------------------------------------------------------------


def test_nodeset_rejects_duplicates_and_bad_mask():
    with pytest.raises(ValueError):
        NodeSet(np.array([[0.0, 0.0], [0.0, 0.0]]), [True, False])
    with pytest.raises(ValueError):
        NodeSet(np.array([[0.0], [1.0]]), [True])


def test_nodeset_is_immutable():
    n = chebyshev_gauss_lobatto(0, 1, 3)
    with pytest.raises(ValueError):
        n.coords[0, 0] = 5.0
    assert n.M == 3 and n.dim == 1 and len(n) == 4
    assert n.interior.tolist() == [False, True, True, False]


# -- integral paths ---------------------------------------------------------------


@settings(max_examples=50)
@given(st.floats(-0.99, 0.99), st.floats(0.0, 0.99))
def test_ellipse_left_path(y, s):
    dom = DOMAINS["ellipse"]
    half = np.sqrt(1 - y * y) / 2
    x = (2 * s - 1) * half
    assert integral_path(dom, [x, y], 0, "left") == pytest.approx(-half, abs=1e-14)
    assert integral_path(dom, [x, y], 0, "right") == pytest.approx(half, abs=1e-14)


def test_rectangle_right_path():
    dom = DOMAINS["square"]
    rng = np.random.default_rng(0)
    for p in rng.uniform(0, 1, (20, 2)):
        assert integral_path(dom, p, 1, "right") == 1.0
        assert integral_path(dom, p, 0, "left") == 0.0


@settings(max_examples=50)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(-0.49, 0.49))
def test_ball_left_path(x, y, z):
    dom = DOMAINS["ball"]
    rad = 0.25 - (x - 0.5) ** 2 - z**2
    if rad <= (y - 0.5) ** 2:
        return
    assert integral_path(dom, [x, y, z], 1, "left") == pytest.approx(0.5 - np.sqrt(rad), abs=1e-13)


def test_triangle_paths():
    dom = DOMAINS["triangle"]
    assert integral_path(dom, [0.2, 0.3], 0, "right") == pytest.approx(0.7)
    assert integral_path(dom, [0.2, 0.3], 1, "right") == pytest.approx(0.8)
    assert integral_path(dom, [0.2, 0.3], 1, "left") == pytest.approx(0.0, abs=1e-15)


def test_integral_path_errors():
    with pytest.raises(ValueError):
        integral_path(DOMAINS["square"], [1.5, 0.5], 0, "left")
    with pytest.raises(ValueError):
        integral_path(DOMAINS["square"], [0.5, 0.5], 0, "up")


@pytest.mark.parametrize("name", list(DOMAINS))
def test_path_endpoints_on_boundary(name):
    dom = DOMAINS[name]
    nodes = generate_nodes(dom, 60, seed=1)
    for p in nodes.coords:
        for axis in range(dom.dim):
            lo = integral_path(dom, p, axis, "left")
            hi = integral_path(dom, p, axis, "right")
            assert lo - 1e-12 <= p[axis] <= hi + 1e-12
            for v in (lo, hi):
                q = p.copy()
                q[axis] = v
                assert dom.on_boundary(q[None, :], tol=1e-10)[0]


# -- node generation -----------------------------------------------------------


def test_unit_square_25_nodes():
    n = generate_nodes(DOMAINS["square"], 25, seed=0)
    assert len(n) == 25
    assert n.boundary.sum() >= 8
    assert n.min_separation > 0


def test_generation_is_seed_deterministic():
    a = generate_nodes(DOMAINS["ellipse"], 80, seed=7)
    b = generate_nodes(DOMAINS["ellipse"], 80, seed=7)
    c = generate_nodes(DOMAINS["ellipse"], 80, seed=8)
    assert np.array_equal(a.coords, b.coords) and np.array_equal(a.boundary, b.boundary)
    assert not np.array_equal(a.coords, c.coords)


@settings(max_examples=10, deadline=None)
@given(st.integers(5, 200), st.integers(0, 1000))
def test_triangle_nodes_inside(target, seed):
    n = generate_nodes(DOMAINS["triangle"], target, seed=seed)
    x, y = n.coords.T
    assert np.all(y <= 1 - x + 1e-12)
    assert np.all(x >= -1e-12) and np.all(y >= -1e-12)


@pytest.mark.parametrize("name", list(DOMAINS))
@pytest.mark.parametrize("target", [30, 500])
def test_generated_sets_are_valid(name, target):
    dom = DOMAINS[name]
    n = generate_nodes(dom, target, seed=3)
    assert len(n) == target
    assert dom.contains(n.coords).all()
    assert dom.on_boundary(n.coords[n.boundary], tol=1e-12).all()
    assert not dom.on_boundary(n.coords[n.interior], tol=1e-12).any()
    assert n.min_separation > 0


def test_mirror_symmetric_generation():
    dom = Rectangle(0, 4, 0, 1)
    n = generate_nodes(dom, 200, seed=0, mirror=(1, 0.5))
    X = n.coords
    R = X.copy()
    R[:, 1] = 1 - R[:, 1]
    d = np.linalg.norm(R[:, None, :] - X[None, :, :], axis=2).min(axis=1)
    assert d.max() < 1e-12


def test_generation_errors():
    with pytest.raises(ValueError):
        generate_nodes(DOMAINS["square"], 3)
    with pytest.raises(RuntimeError):
        generate_nodes(DOMAINS["square"], 40, min_separation=0.5)


def test_grid_nodes_classify_boundary():
    n = grid_nodes(DOMAINS["square"], (5, 5))
    assert len(n) == 25
    assert n.boundary.sum() == 16


# -- node files ----------------------------------------------------------------


def test_node_file_round_trip(tmp_path):
    n = generate_nodes(DOMAINS["ball"], 40, seed=2)
    p = tmp_path / "nodes.txt"
    write_nodes(p, n)
    m = read_nodes(p)
    assert np.array_equal(n.coords, m.coords)
    assert np.array_equal(n.boundary, m.boundary)


def test_node_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("# nothing\n")
    with pytest.raises(ValueError):
        read_nodes(p)
    p.write_text("0 0 1\n0.5 0\n")
    with pytest.raises(ValueError):
        read_nodes(p)
    p.write_text("0 0 2\n0.5 0.5 0\n")
    with pytest.raises(ValueError):
        read_nodes(p)
