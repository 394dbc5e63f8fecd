"""Convex domains, axis-aligned integral paths and node sets.

Every domain exposes ``chord(points, axis)``: the endpoints of the segment
obtained by moving one coordinate while freezing the others.  Those endpoints
are the lower limits (left side) or upper limits (right side) of the
one-sided space-fractional derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull
from scipy.stats import qmc

__all__ = [
    "Domain",
    "ConvexPolytope",
    "Interval",
    "Rectangle",
    "Triangle",
    "Box",
    "Tetrahedron",
    "Ellipsoid",
    "Ellipse",
    "Ball",
    "ConvexDomain",
    "NodeSet",
    "chebyshev_gauss_lobatto",
    "equispaced_nodes",
    "grid_nodes",
    "generate_nodes",
    "integral_path",
    "read_nodes",
    "write_nodes",
    "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-12


def _as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if dim > 1 or pts.shape[0] == 1 else pts.reshape(-1, 1)
    if pts.shape[-1] != dim:
        raise ValueError(f"expected {dim}-dimensional points, got shape {pts.shape}")
    return pts


class Domain:
    """Base class for convex regions in 1, 2 or 3 dimensions."""

    dim: int
    #: points that node generation always places on the boundary (e.g. vertices)
    anchors: np.ndarray

    def contains(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        raise NotImplementedError

    def chord(self, points, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """Lowest and highest value of coordinate ``axis`` on the line through each point."""
        raise NotImplementedError

    def on_boundary(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def boundary_candidates(self, n: int) -> np.ndarray:
        """A dense, deterministic, roughly uniform sample of about ``n`` boundary points."""
        raise NotImplementedError

    @property
    def measure(self) -> float:
        raise NotImplementedError

    @property
    def boundary_measure(self) -> float:
        raise NotImplementedError

    def boundary_distance(self, points) -> np.ndarray:
        """Smallest distance to the boundary along any coordinate axis."""
        pts = _as_points(points, self.dim)
        out = np.full(len(pts), np.inf)
        for axis in range(self.dim):
            lo, hi = self.chord(pts, axis)
            out = np.minimum(out, np.minimum(pts[:, axis] - lo, hi - pts[:, axis]))
        return out


class ConvexPolytope(Domain):
    """Intersection of half-spaces ``A x <= b`` with known vertices and facets."""

    def __init__(self, A, b, vertices, facets: Sequence[Sequence[int]] | None = None):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.vertices = np.asarray(vertices, dtype=float)
        self.dim = self.vertices.shape[1]
        self.facets = [list(f) for f in facets] if facets is not None else None
        self.anchors = self.vertices.copy()
        # scale rows so the boundary tolerance is a distance
        norms = np.linalg.norm(self.A, axis=1)
        self._An = self.A / norms[:, None]
        self._bn = self.b / norms

    def contains(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = _as_points(points, self.dim)
        return np.all(pts @ self._An.T <= self._bn + tol, axis=1)

    def on_boundary(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = _as_points(points, self.dim)
        slack = pts @ self._An.T - self._bn
        return np.abs(slack.max(axis=1)) <= tol

    def chord(self, points, axis: int):
        pts = _as_points(points, self.dim)
        a_l = self.A[:, axis]
        rest = pts @ self.A.T - np.outer(pts[:, axis], a_l)
        rhs = self.b[None, :] - rest
        lo = np.full(len(pts), -np.inf)
        hi = np.full(len(pts), np.inf)
        pos = a_l > 0
        neg = a_l < 0
        if pos.any():
            hi = np.min(rhs[:, pos] / a_l[pos], axis=1)
        if neg.any():
            lo = np.max(rhs[:, neg] / a_l[neg], axis=1)
        return lo, hi

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def measure(self) -> float:
        if self.dim == 1:
            return float(np.ptp(self.vertices))
        return float(ConvexHull(self.vertices).volume)

    @property
    def boundary_measure(self) -> float:
        if self.dim == 1:
            return 2.0
        return float(ConvexHull(self.vertices).area)

    def _edges(self):
        if self.dim == 2:
            hull = ConvexHull(self.vertices)
            order = hull.vertices
            return [(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]
        edges = set()
        for f in self.facets:
            for i in range(len(f)):
                a, b = f[i], f[(i + 1) % len(f)]
                edges.add((min(a, b), max(a, b)))
        return sorted(edges)

    def boundary_candidates(self, n: int) -> np.ndarray:
        if self.dim == 1:
            return self.vertices.copy()
        V = self.vertices
        edges = self._edges()
        if self.dim == 2:
            lengths = np.array([np.linalg.norm(V[j] - V[i]) for i, j in edges])
            spacing = lengths.sum() / max(n, 1)
            pts = []
            for (i, j), L in zip(edges, lengths):
                k = max(int(round(L / spacing)), 1)
                t = np.arange(1, k)[:, None] / k
                pts.append(V[i] + t * (V[j] - V[i]))
            return np.vstack(pts) if pts else np.empty((0, 2))
        # 3D: low-discrepancy points on fan-triangulated facets, plus edge points
        tris = []
        for f in self.facets:
            for m in range(1, len(f) - 1):
                tris.append((f[0], f[m], f[m + 1]))
        areas = np.array([0.5 * np.linalg.norm(np.cross(V[b] - V[a], V[c] - V[a])) for a, b, c in tris])
        spacing = math.sqrt(areas.sum() / max(n, 1))
        pts = []
        for (a, b, c), area in zip(tris, areas):
            k = max(int(round(area / spacing**2)), 1)
            uv = qmc.Halton(d=2, scramble=False).random(k + 1)[1:]
            flip = uv.sum(axis=1) > 1.0
            uv[flip] = 1.0 - uv[flip]
            pts.append(V[a] + uv[:, :1] * (V[b] - V[a]) + uv[:, 1:] * (V[c] - V[a]))
        for i, j in edges:
            L = np.linalg.norm(V[j] - V[i])
            k = max(int(round(L / spacing)) * 2, 2)
            t = np.arange(1, k)[:, None] / k
            pts.append(V[i] + t * (V[j] - V[i]))
        return np.vstack(pts)


class Interval(ConvexPolytope):
    def __init__(self, a: float, b: float):
        if not a < b:
            raise ValueError("interval requires a < b")
        self.a, self.b_ = float(a), float(b)
        super().__init__([[-1.0], [1.0]], [-a, b], [[a], [b]])

    def __repr__(self):
        return f"Interval({self.a}, {self.b_})"


class Rectangle(ConvexPolytope):
    def __init__(self, x0: float, x1: float, y0: float, y1: float):
        self.limits = (float(x0), float(x1), float(y0), float(y1))
        A = [[-1, 0], [1, 0], [0, -1], [0, 1]]
        super().__init__(A, [-x0, x1, -y0, y1], [[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def __repr__(self):
        return "Rectangle(%g, %g, %g, %g)" % self.limits


class Box(ConvexPolytope):
    def __init__(self, x0, x1, y0, y1, z0, z1):
        self.limits = tuple(float(v) for v in (x0, x1, y0, y1, z0, z1))
        A = [[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]]
        b = [-x0, x1, -y0, y1, -z0, z1]
        verts = [[x, y, z] for z in (z0, z1) for y in (y0, y1) for x in (x0, x1)]
        facets = [[0, 2, 6, 4], [1, 3, 7, 5], [0, 1, 5, 4], [2, 3, 7, 6], [0, 1, 3, 2], [4, 5, 7, 6]]
        super().__init__(A, b, verts, facets)

    def __repr__(self):
        return "Box(%g, %g, %g, %g, %g, %g)" % self.limits


def _simplex_halfspaces(vertices: np.ndarray):
    d = vertices.shape[1]
    centroid = vertices.mean(axis=0)
    A, b = [], []
    for drop in range(d + 1):
        face = np.delete(vertices, drop, axis=0)
        basis = face[1:] - face[0]
        # normal = null vector of the face directions
        normal = np.linalg.svd(np.vstack([basis, np.zeros((1, d))]))[2][-1]
        if normal @ (centroid - face[0]) > 0:
            normal = -normal
        A.append(normal)
        b.append(normal @ face[0])
    return np.array(A), np.array(b)


class Triangle(ConvexPolytope):
    def __init__(self, vertices=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))):
        V = np.asarray(vertices, dtype=float)
        A, b = _simplex_halfspaces(V)
        super().__init__(A, b, V)
        # exact half-spaces for axis-aligned edges keep chord ends exact
        self.A = np.where(np.abs(self.A) < 1e-15, 0.0, self.A)

    def __repr__(self):
        return f"Triangle({self.vertices.tolist()})"


class Tetrahedron(ConvexPolytope):
    def __init__(self, vertices=((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))):
        V = np.asarray(vertices, dtype=float)
        A, b = _simplex_halfspaces(V)
        A = np.where(np.abs(A) < 1e-15, 0.0, A)
        facets = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
        super().__init__(A, b, V, facets)

    def __repr__(self):
        return f"Tetrahedron({self.vertices.tolist()})"


class Ellipsoid(Domain):
    """Axis-aligned ellipse (2D) or ellipsoid (3D): ``sum ((x - c)/a)^2 <= 1``."""

    def __init__(self, center, semi_axes):
        self.center = np.asarray(center, dtype=float)
        self.semi_axes = np.asarray(semi_axes, dtype=float)
        self.dim = len(self.center)
        if self.dim not in (2, 3) or self.semi_axes.shape != self.center.shape:
            raise ValueError("ellipsoids are supported in 2 and 3 dimensions")
        self.anchors = np.empty((0, self.dim))

    def _level(self, pts):
        return np.sum(((pts - self.center) / self.semi_axes) ** 2, axis=1)

    def contains(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = _as_points(points, self.dim)
        return self._level(pts) <= 1.0 + 2.0 * tol / self.semi_axes.min()

    def on_boundary(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = _as_points(points, self.dim)
        return np.abs(self._level(pts) - 1.0) <= 2.0 * tol / self.semi_axes.min()

    def chord(self, points, axis: int):
        pts = _as_points(points, self.dim)
        others = [m for m in range(self.dim) if m != axis]
        rest = np.sum(((pts[:, others] - self.center[others]) / self.semi_axes[others]) ** 2, axis=1)
        half = self.semi_axes[axis] * np.sqrt(np.maximum(1.0 - rest, 0.0))
        return self.center[axis] - half, self.center[axis] + half

    def bounding_box(self):
        return self.center - self.semi_axes, self.center + self.semi_axes

    @property
    def measure(self) -> float:
        unit = math.pi if self.dim == 2 else 4.0 * math.pi / 3.0
        return float(unit * np.prod(self.semi_axes))

    @property
    def boundary_measure(self) -> float:
        a = self.semi_axes
        if self.dim == 2:
            t = np.linspace(0.0, 2.0 * np.pi, 4097)
            speed = np.hypot(a[0] * np.sin(t), a[1] * np.cos(t))
            return float(np.trapezoid(speed, t))
        # Thomsen's approximation, exact for spheres
        p = 1.6075
        ab, ac, bc = (a[0] * a[1]) ** p, (a[0] * a[2]) ** p, (a[1] * a[2]) ** p
        return float(4.0 * math.pi * ((ab + ac + bc) / 3.0) ** (1.0 / p))

    def boundary_candidates(self, n: int) -> np.ndarray:
        a = self.semi_axes
        if self.dim == 2:
            t = np.linspace(0.0, 2.0 * np.pi, 8 * n + 1)
            speed = np.hypot(a[0] * np.sin(t), a[1] * np.cos(t))
            arc = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(t))])
            s = np.arange(n) * arc[-1] / n
            ts = np.interp(s, arc, t)
            return self.center + a * np.column_stack([np.cos(ts), np.sin(ts)])
        # Fibonacci lattice on the unit sphere
        k = np.arange(n) + 0.5
        phi = np.arccos(1.0 - 2.0 * k / n)
        golden = np.pi * (1.0 + 5.0**0.5)
        u = np.column_stack([np.cos(golden * k) * np.sin(phi), np.sin(golden * k) * np.sin(phi), np.cos(phi)])
        return self.center + a * u


class Ellipse(Ellipsoid):
    def __init__(self, center=(0.0, 0.0), semi_axes=(1.0, 1.0)):
        super().__init__(center, semi_axes)

    def __repr__(self):
        return f"Ellipse(center={self.center.tolist()}, semi_axes={self.semi_axes.tolist()})"


class Ball(Ellipsoid):
    def __init__(self, center=(0.0, 0.0, 0.0), radius: float = 1.0):
        super().__init__(center, [radius] * 3)
        self.radius = float(radius)

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class ConvexDomain(Domain):
    """User-supplied convex region.

    ``indicator(points) -> bool array`` and ``chord(points, axis) -> (lo, hi)``
    must be exact; ``boundary_sampler(n) -> points`` and the two measures are
    only needed for node generation.
    """

    def __init__(
        self,
        dim: int,
        indicator: Callable,
        chord: Callable,
        bbox,
        boundary_sampler: Callable | None = None,
        measure: float | None = None,
        boundary_measure: float | None = None,
    ):
        self.dim = dim
        self._indicator = indicator
        self._chord = chord
        self._bbox = (np.asarray(bbox[0], dtype=float), np.asarray(bbox[1], dtype=float))
        self._sampler = boundary_sampler
        self._measure = measure
        self._boundary_measure = boundary_measure
        self.anchors = np.empty((0, dim))

    def contains(self, points, tol: float = BOUNDARY_TOL):
        pts = _as_points(points, self.dim)
        inside = np.asarray(self._indicator(pts), dtype=bool)
        return inside | self.on_boundary(pts, tol)

    def chord(self, points, axis: int):
        pts = _as_points(points, self.dim)
        lo, hi = self._chord(pts, axis)
        return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def on_boundary(self, points, tol: float = BOUNDARY_TOL):
        pts = _as_points(points, self.dim)
        return self.boundary_distance(pts) <= tol

    def bounding_box(self):
        return self._bbox

    def boundary_candidates(self, n: int):
        if self._sampler is None:
            raise ValueError("this domain has no boundary sampler")
        return np.asarray(self._sampler(n), dtype=float)

    @property
    def measure(self):
        if self._measure is None:
            raise ValueError("domain measure not provided")
        return self._measure

    @property
    def boundary_measure(self):
        if self._boundary_measure is None:
            raise ValueError("boundary measure not provided")
        return self._boundary_measure


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Scattered nodes with a per-node boundary flag."""

    coords: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        boundary = np.asarray(self.boundary, dtype=bool)
        if boundary.shape != (len(coords),):
            raise ValueError("boundary mask must have one entry per node")
        if len(coords) > 1:
            sep = _min_separation(coords)
            if sep <= 0.0:
                raise ValueError("node set contains duplicate nodes")
        coords.flags.writeable = False
        boundary.flags.writeable = False
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "boundary", boundary)

    def __len__(self):
        return len(self.coords)

    @property
    def M(self) -> int:
        return len(self.coords) - 1

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @property
    def min_separation(self) -> float:
        return _min_separation(self.coords)


def _min_separation(coords: np.ndarray) -> float:
    if len(coords) < 2:
        return np.inf
    from scipy.spatial import cKDTree

    dist, _ = cKDTree(coords).query(coords, k=2)
    return float(dist[:, 1].min())


def chebyshev_gauss_lobatto(a: float, b: float, M: int) -> NodeSet:
    """Shifted CGL nodes ``(1 - cos(i pi / M)) (b - a)/2 + a``, i = 0..M."""
    if not a < b or M < 1:
        raise ValueError("need a < b and M >= 1")
    i = np.arange(M + 1)
    x = (1.0 - np.cos(i * np.pi / M)) * (b - a) / 2.0 + a
    x[0], x[-1] = a, b
    mask = np.zeros(M + 1, dtype=bool)
    mask[[0, -1]] = True
    return NodeSet(x[:, None], mask)


def equispaced_nodes(a: float, b: float, M: int) -> NodeSet:
    x = np.linspace(a, b, M + 1)
    mask = np.zeros(M + 1, dtype=bool)
    mask[[0, -1]] = True
    return NodeSet(x[:, None], mask)


def grid_nodes(domain: Domain, counts: Sequence[int]) -> NodeSet:
    """Tensor grid over the bounding box, kept where it lies in the domain."""
    lo, hi = domain.bounding_box()
    axes = [np.linspace(lo[k], hi[k], n) for k, n in enumerate(counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    pts = pts[domain.contains(pts)]
    return NodeSet(pts, domain.on_boundary(pts))


def integral_path(domain: Domain, node, axis: int, side: str) -> float:
    """Endpoint of the integral path through ``node`` along ``axis``.

    ``side='left'`` gives the lower chord end, ``'right'`` the upper one.
    """
    pts = _as_points(node, domain.dim)
    if not domain.contains(pts).all():
        raise ValueError(f"node {np.ravel(node).tolist()} lies outside the domain")
    lo, hi = domain.chord(pts, axis)
    if side == "left":
        return float(lo[0])
    if side == "right":
        return float(hi[0])
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


# -- scattered node generation ---------------------------------------------


def _spacing_for(domain: Domain, target: int) -> tuple[float, int]:
    """Nominal spacing h and boundary-node count for ``target`` nodes in total."""
    d = domain.dim
    if d == 1:
        return domain.measure / (target - 1), 2
    V, S = domain.measure, domain.boundary_measure

    def excess(h):
        interior = max(V - 0.5 * S * h, 0.0) / h**d
        return S / h ** (d - 1) + interior - target

    h = brentq(excess, 1e-6 * V ** (1.0 / d), 10.0 * V ** (1.0 / d))
    n_b = int(round(S / h ** (d - 1)))
    n_b = min(max(n_b, d + 1), target - 1)
    return h, n_b


def _mirror_groups(points, mirror, tol):
    """Pair each candidate with its reflection; points on the plane stay single."""
    if mirror is None:
        return points, np.arange(len(points))
    axis, value = mirror
    lower = points[points[:, axis] < value - tol]
    on = points[np.abs(points[:, axis] - value) <= tol].copy()
    on[:, axis] = value
    upper = lower.copy()
    upper[:, axis] = 2.0 * value - lower[:, axis]
    n = len(lower)
    pts = np.vstack([lower, upper, on])
    partner = np.concatenate([np.arange(n, 2 * n), np.arange(n), np.arange(2 * n, 2 * n + len(on))])
    return pts, partner


def _farthest_point_pick(candidates, partner, chosen, count):
    """Greedy max-min selection of ``count`` nodes; picks whole mirror pairs."""
    cand = candidates
    if len(chosen):
        dmin = np.full(len(cand), np.inf)
        for c in np.array_split(chosen, max(1, len(chosen) // 256)):
            diff = cand[:, None, :] - c[None, :, :]
            dmin = np.minimum(dmin, np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).min(axis=1))
    else:
        dmin = np.full(len(cand), np.inf)
        dmin[0] = np.finfo(float).max
    pair_gap = np.linalg.norm(cand - cand[partner], axis=1)
    single = partner == np.arange(len(cand))
    score_cap = np.where(single, np.inf, pair_gap)
    alive = np.ones(len(cand), dtype=bool)
    picked = []
    remaining = count
    while remaining > 0:
        score = np.minimum(dmin, score_cap)
        allowed = alive & (single if remaining == 1 else True)
        if not allowed.any():
            break
        score = np.where(allowed, score, -np.inf)
        i = int(np.argmax(score))
        group = [i] if single[i] else [i, int(partner[i])]
        for g in group:
            picked.append(cand[g])
            alive[g] = False
            dmin = np.minimum(dmin, np.linalg.norm(cand - cand[g], axis=1))
        remaining -= len(group)
    return np.array(picked).reshape(-1, cand.shape[1])


def generate_nodes(
    domain: Domain,
    target: int,
    seed: int = 0,
    mirror: tuple[int, float] | None = None,
    min_separation: float | None = None,
) -> NodeSet:
    """Quasi-uniform irregular nodes: boundary nodes plus scrambled-Halton interior nodes.

    Boundary nodes are selected greedily (max-min distance) from a dense
    deterministic boundary sample, starting from the domain's anchors;
    interior candidates come from a seeded scrambled Halton sequence kept at
    least half a nominal spacing away from the boundary.  ``mirror=(axis, v)``
    makes the set symmetric under reflection about ``x_axis = v``.

    Raises ``RuntimeError`` if the separation threshold cannot be met.
    """
    d = domain.dim
    if target < d + 2:
        raise ValueError(f"need at least {d + 2} nodes in {d}D, got {target}")
    h, n_b = _spacing_for(domain, target)
    threshold = 0.25 * h if min_separation is None else min_separation
    tol = 1e-9 * h

    # boundary
    if d == 1:
        bnodes = domain.anchors.copy()
    else:
        cand = domain.boundary_candidates(max(60 * n_b, 400))
        anchors = domain.anchors
        if mirror is not None:
            axis, value = mirror
            anchors = anchors[np.abs(anchors[:, axis] - value) <= tol] if len(anchors) else anchors
            # vertices off the mirror plane enter as pairs through the candidate pool
            cand = np.vstack([domain.anchors, cand])
        chosen = anchors.copy()
        cand = cand[domain.on_boundary(cand, tol=max(BOUNDARY_TOL, 1e-12))]
        cand, partner = _mirror_groups(cand, mirror, tol)
        if len(chosen):
            keep = np.min(np.linalg.norm(cand[:, None, :] - chosen[None, :, :], axis=2), axis=1) > tol
            idx = np.flatnonzero(keep)
            remap = -np.ones(len(cand), dtype=int)
            remap[idx] = np.arange(len(idx))
            partner = remap[partner[idx]]
            cand = cand[idx]
            lost = partner < 0
            partner[lost] = np.flatnonzero(lost)
        extra = _farthest_point_pick(cand, partner, chosen, n_b - len(chosen))
        bnodes = np.vstack([chosen, extra]) if len(chosen) else extra
    n_i = target - len(bnodes)

    # interior
    lo, hi = domain.bounding_box()
    box = np.prod(hi - lo)
    frac = domain.measure / box
    n_cand = int(max(60 * n_i / frac, 4000))
    sampler = qmc.Halton(d=d, scramble=True, rng=np.random.default_rng(seed))
    pts = lo + (hi - lo) * sampler.random(n_cand)
    pts = pts[domain.contains(pts, tol=0.0)]
    dist = domain.boundary_distance(pts)
    # very coarse targets: the buffer cannot exceed half the deepest candidate
    pts = pts[dist >= min(0.5 * h, 0.5 * dist.max())]
    if mirror is not None:
        axis, value = mirror
        pts = pts[pts[:, axis] < value]
        near = np.abs(pts[:, axis] - value) < 0.25 * h
        pts[near, axis] = value
    cand, partner = _mirror_groups(pts, mirror, tol)
    inner = _farthest_point_pick(cand, partner, bnodes, n_i)
    if len(inner) < n_i:
        raise RuntimeError(f"could only place {len(bnodes) + len(inner)} of {target} nodes")

    coords = np.vstack([bnodes, inner])
    mask = np.zeros(len(coords), dtype=bool)
    mask[: len(bnodes)] = True
    sep = _min_separation(coords)
    if sep < threshold:
        raise RuntimeError(f"cannot place {target} nodes with separation >= {threshold:.3g} (got {sep:.3g})")
    return NodeSet(coords, mask)


# -- node-set files ---------------------------------------------------------


def write_nodes(path, nodes: NodeSet) -> None:
    """One node per line: coordinates then a 0/1 boundary flag."""
    lines = [f"# {len(nodes)} nodes, dim {nodes.dim}; columns: coords..., boundary flag"]
    for x, b in zip(nodes.coords, nodes.boundary):
        lines.append(" ".join(repr(float(v)) for v in x) + f" {int(b)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_nodes(path) -> NodeSet:
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError(f"no nodes in {path}")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValueError(f"inconsistent column count in {path}")
    data = np.array(rows, dtype=float)
    flags = data[:, -1]
    if not np.all((flags == 0) | (flags == 1)):
        raise ValueError("boundary flag column must hold 0 or 1")
    return NodeSet(data[:, :-1], flags.astype(bool))
