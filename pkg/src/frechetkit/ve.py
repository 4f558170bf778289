"""Free-space diagram, elevation function, portals, and the vertex-edge graph.

The parameter rectangle of two curves is cut into a grid by their vertices.
On every grid edge the elevation function (leash length) has a unique
minimum, the *portal*: the nearest-point distance between a vertex of one
curve and an edge of the other.  Restricting morphings to enter and leave
cells through portals collapses the continuous problem to a bottleneck
search on an implicit directed graph whose retractable path yields the
vertex-edge Frechet morphing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bottleneck import retractable_path_with_node_weights
from .geometry import Curve, Segment, nearest_on_segment
from .morphing import Morphing

# Node kinds.  Portals on grid edges adjacent to the corners are relocated to
# the corner nodes themselves.
K_START = 0
K_END = 1
K_H = 2  # portal of A-edge i against B-vertex j (horizontal grid edge)
K_V = 3  # portal of A-vertex i against B-edge j (vertical grid edge)

START = (K_START, 0, 0)
END = (K_END, 0, 0)


def portal(vertex, edge: Segment):
    """Vertex-edge event: nearest point on the edge and its distance."""
    t, _, d = edge.nearest(vertex)
    return t, d


@dataclass(frozen=True)
class CellElevation:
    """Squared-elevation quadratic of one free-space cell.

    With unit edge directions p and q, offset u between the edge start
    points, and parameters (s, t) measured as arc lengths along the two
    edges, the squared leash is
    ``E(s, t) = |u|^2 + 2 s <u,p> - 2 t <u,q> + s^2 - 2 s t <p,q> + t^2``.
    """

    uu: float
    up: float
    uq: float
    dot_pq: float
    len_p: float
    len_q: float
    p0: np.ndarray
    pdir: np.ndarray
    q0: np.ndarray
    qdir: np.ndarray

    def squared(self, s: float, t: float) -> float:
        return (
            self.uu
            + 2.0 * s * self.up
            - 2.0 * t * self.uq
            + s * s
            - 2.0 * s * t * self.dot_pq
            + t * t
        )

    def _check_range(self, s, t):
        tol = 1e-9 * max(self.len_p, self.len_q, 1.0)
        if not (-tol <= s <= self.len_p + tol and -tol <= t <= self.len_q + tol):
            raise ValueError(f"(s={s}, t={t}) outside cell")


def cell_elevation(a: Curve, b: Curve, i: int, j: int) -> CellElevation:
    """Elevation quadratic of grid cell (i, j) (0-based edge indices)."""
    p0, p1 = a.vertices[i], a.vertices[i + 1]
    q0, q1 = b.vertices[j], b.vertices[j + 1]
    lp = float(a.edge_lengths[i])
    lq = float(b.edge_lengths[j])
    pdir = (p1 - p0) / lp
    qdir = (q1 - q0) / lq
    u = p0 - q0
    return CellElevation(
        uu=float(u @ u),
        up=float(u @ pdir),
        uq=float(u @ qdir),
        dot_pq=float(pdir @ qdir),
        len_p=lp,
        len_q=lq,
        p0=p0,
        pdir=pdir,
        q0=q0,
        qdir=qdir,
    )


def elevation_in_cell(cell: CellElevation, s: float, t: float) -> float:
    """Leash length between the points at arc s and t along the two edges."""
    cell._check_range(s, t)
    return float(np.sqrt(max(cell.squared(s, t), 0.0)))


def elevation_gradient(cell: CellElevation, s: float, t: float):
    """Partial derivatives of the squared elevation along s and t."""
    ds = 2.0 * cell.up + 2.0 * s - 2.0 * t * cell.dot_pq
    dt = -2.0 * cell.uq - 2.0 * s * cell.dot_pq + 2.0 * t
    return ds, dt


@dataclass(frozen=True)
class AffineMap:
    slope: float
    intercept: float

    def __call__(self, x: float) -> float:
        return self.slope * x + self.intercept


def min_lines(cell: CellElevation):
    """Per-row and per-column minimizers of the cell's elevation.

    ``h(t)`` is the s-coordinate minimizing E(., t); ``v(s)`` the
    t-coordinate minimizing E(s, .).  Both are affine and unclamped.
    """
    h = AffineMap(cell.dot_pq, -cell.up)
    v = AffineMap(cell.dot_pq, cell.uq)
    return h, v


def cell_min_elevation(cell: CellElevation) -> float:
    """Global minimum of the elevation over the closed cell."""
    det = 1.0 - cell.dot_pq * cell.dot_pq
    if abs(det) > 1e-12:
        t = (cell.uq - cell.dot_pq * cell.up) / det
        s = -cell.up + cell.dot_pq * t
        if 0.0 <= s <= cell.len_p and 0.0 <= t <= cell.len_q:
            return float(np.sqrt(max(cell.squared(s, t), 0.0)))
    h, v = min_lines(cell)
    best = np.inf
    for s, t in (
        (min(max(h(0.0), 0.0), cell.len_p), 0.0),
        (min(max(h(cell.len_q), 0.0), cell.len_p), cell.len_q),
        (0.0, min(max(v(0.0), 0.0), cell.len_q)),
        (cell.len_p, min(max(v(cell.len_p), 0.0), cell.len_q)),
    ):
        best = min(best, cell.squared(s, t))
    return float(np.sqrt(max(best, 0.0)))


class FreeSpace:
    """Implicit VE graph of two curves, with memoized portal data.

    Node ids are ``(kind, i, j)`` tuples, so coincident portals on the shared
    grid edge of vertically adjacent cells are a single graph node.  An
    optional ``weight_fn(node, x, y, elevation)`` replaces the node weight
    used by searches (the flattened lower-bound machinery relies on this).
    """

    def __init__(self, a: Curve, b: Curve, weight_fn=None):
        a.require_nondegenerate()
        b.require_nondegenerate()
        self.a = a
        self.b = b
        self.na = a.n - 1  # edge counts
        self.nb = b.n - 1
        self._info: dict = {}
        self._weight_fn = weight_fn
        self.start_node = START

    # -- node data --------------------------------------------------------

    def node_info(self, node):
        """(x, y, elevation) of a node in parameter space."""
        info = self._info.get(node)
        if info is None:
            kind, i, j = node
            a, b = self.a, self.b
            if kind == K_START:
                info = (0.0, 0.0, float(np.linalg.norm(a.vertices[0] - b.vertices[0])))
            elif kind == K_END:
                info = (
                    a.length,
                    b.length,
                    float(np.linalg.norm(a.vertices[-1] - b.vertices[-1])),
                )
            elif kind == K_H:
                t, _, d = nearest_on_segment(
                    b.vertices[j], a.vertices[i], a.vertices[i + 1]
                )
                info = (float(a.prefix[i] + t * a.edge_lengths[i]), float(b.prefix[j]), d)
            else:
                t, _, d = nearest_on_segment(
                    a.vertices[i], b.vertices[j], b.vertices[j + 1]
                )
                info = (float(a.prefix[i]), float(b.prefix[j] + t * b.edge_lengths[j]), d)
            self._info[node] = info
        return info

    def node_point(self, node):
        x, y, _ = self.node_info(node)
        return x, y

    # -- search interface ---------------------------------------------------

    def is_target(self, node):
        return node[0] == K_END

    def node_weight(self, node):
        x, y, elev = self.node_info(node)
        if self._weight_fn is not None:
            return self._weight_fn(node, x, y, elev)
        return elev

    def _collapse(self, kind, i, j):
        if kind == K_H:
            if i == self.na - 1 and j == self.nb:
                return END
        else:
            if i == self.na and j == self.nb - 1:
                return END
        return (kind, i, j)

    def node_successors(self, node):
        kind, i, j = node
        if kind == K_END:
            return []
        if kind == K_START:
            i, j = 0, 0
        elif kind == K_H:
            if j > self.nb - 1:
                return []  # top boundary: incoming portal of no cell
        else:
            if i > self.na - 1:
                return []  # right boundary
        top = self._collapse(K_H, i, j + 1)
        right = self._collapse(K_V, i + 1, j)
        return [top] if top == right else [top, right]


def ve_successors(node, a: Curve, b: Curve):
    """Successor nodes and edge weights of a VE-graph node.

    Edge weight is the max of the two endpoint elevations.
    """
    fs = FreeSpace(a, b)
    w = fs.node_weight(node)
    return [(s, max(w, fs.node_weight(s))) for s in fs.node_successors(node)]


def path_to_morphing(fs: FreeSpace, path) -> Morphing:
    pts = np.asarray([fs.node_point(node) for node in path])
    return Morphing(pts, fs.a, fs.b)


def ve_frechet(a: Curve, b: Curve, cutoff: float | None = None):
    """Retractable VE Frechet distance, morphing, and settled-node count.

    The distance is the bottleneck of the retractable path from the start to
    the end corner; it lower-bounds the continuous Frechet distance.
    """
    fs = FreeSpace(a, b)
    res = retractable_path_with_node_weights(fs, cutoff=cutoff)
    return res.bottleneck, path_to_morphing(fs, res.path), res.explored_count
