"""Sweep distance: an upper bound on continuous dynamic time warping.

A well-behaved monotone morphing sweeps each curve once; its warping cost is
the integral of the minimum leash length over both curves.  Per cell the
leash along a linear motion is sqrt of a quadratic, so each morphing segment
has a closed-form price.  The sweep distance is the cheapest additive path
through the vertex-edge graph, made monotone by midpoint refinement.  The
matching lower bound flattens the elevation inside each grid cell to its
minimum and runs a shortest path on the directed grid.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotReachableError
from .geometry import Curve, Segment
from .morphing import Morphing, is_monotone, monotonize, refine_to_cells
from .driver import midpoint_refine
from .ve import FreeSpace, path_to_morphing

DEGENERATE_REL = 1e-12


@dataclass(frozen=True)
class QuadraticUnderRoot:
    """Coefficients of sqrt(a x^2 + b x + c), nonnegative where integrated.

    Requires a >= 0; for a > 0 the discriminant b^2 - 4ac must not be
    meaningfully positive (a near-tangent root is allowed and handled by the
    absolute-value branch).
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        scale = max(abs(self.a), abs(self.b), abs(self.c), 1e-300)
        if self.a < -1e-12 * scale:
            raise ValueError("leading coefficient must be non-negative")
        disc = self.b * self.b - 4.0 * self.a * self.c
        mag = max(self.b * self.b, abs(4.0 * self.a * self.c), 1e-300)
        if self.a > 1e-12 * scale and disc > 1e-6 * mag:
            raise ValueError("quadratic is negative on an interval")

    def __call__(self, x: float) -> float:
        return math.sqrt(max(self.a * x * x + self.b * x + self.c, 0.0))


def integral_sqrt_quadratic(q: QuadraticUnderRoot, x0: float, x1: float) -> float:
    """Definite integral of sqrt(a x^2 + b x + c) over [x0, x1].

    Closed form with degenerate branches: a ~ 0 falls back to the linear
    radicand, and a vanishing discriminant to the absolute-value integrand
    (the inverse-sinh argument blows up exactly when the quadratic is a
    perfect square).
    """
    if x1 < x0:
        raise ValueError("empty or reversed interval")
    if x1 == x0:
        return 0.0
    a, b, c = q.a, q.b, q.c
    xm = max(abs(x0), abs(x1), 1.0)
    scale = max(a * xm * xm, abs(b) * xm, abs(c), 1e-300)
    for x in (x0, x1):
        if a * x * x + b * x + c < -1e-9 * scale:
            raise ValueError("negative radicand on the integration interval")
    if a * xm * xm <= DEGENERATE_REL * scale:
        if abs(b) * xm <= DEGENERATE_REL * scale:
            return math.sqrt(max(c, 0.0)) * (x1 - x0)

        def flin(x):
            r = max(b * x + c, 0.0)
            return (2.0 / (3.0 * b)) * r * math.sqrt(r)

        return flin(x1) - flin(x0)
    disc = 4.0 * a * c - b * b
    mag = max(b * b, abs(4.0 * a * c), a * a * xm * xm)
    if abs(disc) <= 1e-12 * max(mag, 1e-300):
        sq = math.sqrt(a)

        def fabs_(x):
            u = x + b / (2.0 * a)
            return 0.5 * sq * u * abs(u)

        return fabs_(x1) - fabs_(x0)
    if disc < 0.0:
        raise ValueError("quadratic dips negative inside the interval")
    k = disc / (8.0 * a * math.sqrt(a))
    rd = math.sqrt(disc)

    def fgen(x):
        val = math.sqrt(max(a * x * x + b * x + c, 0.0))
        return k * math.asinh((2.0 * a * x + b) / rd) + (0.5 * x + b / (4.0 * a)) * val

    return fgen(x1) - fgen(x0)


def _price_points(pa0, pa1, pb0, pb1) -> float:
    """Warping cost of the constant-speed linear motion between subsegments.

    Both endpoints move simultaneously; the cost charges the minimum leash
    integral to each curve separately, so coincident directions cost zero on
    the stationary side.
    """
    u = pa0 - pb0
    w = (pa1 - pa0) - (pb1 - pb0)
    c = float(u @ u)
    uw = float(u @ w)
    ww = float(w @ w)
    total = 0.0
    for p0, p1 in ((pa0, pa1), (pb0, pb1)):
        ln = float(np.linalg.norm(p1 - p0))
        if ln == 0.0:
            continue
        q = QuadraticUnderRoot(ww / (ln * ln), 2.0 * uw / ln, c)
        total += integral_sqrt_quadratic(q, 0.0, ln)
    return total


def edge_price(seg_a: Segment, seg_b: Segment) -> float:
    """Price of morphing linearly between two directed subsegments."""
    return _price_points(seg_a.start, seg_a.end, seg_b.start, seg_b.end)


@dataclass
class SweepResult:
    value: float
    morphing: Morphing
    refinement_rounds: int
    capped: bool = False


def morphing_cost(m: Morphing) -> float:
    """Integral warping cost of a morphing, summed per refined segment."""
    mr = refine_to_cells(m)
    pa = mr.curve_a.points_at(mr.points[:, 0])
    pb = mr.curve_b.points_at(mr.points[:, 1])
    total = 0.0
    for k in range(len(mr.points) - 1):
        total += _price_points(pa[k], pa[k + 1], pb[k], pb[k + 1])
    return total


def _cheapest_path(fs: FreeSpace):
    """Additive Dijkstra over the VE graph with integral edge prices."""
    start = fs.start_node
    dist = {start: 0.0}
    parent = {start: None}
    visited = set()
    heap = [(0.0, 0, start)]
    seq = {start: 0}
    pts: dict = {}

    def point(node):
        # (2, d) stack: row 0 on curve A, row 1 on curve B
        p = pts.get(node)
        if p is None:
            x, y = fs.node_point(node)
            p = np.asarray((fs.a.point_at(x), fs.b.point_at(y)))
            pts[node] = p
        return p

    while heap:
        d, _, node = heapq.heappop(heap)
        if node in visited:
            continue
        visited.add(node)
        if fs.is_target(node):
            path = []
            cur = node
            while cur is not None:
                path.append(cur)
                cur = parent[cur]
            path.reverse()
            return path, d
        pn = point(node)
        for succ in fs.node_successors(node):
            if succ in visited:
                continue
            ps = point(succ)
            nd = d + _price_points(pn[0], ps[0], pn[1], ps[1])
            if nd < dist.get(succ, math.inf):
                dist[succ] = nd
                parent[succ] = node
                if succ not in seq:
                    seq[succ] = len(seq)
                heapq.heappush(heap, (nd, seq[succ], succ))
    raise NotReachableError("end corner not reachable")


def sweep_distance(a: Curve, b: Curve, max_rounds: int = 10) -> SweepResult:
    """Cheapest additive morphing through portals, refined to monotonicity.

    The returned value is recomputed on the final monotone morphing and
    upper-bounds the continuous dynamic time warping distance.
    """
    ca, cb = a, b
    rounds = 0
    capped = False
    while True:
        fs = FreeSpace(ca, cb)
        path, _ = _cheapest_path(fs)
        m = path_to_morphing(fs, path)
        if is_monotone(m):
            break
        if rounds >= max_rounds:
            m = monotonize(m)
            capped = True
            break
        ca2, cb2 = midpoint_refine(ca, cb, m)
        if ca2.n == ca.n and cb2.n == cb.n:
            m = monotonize(m)
            capped = True
            break
        ca, cb = ca2, cb2
        rounds += 1
    return SweepResult(morphing_cost(m), m, rounds, capped)


def split(c: Curve) -> Curve:
    """Refinement placing one vertex at every edge midpoint."""
    return c.split()


def _column_cell_minima(a: Curve, b: Curve, i: int) -> np.ndarray:
    """Global elevation minima of all cells in column i, vectorized over j."""
    pa0 = a.vertices[i]
    pdir = (a.vertices[i + 1] - pa0) / a.edge_lengths[i]
    lp = a.edge_lengths[i]
    q0 = b.vertices[:-1]
    qdir = (b.vertices[1:] - q0) / b.edge_lengths[:, None]
    lq = b.edge_lengths
    u = pa0 - q0
    uu = np.einsum("ij,ij->i", u, u)
    up = u @ pdir
    uq = np.einsum("ij,ij->i", u, qdir)
    pq = qdir @ pdir

    def e_of(s, t):
        return uu + 2.0 * s * up - 2.0 * t * uq + s * s - 2.0 * s * t * pq + t * t

    best = np.minimum(
        e_of(np.clip(-up, 0.0, lp), 0.0),
        e_of(np.clip(pq * lq - up, 0.0, lp), lq),
    )
    best = np.minimum(best, e_of(0.0, np.clip(uq, 0.0, lq)))
    best = np.minimum(best, e_of(lp, np.clip(pq * lp + uq, 0.0, lq)))
    det = 1.0 - pq * pq
    safe = np.abs(det) > 1e-12
    t_in = np.where(safe, (uq - pq * up) / np.where(safe, det, 1.0), -1.0)
    s_in = -up + pq * t_in
    inside = safe & (s_in >= 0.0) & (s_in <= lp) & (t_in >= 0.0) & (t_in <= lq)
    best = np.where(inside, np.minimum(best, e_of(s_in, t_in)), best)
    return np.sqrt(np.maximum(best, 0.0))


def cdtw_lower_bound(a: Curve, b: Curve) -> float:
    """Shortest path on the grid with per-cell flattened elevations.

    Each grid edge costs its flattened elevation (the min of the adjacent
    cells' minima) times its arc length; the lower-bound proof's integral
    accounting forces the length factor.  The result never exceeds the sweep
    distance of the same pair.
    """
    a.require_nondegenerate()
    b.require_nondegenerate()
    m = b.n
    alens = a.edge_lengths
    blens = b.edge_lengths
    col = _column_cell_minima(a, b, 0)
    # corner column 0: only upward moves, flattened by the first cell column
    dp = np.concatenate([[0.0], np.cumsum(col * blens)])
    for i in range(a.n - 1):
        # horizontal edges at corner row j flatten cells (i, j-1) and (i, j)
        hflat_full = np.empty(m)
        hflat_full[0] = col[0]
        hflat_full[-1] = col[-1]
        hflat_full[1:-1] = np.minimum(col[:-1], col[1:])
        hc = hflat_full * alens[i]
        if i + 1 <= a.n - 2:
            col_next = _column_cell_minima(a, b, i + 1)
            vflat = np.minimum(col, col_next)
        else:
            col_next = col
            vflat = col
        pv = np.concatenate([[0.0], np.cumsum(vflat * blens)])
        dp = pv + np.minimum.accumulate(dp + hc - pv)
        col = col_next
    return float(dp[-1])
