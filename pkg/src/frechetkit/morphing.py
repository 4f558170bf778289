"""Morphing representation and algebra.

A morphing is a polygonal path in the free-space parameter rectangle of two
curves, stored as matched arc-length pairs.  Matched point pairs in space are
derived on demand through the curves' arc-length parameterization.
"""

from __future__ import annotations

import numpy as np

from .geometry import Curve

# Backward jitter below this relative scale is snapped flat at construction;
# backtrack detection itself uses strict comparison with zero tolerance.
SNAP_REL = 1e-12
ENDPOINT_REL = 1e-9
CELL_SLACK_REL = 1e-9


class Morphing:
    """Synchronized traversal of two curves, as (arc on A, arc on B) pairs."""

    __slots__ = ("points", "curve_a", "curve_b")

    def __init__(self, points, curve_a: Curve, curve_b: Curve, snap: bool = True):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("a morphing needs at least two (x, y) pairs")
        la, lb = curve_a.length, curve_b.length
        if snap:
            for col, scale in ((0, la), (1, lb)):
                tol = SNAP_REL * max(scale, 1.0)
                c = pts[:, col]
                for k in range(1, len(c)):
                    if c[k] < c[k - 1] and c[k - 1] - c[k] <= tol:
                        c[k] = c[k - 1]
        np.clip(pts[:, 0], 0.0, la, out=pts[:, 0])
        np.clip(pts[:, 1], 0.0, lb, out=pts[:, 1])
        tol_a = ENDPOINT_REL * max(la, 1.0)
        tol_b = ENDPOINT_REL * max(lb, 1.0)
        if abs(pts[0, 0]) > tol_a or abs(pts[0, 1]) > tol_b:
            raise ValueError("morphing must start at (0, 0)")
        if abs(pts[-1, 0] - la) > tol_a or abs(pts[-1, 1] - lb) > tol_b:
            raise ValueError("morphing must end at (len A, len B)")
        pts[0] = (0.0, 0.0)
        pts[-1] = (la, lb)
        pts.setflags(write=False)
        self.points = pts
        self.curve_a = curve_a
        self.curve_b = curve_b

    def __len__(self):
        return self.points.shape[0]

    def transpose(self) -> "Morphing":
        """The same coupling read as a morphing from B to A."""
        return Morphing(self.points[:, ::-1], self.curve_b, self.curve_a, snap=False)

    def elevations(self) -> np.ndarray:
        """Leash length at every morphing vertex."""
        pa = self.curve_a.points_at(self.points[:, 0])
        pb = self.curve_b.points_at(self.points[:, 1])
        return np.linalg.norm(pa - pb, axis=1)

    def __repr__(self):
        return f"Morphing({self.points.shape[0]} vertices)"


def identity_morphing(c: Curve) -> Morphing:
    """Diagonal morphing of a curve with itself."""
    return Morphing(np.column_stack([c.prefix, c.prefix]), c, c, snap=False)


def elevation_at(m: Morphing, x: float, y: float) -> float:
    return float(np.linalg.norm(m.curve_a.point_at(x) - m.curve_b.point_at(y)))


def _check_well_behaved(m: Morphing):
    """Every segment must fit inside a single free-space cell."""
    for prefix, col, name in (
        (m.curve_a.prefix, 0, "A"),
        (m.curve_b.prefix, 1, "B"),
    ):
        c = m.points[:, col]
        lo = np.minimum(c[:-1], c[1:])
        hi = np.maximum(c[:-1], c[1:])
        tol = CELL_SLACK_REL * max(prefix[-1], 1.0)
        idx = np.searchsorted(prefix, lo + tol, side="right") - 1
        idx = np.clip(idx, 0, len(prefix) - 2)
        if (hi > prefix[idx + 1] + tol).any():
            k = int(np.argmax(hi > prefix[idx + 1] + tol))
            raise ValueError(
                f"morphing segment {k} spans multiple cells on curve {name}; "
                "refine the representation at cell boundaries first"
            )


def width(m: Morphing) -> float:
    """Maximum leash length along a well-behaved morphing.

    By per-cell convexity of the elevation function the maximum over each
    segment is attained at a vertex, so this is the max over vertices.
    Raises if some segment spans more than one cell.
    """
    _check_well_behaved(m)
    return float(m.elevations().max())


def is_monotone(m: Morphing) -> bool:
    d = np.diff(m.points, axis=0)
    return bool((d >= 0.0).all())


def monotonize(m: Morphing) -> Morphing:
    """Direct monotonization: running maximum of both coordinates."""
    pts = np.maximum.accumulate(m.points, axis=0)
    keep = np.concatenate([[True], (np.diff(pts, axis=0) != 0.0).any(axis=1)])
    return Morphing(pts[keep], m.curve_a, m.curve_b, snap=False)


def backtrack_intervals(m: Morphing):
    """Maximal arc-length intervals traversed backward, per curve.

    Returns ``(on_a, on_b)`` where each entry is an ascending ``(lo, hi)``
    interval covering one maximal run of strictly decreasing coordinates.
    """
    out = []
    for col in (0, 1):
        c = m.points[:, col]
        runs = []
        k = 1
        while k < len(c):
            if c[k] < c[k - 1]:
                start = c[k - 1]
                while k < len(c) and c[k] < c[k - 1]:
                    k += 1
                runs.append((float(c[k - 1]), float(start)))
            else:
                k += 1
        out.append(runs)
    return out[0], out[1]


def _interp(pts, j, u, ucol, vcol):
    u0, u1 = pts[j, ucol], pts[j + 1, ucol]
    if u1 <= u0:
        return float(pts[j, vcol])
    t = (u - u0) / (u1 - u0)
    return float(pts[j, vcol] + t * (pts[j + 1, vcol] - pts[j, vcol]))


def combine(m1: Morphing, m2: Morphing) -> Morphing:
    """Functional composition of two monotone morphings sharing a curve.

    ``m1`` couples A with M and ``m2`` couples M with B; the result couples A
    with B by a merge sweep over the shared M breakpoints.  Where one input
    is constant over an interval (a plateau), the whole interval maps to the
    single matched value on the other side.
    """
    if not (is_monotone(m1) and is_monotone(m2)):
        raise ValueError("combine requires monotone morphings")
    lm1, lm2 = m1.curve_b.length, m2.curve_a.length
    if abs(lm1 - lm2) > 1e-9 * max(lm1, lm2, 1.0):
        raise ValueError(f"shared-curve domain mismatch: {lm1} vs {lm2}")
    p1, p2 = m1.points, m2.points
    n1, n2 = len(p1), len(p2)
    out = [(p1[0, 0], p2[0, 1])]
    i = j = 0
    while i < n1 - 1 or j < n2 - 1:
        nu1 = p1[i + 1, 1] if i < n1 - 1 else None
        nu2 = p2[j + 1, 0] if j < n2 - 1 else None
        take1 = nu2 is None or (nu1 is not None and nu1 <= nu2)
        take2 = nu1 is None or (nu2 is not None and nu2 <= nu1)
        if take1 and take2:
            i += 1
            j += 1
            out.append((p1[i, 0], p2[j, 1]))
        elif take1:
            i += 1
            out.append((p1[i, 0], _interp(p2, j, p1[i, 1], 0, 1)))
        else:
            j += 1
            out.append((_interp(p1, i, p2[j, 0], 1, 0), p2[j, 1]))
    pts = np.asarray(out)
    keep = np.concatenate([[True], (np.diff(pts, axis=0) != 0.0).any(axis=1)])
    return Morphing(pts[keep], m1.curve_a, m2.curve_b, snap=False)


def refine_to_cells(m: Morphing) -> Morphing:
    """Insert vertices wherever a segment crosses a free-space grid line.

    The result encodes the same coupling but is well behaved, so widths and
    per-segment integrals can be evaluated cell by cell.
    """
    pa, pb = m.curve_a.prefix, m.curve_b.prefix
    pts = m.points
    out = [pts[0]]
    for k in range(len(pts) - 1):
        (x0, y0), (x1, y1) = pts[k], pts[k + 1]
        ts = []
        for v0, v1, grid in ((x0, x1, pa), (y0, y1, pb)):
            lo, hi = (v0, v1) if v0 <= v1 else (v1, v0)
            gi = np.searchsorted(grid, lo, side="right")
            gj = np.searchsorted(grid, hi, side="left")
            for g in grid[gi:gj]:
                ts.append((g - v0) / (v1 - v0))
        if ts:
            for t in sorted(ts):
                if 1e-12 < t < 1 - 1e-12:
                    pt = (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
                    if pt != tuple(out[-1]):
                        out.append(np.asarray(pt))
        out.append(pts[k + 1])
    return Morphing(np.asarray(out), m.curve_a, m.curve_b, snap=False)
