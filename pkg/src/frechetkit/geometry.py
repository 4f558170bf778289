"""Points, segments, polylines and arc-length parameterization.

Points are plain float64 numpy arrays of shape ``(d,)``; a curve stores its
vertices as an ``(n, d)`` array together with cached prefix arc-lengths, so
the point at any arc length is a cheap interpolation.  All values are
immutable after construction and every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurveError

# Relative tolerance used when clamping arc-length queries.
ARCLEN_CLAMP_REL = 1e-9


def dist(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(np.linalg.norm(p - q))


def nearest_on_segment(p, start, end):
    """Closest point of segment [start, end] to p.

    Returns ``(t, foot, distance)`` with ``t`` in [0, 1] and
    ``foot = start + t * (end - start)``.  A zero-length segment yields t=0.
    """
    p = np.asarray(p, dtype=float)
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    d = end - start
    dd = float(d @ d)
    if dd == 0.0:
        return 0.0, start.copy(), float(np.linalg.norm(p - start))
    t = float((p - start) @ d) / dd
    if t <= 0.0:
        t = 0.0
    elif t >= 1.0:
        t = 1.0
    foot = start + t * d
    return t, foot, float(np.linalg.norm(p - foot))


@dataclass(frozen=True)
class Segment:
    """Directed segment between two points of equal dimension."""

    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        start = np.asarray(self.start, dtype=float)
        end = np.asarray(self.end, dtype=float)
        if start.shape != end.shape or start.ndim != 1:
            raise ValueError("segment endpoints must be points of equal dimension")
        if not (np.isfinite(start).all() and np.isfinite(end).all()):
            raise ValueError("segment endpoints must be finite")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def nearest(self, p):
        return nearest_on_segment(p, self.start, self.end)


class Curve:
    """Polygonal curve with cached prefix arc-lengths.

    Zero-length edges are dropped at construction.  A raw single-vertex input
    is kept as two coincident vertices and flagged degenerate; distance
    computations reject such curves.  Multi-vertex input that collapses to a
    single point is rejected outright.
    """

    __slots__ = ("vertices", "prefix", "degenerate", "_edge_len")

    def __init__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("curve needs at least one vertex of dimension >= 1")
        if not np.isfinite(pts).all():
            raise ValueError("curve vertices must be finite")
        degenerate = False
        if pts.shape[0] == 1:
            pts = np.vstack([pts, pts])
            degenerate = True
        else:
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            keep = np.concatenate([[True], seg > 0.0])
            pts = pts[keep]
            if pts.shape[0] < 2:
                raise ValueError("curve collapses to a single point")
        lens = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        self.vertices = pts
        self.vertices.setflags(write=False)
        self.prefix = np.concatenate([[0.0], np.cumsum(lens)])
        self.prefix.setflags(write=False)
        self.degenerate = degenerate
        self._edge_len = lens

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def length(self) -> float:
        return float(self.prefix[-1])

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._edge_len

    def require_nondegenerate(self):
        if self.degenerate:
            raise DegenerateCurveError("curve collapses to a single point")

    # -- arc-length parameterization -------------------------------------

    def _clamp(self, x: float) -> float:
        tol = ARCLEN_CLAMP_REL * max(self.length, 1.0)
        if x < -tol or x > self.length + tol:
            raise ValueError(f"arc length {x} outside [0, {self.length}]")
        return min(max(x, 0.0), self.length)

    def point_at(self, x: float) -> np.ndarray:
        """The unique point at arc length ``x`` along the curve."""
        x = self._clamp(float(x))
        if x >= self.length:
            return self.vertices[-1].copy()
        i = int(np.searchsorted(self.prefix, x, side="right")) - 1
        t = x - self.prefix[i]
        return self.vertices[i] + (t / self._edge_len[i]) * (
            self.vertices[i + 1] - self.vertices[i]
        )

    def points_at(self, xs) -> np.ndarray:
        """Vectorized :meth:`point_at` for an array of arc lengths."""
        xs = np.asarray(xs, dtype=float)
        tol = ARCLEN_CLAMP_REL * max(self.length, 1.0)
        if ((xs < -tol) | (xs > self.length + tol)).any():
            raise ValueError("arc length outside curve range")
        xs = np.clip(xs, 0.0, self.length)
        idx = np.searchsorted(self.prefix, xs, side="right") - 1
        idx = np.clip(idx, 0, self.n - 2)
        el = self._edge_len[idx]
        t = np.divide(xs - self.prefix[idx], el, out=np.zeros_like(el), where=el > 0)
        return self.vertices[idx] + t[:, None] * (
            self.vertices[idx + 1] - self.vertices[idx]
        )

    def edge_index_at(self, x: float) -> int:
        """Index of the edge whose closed arc interval contains ``x``.

        Values on a shared vertex resolve to the edge starting there (the
        last edge for ``x == length``).
        """
        x = self._clamp(float(x))
        i = int(np.searchsorted(self.prefix, x, side="right")) - 1
        return min(i, self.n - 2)

    # -- derived curves ---------------------------------------------------

    def subcurve(self, indices) -> "Curve":
        """Curve through the given strictly increasing vertex subset."""
        idx = np.asarray(indices, dtype=int)
        return Curve(self.vertices[idx])

    def slice(self, i: int, j: int) -> "Curve":
        """Curve over the consecutive vertex range ``i..j`` inclusive."""
        if not 0 <= i < j < self.n:
            raise ValueError(f"bad slice [{i}, {j}]")
        return Curve(self.vertices[i : j + 1])

    def insert_arclengths(self, xs) -> "Curve":
        """Refinement: add vertices at the given arc lengths.

        Geometry is unchanged; values within 1e-12 of the total length of an
        existing vertex (or of each other) are dropped.
        """
        xs = sorted(float(self._clamp(x)) for x in xs)
        if not xs:
            return self
        tol = 1e-12 * max(self.length, 1.0)
        out = []
        vi = 0
        last = -np.inf
        for x in xs:
            if x - last <= tol:
                continue
            while vi < self.n and self.prefix[vi] < x - tol:
                out.append(self.vertices[vi])
                vi += 1
            if vi < self.n and abs(self.prefix[vi] - x) <= tol:
                continue
            out.append(self.point_at(x))
            last = x
        out.extend(self.vertices[vi:])
        return Curve(np.asarray(out))

    def split(self) -> "Curve":
        """Refinement placing one vertex at every edge midpoint."""
        mids = 0.5 * (self.vertices[:-1] + self.vertices[1:])
        out = np.empty((2 * self.n - 1, self.dim))
        out[0::2] = self.vertices
        out[1::2] = mids
        return Curve(out)

    def __repr__(self):
        return f"Curve(n={self.n}, dim={self.dim}, length={self.length:.6g})"
