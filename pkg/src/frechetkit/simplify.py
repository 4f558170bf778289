"""Curve simplification with Frechet-distance guarantees.

Three simplifiers are provided: the linear greedy distance scan, the
hierarchical profile preprocessor with its output-sensitive extractor, and
the exponential/binary-search greedy that yields fewer vertices.  All of them
return vertex subsets of the source curve containing both endpoints.  The
spine projection (3-approximation of the distance between a subcurve and the
segment joining its endpoints) is the shared width oracle.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .geometry import Curve, Segment
from .morphing import Morphing


@dataclass
class SimplifiedCurve:
    """Strictly increasing vertex indices into the source curve."""

    indices: np.ndarray
    source: Curve
    explored: int | None = None

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=int)

    def curve(self) -> Curve:
        return self.source.subcurve(self.indices)

    def is_full(self) -> bool:
        return len(self.indices) == self.source.n


@dataclass
class SimplificationProfile:
    """Per-vertex spine widths from the hierarchical preprocessor.

    ``values[k]`` is the max spine width of the two half ranges split at k
    when k is the midpoint of its recursion interval; entries for the first
    and last vertex are zero by convention and never read.
    """

    values: np.ndarray
    source: Curve


def _dedupe_indices(c: Curve, idx):
    """Drop indices whose vertices coincide with the previous kept vertex."""
    out = [idx[0]]
    for k in idx[1:]:
        if not np.array_equal(c.vertices[k], c.vertices[out[-1]]):
            out.append(k)
    if len(out) == 1:  # all coincident; keep the endpoints anyway
        out.append(idx[-1])
    elif out[-1] != idx[-1]:
        out[-1] = idx[-1]
    return np.asarray(out, dtype=int)


def delta_simplify(c: Curve, delta: float) -> SimplifiedCurve:
    """Greedy scan marking the first vertex at distance >= delta.

    The result is within Frechet distance delta of the source.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    verts = c.vertices
    marked = [0]
    cur = verts[0]
    for i in range(1, c.n):
        if np.linalg.norm(verts[i] - cur) >= delta:
            marked.append(i)
            cur = verts[i]
    if marked[-1] != c.n - 1:
        marked.append(c.n - 1)
    return SimplifiedCurve(np.asarray(marked), c)


def _spine_projection(verts: np.ndarray):
    """Never-retreat projection of a vertex run onto its spine.

    Returns ``(params, width)`` where params are monotone arc positions along
    the segment joining the first and last vertex, and width is the max leash
    of the induced morphing (at most 3x the true Frechet distance).
    """
    d = verts[-1] - verts[0]
    dd = float(d @ d)
    if dd == 0.0:
        params = np.zeros(len(verts))
        w = float(np.linalg.norm(verts - verts[0], axis=1).max())
        return params, w
    length = float(np.sqrt(dd))
    t = np.clip((verts - verts[0]) @ d / dd, 0.0, 1.0)
    params = np.maximum.accumulate(t) * length
    feet = verts[0] + (params / length)[:, None] * d
    w = float(np.linalg.norm(verts - feet, axis=1).max())
    return params, w


def spine_width(c: Curve, i: int, j: int) -> float:
    """Spine-morphing width of the consecutive vertex range i..j."""
    return _spine_projection(c.vertices[i : j + 1])[1]


def spine_morphing(c: Curve, s: Segment):
    """Monotone morphing between a curve and a segment, width <= 3x optimal.

    Requires the nearest point of the curve's first vertex on the segment to
    be the segment start, and of its last vertex to be the segment end.
    Built by nearest-point projection followed by a never-retreat fix.
    """
    t0, _, _ = s.nearest(c.vertices[0])
    t1, _, _ = s.nearest(c.vertices[-1])
    if s.length == 0.0:
        raise ValueError("spine morphing needs a segment of positive length")
    if t0 > 1e-9 or t1 < 1.0 - 1e-9:
        raise ValueError("curve endpoints must project to the segment endpoints")
    seg_pts = np.vstack([s.start, s.end])
    verts = c.vertices
    d = s.end - s.start
    dd = float(d @ d)
    t = np.clip((verts - s.start) @ d / dd, 0.0, 1.0)
    params = np.maximum.accumulate(t) * s.length
    params[-1] = s.length
    feet = s.start + (params / s.length)[:, None] * d
    w = float(np.linalg.norm(verts - feet, axis=1).max())
    m = Morphing(np.column_stack([c.prefix, params]), c, Curve(seg_pts), snap=False)
    return m, w


def _piecewise_spine(c: Curve, indices: np.ndarray):
    """Concatenated per-edge spine morphings against the simplified curve.

    Returns the morphing, the per-simplified-edge widths, and their max.
    """
    sub = c.subcurve(indices)
    pts = [(0.0, 0.0)]
    widths = np.zeros(len(indices) - 1)
    for e in range(len(indices) - 1):
        i, j = int(indices[e]), int(indices[e + 1])
        params, w = _spine_projection(c.vertices[i : j + 1])
        widths[e] = w
        xs = c.prefix[i : j + 1]
        ys = np.minimum(sub.prefix[e] + params, sub.prefix[e + 1])
        ys[-1] = sub.prefix[e + 1]
        for k in range(1, len(xs)):
            pts.append((xs[k], ys[k]))
    m = Morphing(np.asarray(pts), c, sub, snap=False)
    return m, widths


def greedy_morphing(c: Curve, sub: SimplifiedCurve):
    """Monotone morphing between a curve and a vertex-subset simplification.

    For a delta-simplification the width is at most 2*delta; for arbitrary
    subsets it is a valid (possibly loose) upper bound on their distance.
    """
    m, widths = _piecewise_spine(c, sub.indices)
    return m, float(widths.max())


def compute_profile(c: Curve) -> SimplificationProfile:
    """Hierarchical spine widths enabling output-sensitive extraction."""
    values = np.zeros(c.n)
    stack = [(0, c.n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        k = (i + j) // 2
        values[k] = max(spine_width(c, i, k), spine_width(c, k, j))
        stack.append((i, k))
        stack.append((k, j))
    return SimplificationProfile(values, c)


def extract(profile: SimplificationProfile, w: float) -> SimplifiedCurve:
    """Recursive traversal keeping midpoints whose stored width exceeds w.

    A kept midpoint is recursed into; other midpoints are still emitted (one
    extra vertex buys an unconditional guarantee).  The traversal touches a
    number of nodes proportional to the output size, reported via
    ``explored``.
    """
    if w < 0:
        raise ValueError("w must be non-negative")
    c = profile.source
    values = profile.values
    out = [0]
    explored = 0
    stack = [("visit", 0, c.n - 1)]
    while stack:
        tag, i, j = stack.pop()
        if tag == "emit":
            out.append(i)
            continue
        explored += 1
        if j - i < 2:
            continue
        k = (i + j) // 2
        if values[k] > w:
            stack.append(("visit", k, j))
            stack.append(("emit", k, k))
            stack.append(("visit", i, k))
        else:
            out.append(k)
    out.append(c.n - 1)
    return SimplifiedCurve(_dedupe_indices(c, out), c, explored=explored)


def greedy_simplify(c: Curve, delta: float) -> SimplifiedCurve:
    """Greedy skip via exponential + binary search on the spine oracle.

    From the current vertex, finds the largest prefix whose spine width stays
    within delta and jumps there.  The spine oracle is a 3-approximation and
    not monotone in the prefix length, so minimality is heuristic; the
    distance guarantee distFr(c, result) <= delta always holds because each
    kept edge certifies its own piece.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = c.n
    out = [0]
    j = 0
    while j < n - 1:
        step = 1
        ok = j + 1
        while j + step < n and spine_width(c, j, j + step) <= delta:
            ok = j + step
            step *= 2
        lo, hi = ok, min(j + step, n - 1)
        while lo < hi:  # largest k in (ok, hi] still within delta
            mid = (lo + hi + 1) // 2
            if spine_width(c, j, mid) <= delta:
                lo = mid
            else:
                hi = mid - 1
        out.append(lo)
        j = lo
    return SimplifiedCurve(_dedupe_indices(c, out), c)


def combined_simplify(profile: SimplificationProfile, delta: float) -> SimplifiedCurve:
    """Fast extraction at delta/10 followed by greedy cleanup at 0.9*delta.

    The triangle inequality gives distFr(source, result) <= delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    coarse = extract(profile, delta / 10.0)
    refined = greedy_simplify(coarse.curve(), 0.9 * delta)
    return SimplifiedCurve(coarse.indices[refined.indices], profile.source)


# -- profile persistence (flat little-endian doubles) ------------------------


def save_profile(profile: SimplificationProfile, path):
    with open(path, "wb") as fh:
        fh.write(struct.pack("<q", len(profile.values)))
        fh.write(profile.values.astype("<f8").tobytes())


def load_profile(path, source: Curve) -> SimplificationProfile:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise ValueError(f"truncated profile file {path}")
    (n,) = struct.unpack_from("<q", raw)
    if n != source.n or len(raw) != 8 + 8 * n:
        raise ValueError(f"profile {path} does not match the curve")
    values = np.frombuffer(raw, dtype="<f8", count=n, offset=8).astype(float)
    return SimplificationProfile(values, source)
