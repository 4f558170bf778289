"""Discrete Frechet distance: classical DP and the retractable grid search.

Both movers advance one step at a time (no simultaneous diagonal moves), so a
morphing is a staircase of +1 steps in exactly one coordinate.  Grid vertex
(i, j) carries weight dist(p_i, q_j); a grid edge costs the max of its
endpoint weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bottleneck import RetractResult, retractable_path_with_node_weights


@dataclass
class DiscreteMorphing:
    """Monotone staircase of 1-based index pairs from (1,1) to (n,m)."""

    steps: list
    width: float


def _point_arrays(P, Q):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.shape[0] == 0 or Q.shape[0] == 0:
        raise ValueError("point sequences must be non-empty")
    if P.shape[1] != Q.shape[1]:
        raise ValueError("point sequences must share a dimension")
    return P, Q


def discrete_frechet_dp(P, Q):
    """Classical O(nm) dynamic program.

    Returns ``(distance, morphing)`` where the morphing witnesses the
    distance and is recovered by backtracking the table.
    """
    P, Q = _point_arrays(P, Q)
    n, m = P.shape[0], Q.shape[0]
    d = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
    val = np.empty((n, m))
    val[0, 0] = d[0, 0]
    for i in range(1, n):
        val[i, 0] = max(val[i - 1, 0], d[i, 0])
    for j in range(1, m):
        val[0, j] = max(val[0, j - 1], d[0, j])
    for i in range(1, n):
        row = val[i]
        up = val[i - 1]
        for j in range(1, m):
            row[j] = max(d[i, j], min(up[j], row[j - 1]))
    steps = [(n, m)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        elif val[i - 1, j] <= val[i, j - 1]:
            i -= 1
        else:
            j -= 1
        steps.append((i + 1, j + 1))
    steps.reverse()
    return float(val[-1, -1]), DiscreteMorphing(steps, float(val[-1, -1]))


class _GridGraph:
    """Implicit grid graph over index pairs with vertex weights dist(p_i, q_j)."""

    def __init__(self, P, Q):
        self.P = P
        self.Q = Q
        self.n = P.shape[0]
        self.m = Q.shape[0]
        self.start_node = (0, 0)

    def is_target(self, node):
        return node == (self.n - 1, self.m - 1)

    def node_weight(self, node):
        i, j = node
        return float(np.linalg.norm(self.P[i] - self.Q[j]))

    def node_successors(self, node):
        i, j = node
        out = []
        if i + 1 < self.n:
            out.append((i + 1, j))
        if j + 1 < self.m:
            out.append((i, j + 1))
        return out


def retractable_discrete_frechet(P, Q, cutoff: float | None = None):
    """Retractable discrete Frechet morphing via bottleneck search.

    Returns ``(distance, morphing, explored)``.  The distance equals the DP
    value; the morphing additionally passes through the bottleneck pair with
    recursively optimal halves.  ``explored`` counts settled grid vertices.
    """
    P, Q = _point_arrays(P, Q)
    res: RetractResult = retractable_path_with_node_weights(
        _GridGraph(P, Q), cutoff=cutoff
    )
    steps = [(i + 1, j + 1) for i, j in res.path]
    return res.bottleneck, DiscreteMorphing(steps, res.bottleneck), res.explored_count
