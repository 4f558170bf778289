"""Retractable bottleneck-path search over implicitly defined directed graphs.

The search is a modified Dijkstra that always settles the node whose best
incoming edge (from the settled set) is cheapest.  The tree it grows contains,
for every settled node, the bottleneck-optimal path whose two halves around
the bottleneck edge are recursively optimal as well.  Node identities are
opaque hashables; ties in edge weight are broken by first-encounter order so
the result is deterministic even with equal weights.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Protocol, Tuple

from .errors import NotReachableError

NodeId = Hashable


class ImplicitGraph(Protocol):
    """Directed graph revealed on demand; successor weights are edge weights."""

    start_node: NodeId

    def is_target(self, node: NodeId) -> bool: ...

    def successors(self, node: NodeId) -> Iterable[Tuple[NodeId, float]]: ...


@dataclass
class RetractResult:
    path: list
    bottleneck: float
    explored_count: int


def retractable_path(g: ImplicitGraph, cutoff: float | None = None) -> RetractResult:
    """Retractable (recursively bottleneck-optimal) path from start to target.

    Stops the moment a target node is settled.  With ``cutoff`` set, the
    search aborts with :class:`NotReachableError` once every frontier entry
    exceeds the cutoff, certifying that the bottleneck value is above it.
    """
    start = g.start_node
    seq: dict = {start: 0}  # stable first-encounter ids for tie-breaking
    best: dict = {start: -float("inf")}
    parent: dict = {start: None}
    # Bottleneck of the tree path to a node: parents are settled when pushed,
    # so their path bottleneck is final when the child's entry is created.
    high: dict = {start: -float("inf")}
    visited: set = set()
    heap: list = [(-float("inf"), 0, start)]
    explored = 0
    while heap:
        w, _, node = heapq.heappop(heap)
        if node in visited:
            continue
        if cutoff is not None and w > cutoff:
            # the heap minimum is the cheapest edge in the current cut, so
            # every path to an unsettled node now has bottleneck > cutoff
            raise NotReachableError(f"bottleneck exceeds cutoff {cutoff}")
        visited.add(node)
        explored += 1
        if g.is_target(node):
            path = []
            cur = node
            while cur is not None:
                path.append(cur)
                cur = parent[cur]
            path.reverse()
            return RetractResult(path, high[node], explored)
        for succ, weight in g.successors(node):
            if succ in visited:
                continue
            if succ not in seq:
                seq[succ] = len(seq)
            if weight < best.get(succ, float("inf")):
                best[succ] = weight
                parent[succ] = node
                high[succ] = max(high[node], weight)
                heapq.heappush(heap, (weight, seq[succ], succ))
    raise NotReachableError("target not reachable from start")


class _NodeWeightAdapter:
    """Derives edge weights as the max of endpoint node weights."""

    def __init__(self, g):
        self._g = g
        self.start_node = g.start_node
        self._w = {g.start_node: g.node_weight(g.start_node)}

    def is_target(self, node):
        return self._g.is_target(node)

    def _weight(self, node):
        w = self._w.get(node)
        if w is None:
            w = self._g.node_weight(node)
            self._w[node] = w
        return w

    def successors(self, node):
        wu = self._weight(node)
        return [(s, max(wu, self._weight(s))) for s in self._g.node_successors(node)]


class ImplicitNodeWeightGraph(Protocol):
    """Graph whose weights live on nodes rather than edges."""

    start_node: NodeId

    def is_target(self, node: NodeId) -> bool: ...

    def node_weight(self, node: NodeId) -> float: ...

    def node_successors(self, node: NodeId) -> Iterable[NodeId]: ...


def retractable_path_with_node_weights(
    g: ImplicitNodeWeightGraph, cutoff: float | None = None
) -> RetractResult:
    """Retractable path where a grid edge costs the max of its endpoints.

    A start node that is already the target yields a single-node path whose
    bottleneck is the node's own weight.
    """
    if g.is_target(g.start_node):
        return RetractResult([g.start_node], g.node_weight(g.start_node), 1)
    res = retractable_path(_NodeWeightAdapter(g), cutoff=cutoff)
    res.bottleneck = max(res.bottleneck, g.node_weight(g.start_node))
    return res
