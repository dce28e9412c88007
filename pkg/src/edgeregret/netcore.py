"""Network model, shortest-path distances and point geometry.

Nodes are labelled ``1..n`` in the public API (and in instance files).
Edges are identified by their 0-based position in the edge list.  A point
on an edge ``e = [k, l]`` is ``(e, t)`` where ``t`` is the relative distance
from ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import DisconnectedGraphError, InstanceError

#: Global comparison tolerance for parameters and function values.
EPS = 1e-9
#: Relative gap below which two objective values tie when picking a canonical point.
TIE_RTOL = 1e-12


def tie_tol(v: float) -> float:
    return TIE_RTOL * max(1.0, abs(v))


@dataclass(frozen=True)
class Edge:
    id: int
    k: int
    l: int
    length: float

    def label(self) -> str:
        return f"[{self.k},{self.l}]"


@dataclass(frozen=True)
class PointOnEdge:
    """A point ``(edge, t)`` with ``t`` measured from the edge's ``k`` end."""

    edge: int
    t: float

    def __post_init__(self):
        if not (-EPS <= self.t <= 1 + EPS) or not np.isfinite(self.t):
            raise InstanceError(f"t={self.t} outside [0, 1]")
        if self.t < 0.0 or self.t > 1.0:
            object.__setattr__(self, "t", min(max(self.t, 0.0), 1.0))


@dataclass(frozen=True)
class Subedge:
    edge: int
    t1: float
    t2: float

    def __post_init__(self):
        if not (0.0 <= self.t1 <= self.t2 <= 1.0):
            raise InstanceError(f"invalid subedge [{self.t1}, {self.t2}]")


class Network:
    """Immutable undirected network with cached all-pairs distances.

    Args:
        node_count: number of nodes, labelled ``1..node_count``.
        edges: sequence of ``(k, l, length)`` triples.
    """

    def __init__(self, node_count: int, edges: Sequence[tuple[int, int, float]]):
        if int(node_count) != node_count or node_count < 2:
            raise InstanceError("a network needs at least two nodes")
        n = int(node_count)
        if len(edges) == 0:
            raise InstanceError("a network needs at least one edge")
        seen: dict[tuple[int, int], int] = {}
        built = []
        for idx, (k, l, length) in enumerate(edges):
            if int(k) != k or int(l) != l:
                raise InstanceError(f"edge {idx}: node ids must be integers")
            k, l = int(k), int(l)
            if not (1 <= k <= n and 1 <= l <= n):
                raise InstanceError(f"edge {idx}: node id out of range 1..{n}")
            if k == l:
                raise InstanceError(f"edge {idx}: self-loop at node {k}")
            length = float(length)
            if not np.isfinite(length) or length <= 0:
                raise InstanceError(f"edge {idx}: length must be positive, got {length}")
            key = (min(k, l), max(k, l))
            if key in seen:
                raise InstanceError(f"edge {idx}: duplicates edge {seen[key]} between {k} and {l}")
            seen[key] = idx
            built.append(Edge(idx, k, l, length))

        self.node_count = n
        self.edges: tuple[Edge, ...] = tuple(built)
        self._index = seen

        ek = np.array([e.k - 1 for e in built], dtype=np.intp)
        el = np.array([e.l - 1 for e in built], dtype=np.intp)
        ln = np.array([e.length for e in built], dtype=float)
        adj = csr_matrix((np.r_[ln, ln], (np.r_[ek, el], np.r_[el, ek])), shape=(n, n))
        dist = shortest_path(adj, method="D", directed=False)
        if not np.all(np.isfinite(dist)):
            raise DisconnectedGraphError("graph is not connected")
        for arr in (ek, el, ln, dist):
            arr.setflags(write=False)
        self.ek, self.el, self.lengths, self.node_dist = ek, el, ln, dist

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return self.node_count

    def edge(self, e: int) -> Edge:
        return self.edges[e]

    def edge_id(self, k: int, l: int) -> int:
        """Edge id of ``[k, l]`` (either orientation)."""
        try:
            return self._index[(min(k, l), max(k, l))]
        except KeyError:
            raise InstanceError(f"no edge between {k} and {l}") from None

    def dist(self, i: int, j: int) -> float:
        """Shortest-path distance between nodes ``i`` and ``j`` (1-based)."""
        return float(self.node_dist[i - 1, j - 1])

    @property
    def diameter(self) -> float:
        return float(self.node_dist.max())

    def node_point(self, i: int) -> PointOnEdge:
        """Represent node ``i`` as a point on its lowest-id incident edge."""
        for e in self.edges:
            if e.k == i:
                return PointOnEdge(e.id, 0.0)
            if e.l == i:
                return PointOnEdge(e.id, 1.0)
        raise InstanceError(f"node {i} has no incident edge")

    def point_node(self, x: PointOnEdge) -> int | None:
        """Node id if ``x`` sits on an endpoint, else ``None``."""
        e = self.edges[x.edge]
        if x.t <= 0.0:
            return e.k
        if x.t >= 1.0:
            return e.l
        return None

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __repr__(self):
        return f"Network(n={self.n}, m={self.m})"


def build_network(nodes: int, edge_list: Iterable[tuple[int, int, float]]) -> Network:
    return Network(nodes, list(edge_list))


def host_distances(net: Network, e_x: int, t) -> np.ndarray:
    """Distances from points ``(e_x, t)`` to every node.

    Returns an array of shape ``(n,) + shape(t)``.
    """
    t = np.asarray(t, dtype=float)
    k, l, ln = net.ek[e_x], net.el[e_x], net.lengths[e_x]
    dk = net.node_dist[k].reshape((-1,) + (1,) * t.ndim)
    dl = net.node_dist[l].reshape((-1,) + (1,) * t.ndim)
    return np.minimum(t * ln + dk, (1.0 - t) * ln + dl)


def point_node_distance(net: Network, x: PointOnEdge, i: int) -> float:
    e = net.edges[x.edge]
    return min(x.t * e.length + net.dist(e.k, i), (1.0 - x.t) * e.length + net.dist(e.l, i))


def point_point_distance(net: Network, x: PointOnEdge, y: PointOnEdge) -> float:
    ex, ey = net.edges[x.edge], net.edges[y.edge]
    legs_x = ((ex.k, x.t * ex.length), (ex.l, (1.0 - x.t) * ex.length))
    legs_y = ((ey.k, y.t * ey.length), (ey.l, (1.0 - y.t) * ey.length))
    best = min(ax + net.dist(i, j) + ay for i, ax in legs_x for j, ay in legs_y)
    if x.edge == y.edge:
        best = min(best, abs(x.t - y.t) * ex.length)
    return best
