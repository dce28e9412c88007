"""Bottleneck, network intersect, exact coverage, partition and identical coverage points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coverage import (
    HostTable,
    _bottleneck,
    _solve_branches,
    coverage_bounds,
    coverage_parts,
    kink_candidates,
)
from .netcore import EPS, Network, PointOnEdge, point_node_distance

ENDPOINT, BP, NIP, EP = "endpoint", "BP", "NIP", "EP"

# Offset used to probe the coverage class on both sides of an exact coverage point.
_EP_PROBE = 10 * EPS


def _dedup(ts) -> list[float]:
    out: list[float] = []
    for t in sorted(ts):
        if not out or t - out[-1] > EPS:
            out.append(t)
    return out


def bottleneck_points(net: Network, e: int) -> list[PointOnEdge]:
    """Interior points of ``e`` equidistant from some node via both endpoints."""
    ts = [_bottleneck(net, e, i) for i in range(net.n)]
    return [PointOnEdge(e, t) for t in _dedup(t for t in ts if 0.0 < t < 1.0)]


def network_intersect_points(net: Network, R: float, e: int) -> list[PointOnEdge]:
    """Points of ``e`` at distance exactly ``R`` from some node."""
    ts = []
    for i in range(net.n):
        for t in _solve_branches(net, e, i, R):
            if -EPS <= t <= 1.0 + EPS:
                t = min(max(t, 0.0), 1.0)
                if abs(point_node_distance(net, PointOnEdge(e, t), i + 1) - R) <= EPS * max(1.0, R):
                    ts.append(t)
    return [PointOnEdge(e, t) for t in _dedup(ts)]


def exact_coverage_points(net: Network, R: float, e_x: int) -> list[PointOnEdge]:
    """Points of ``e_x`` from which some other edge is covered exactly.

    Between consecutive kink candidates every ``s_plus``/``s_minus`` is
    affine, so the zeros of ``s_minus - s_plus`` are found per interval.  A
    zero is kept when the common value lies in ``(0, 1)`` and the edge is
    partially covered just left or just right of it.
    """
    knots = kink_candidates(net, R, e_x)
    sp, sm = coverage_bounds(net, R, e_x, knots)
    gap = sm - sp
    cand: list[tuple[int, float]] = []
    for e in range(net.m):
        if e == e_x:
            continue
        g = gap[e]
        for k in np.flatnonzero(np.abs(g) <= EPS):
            cand.append((e, float(knots[k])))
        for k in np.flatnonzero(g[:-1] * g[1:] < 0):
            lo, hi = knots[k], knots[k + 1]
            cand.append((e, float(lo + (hi - lo) * g[k] / (g[k] - g[k + 1]))))
    ts = []
    for e, t in cand:
        sp_t, sm_t = (a[e] for a in coverage_bounds(net, R, e_x, t))
        if not (EPS < sp_t < 1.0 - EPS):
            continue
        probes = np.array([t - _EP_PROBE, t + _EP_PROBE])
        probes = probes[(probes >= 0.0) & (probes <= 1.0)]
        p_sp, p_sm = (a[e] for a in coverage_bounds(net, R, e_x, probes))
        if np.any(p_sm - p_sp > 1e-12):
            ts.append(t)
    return [PointOnEdge(e_x, t) for t in _dedup(ts)]


@dataclass
class EdgePartition:
    edge: int
    t: np.ndarray
    tags: list[frozenset]

    def count(self, tag: str) -> int:
        return sum(tag in s for s in self.tags)


class PartitionPointSet:
    """Partition points per edge, sorted, with origin tags."""

    def __init__(self, per_edge: list[EdgePartition], net: Network):
        self.per_edge = per_edge
        self._net = net

    def ts(self, e: int) -> np.ndarray:
        return self.per_edge[e].t

    def edge_points(self, e: int) -> list[PointOnEdge]:
        return [PointOnEdge(e, float(t)) for t in self.per_edge[e].t]

    def points(self) -> list[PointOnEdge]:
        """Global union: every node once, then interior points edge by edge."""
        pts = [self._net.node_point(i) for i in range(1, self._net.n + 1)]
        for ep in self.per_edge:
            pts.extend(PointOnEdge(ep.edge, float(t)) for t in ep.t[1:-1])
        return pts

    def __len__(self) -> int:
        return len(self.points())

    def counts(self) -> list[dict]:
        return [
            {"edge": ep.edge, "n_bp": ep.count(BP), "n_nip": ep.count(NIP), "n_ep": ep.count(EP)}
            for ep in self.per_edge
        ]


def edge_partition(net: Network, R: float, e: int) -> EdgePartition:
    tagged = [(0.0, ENDPOINT), (1.0, ENDPOINT)]
    tagged += [(x.t, BP) for x in bottleneck_points(net, e)]
    tagged += [(x.t, NIP) for x in network_intersect_points(net, R, e)]
    tagged += [(x.t, EP) for x in exact_coverage_points(net, R, e)]
    tagged.sort()
    ts: list[float] = []
    tags: list[set] = []
    for t, tag in tagged:
        if ts and t - ts[-1] <= EPS:
            tags[-1].add(tag)
            if t in (0.0, 1.0):
                ts[-1] = t
        else:
            ts.append(t)
            tags.append({tag})
    # endpoints absorb anything within EPS of them
    if len(ts) > 2 and ts[-1] - ts[-2] <= EPS:
        ts.pop(-2)
        tags[-1] |= tags.pop(-2)
    return EdgePartition(e, np.array(ts), [frozenset(s) for s in tags])


def partition_points(net: Network, R: float) -> PartitionPointSet:
    return PartitionPointSet([edge_partition(net, R, e) for e in range(net.m)], net)


def identical_coverage_points(
    net: Network, R: float, e_x: int, y: PointOnEdge, e: int, table: HostTable | None = None
) -> list[PointOnEdge]:
    """Points ``z`` on ``e_x`` with ``c_e(z) = c_e(y)``.

    Solved per partition subinterval of ``e_x``; a whole-subinterval solution
    contributes its two ends.
    """
    if table is None:
        table = HostTable(net, R, e_x, edge_partition(net, R, e_x).t)
    cy = float(coverage_parts(net, R, y.edge, y.t)[0][e])
    ts = []
    for p in range(table.n_pieces):
        lo, hi = table.knots[p], table.knots[p + 1]
        a, b = table.C[e, p]
        if abs(b) * (hi - lo) <= EPS:
            if abs(a + b * 0.5 * (lo + hi) - cy) <= EPS:
                ts += [lo, hi]
            continue
        z = (cy - a) / b
        if lo - EPS <= z <= hi + EPS:
            ts.append(min(max(z, lo), hi))
    return [PointOnEdge(e_x, t) for t in _dedup(ts)]
