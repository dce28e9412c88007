"""Comparison solvers: node-restricted minmax regret and mean-demand coverage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context import CoverageContext
from .coverage import as_realization
from .demand import RegretSolution, mean_demand
from .models import max_regret, resolve_model
from .netcore import Network, PointOnEdge, tie_tol

__all__ = ["DeterministicSolution", "EdgeMaximum", "mean_demand", "solve_deterministic", "solve_node_restricted"]


def solve_node_restricted(net: Network, R: float, bounds, model=None, tol=1e-6, context=None) -> RegretSolution:
    """Best node by maximal regret; ties go to the smallest node id.

    ``per_edge_minima`` is empty; the regret of every node is in
    ``stats["node_regrets"]``.
    """
    bounds, model = resolve_model(bounds, model)
    ctx = context or CoverageContext(net, R)
    regrets = []
    best = None
    for v in range(1, net.n + 1):
        x = net.node_point(v)
        r, y, w = max_regret(net, R, bounds, x, model=model, tol=tol, context=ctx)
        regrets.append(r)
        if best is None or r < best[0] - tie_tol(best[0]):
            best = (r, v, x, y, w)
    r, v, x, y, w = best
    return RegretSolution(
        optimum=x,
        regret=r,
        per_edge_minima=[],
        worst_case_alternative=y,
        worst_case_demand=w,
        model="node-restricted",
        stats={"node": v, "node_regrets": regrets},
    )


@dataclass
class EdgeMaximum:
    edge: int
    t: float
    value: float


@dataclass
class DeterministicSolution:
    """Maximizer of covered demand for one known realization."""

    optimum: PointOnEdge
    covered_demand: float
    per_edge_maxima: list[EdgeMaximum]
    model: str = "deterministic"


def _piece_maximum(q0, q1, q2, lo, hi):
    """Leftmost maximizer of a quadratic on ``[lo, hi]``."""
    ts = [lo, hi]
    if q2 < 0:
        s = -q1 / (2.0 * q2)
        if lo < s < hi:
            ts.append(s)
    vals = [q0 + (q1 + q2 * t) * t for t in ts]
    best = max(vals)
    cands = [t for t, v in zip(ts, vals) if v >= best - tie_tol(best)]
    return min(cands), best


def solve_deterministic(net: Network, R: float, w, context=None) -> DeterministicSolution:
    """Maximize covered demand ``g(x, w)`` over the whole network.

    Between consecutive partition points of a host edge ``g`` is affine for
    constant ``w`` and quadratic for affine ``w``, so each piece is
    maximized at an end or at its stationary point.

    Args:
        w: per-edge demand, shape ``(m,)`` or ``(m, 2)`` (intercept, slope).
    """
    w = as_realization(w, net.m)
    ctx = context or CoverageContext(net, R)
    maxima = []
    for e_x in range(net.m):
        tab = ctx.table(e_x)
        # g on every piece as a quadratic in t
        q = np.einsum("e,epk->pk", w[:, 0], np.pad(tab.C, ((0, 0), (0, 0), (0, 1))))
        q = q + 0.5 * np.einsum("e,epk->pk", w[:, 1], tab.CB)
        best = None
        for p in range(tab.n_pieces):
            t, v = _piece_maximum(*q[p], tab.knots[p], tab.knots[p + 1])
            if best is None or v > best[1] + tie_tol(best[1]):
                best = (t, v)
        maxima.append(EdgeMaximum(e_x, float(best[0]), float(best[1])))
    top = max(m.value for m in maxima)
    ties = [m for m in maxima if m.value >= top - tie_tol(top)]
    win = min(ties, key=lambda m: (m.edge, m.t))
    return DeterministicSolution(PointOnEdge(win.edge, win.t), win.value, maxima)
