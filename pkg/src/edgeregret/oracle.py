"""Brute-force regret by dense discretization of the facility positions.

The covered part of each edge is computed directly as a union of at most
three intervals (through either end node, and along the host edge), so the
oracle shares no case analysis with the coverage module.  For an edge with
relative demand ``a + b u`` the covered demand is ``a M0 + b M1`` where
``M0`` is the covered fraction and ``M1`` the integral of ``u`` over it.

The worst case is exact in ``w``: per edge it is the better of ``lb`` and
``ub`` (constant model) or of the four parallelogram corners (linear model).
Only the alternative ``y`` is discretized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .breakpoints import partition_points
from .demand import as_linear
from .models import resolve_model
from .netcore import Network, PointOnEdge, host_distances, tie_tol

_CHUNK = 2_000_000  # max elements of one (m, n_x, n_y) block


def _interval_moments(lo, hi):
    """Length and first moment of ``[lo, hi]``, zero where empty."""
    ok = hi > lo
    return np.where(ok, hi - lo, 0.0), np.where(ok, 0.5 * (hi * hi - lo * lo), 0.0)


def coverage_moments(net: Network, R: float, edges, ts) -> tuple[np.ndarray, np.ndarray]:
    """Covered fraction ``M0`` and moment ``M1`` of every edge, shape ``(m, N)``.

    Args:
        edges: host edge of each point, shape ``(N,)``.
        ts: position of each point on its host edge, shape ``(N,)``.
    """
    edges = np.asarray(edges, dtype=np.intp)
    ts = np.asarray(ts, dtype=float)
    m = net.m
    L = net.lengths[:, None]
    # distance from every point to every node, shape (n, N)
    D = np.empty((net.n, len(ts)))
    for e in np.unique(edges):
        sel = edges == e
        D[:, sel] = host_distances(net, int(e), ts[sel])
    di, dj = D[net.ek], D[net.el]
    ivs = [
        (np.zeros_like(di), np.minimum((R - di) / L, 1.0)),
        (np.maximum(1.0 - (R - dj) / L, 0.0), np.ones_like(dj)),
    ]
    # along the host edge itself
    host = np.arange(m)[:, None] == edges[None, :]
    reach = R / net.lengths[edges]
    h_lo = np.where(host, np.maximum(ts - reach, 0.0), 1.0)
    h_hi = np.where(host, np.minimum(ts + reach, 1.0), 0.0)
    ivs.append((h_lo, h_hi))

    # union of three intervals by inclusion-exclusion
    M0 = np.zeros((m, len(ts)))
    M1 = np.zeros_like(M0)
    for sign, group in (
        (1.0, [(0,), (1,), (2,)]),
        (-1.0, [(0, 1), (0, 2), (1, 2)]),
        (1.0, [(0, 1, 2)]),
    ):
        for idx in group:
            lo = np.max([ivs[i][0] for i in idx], axis=0)
            hi = np.min([ivs[i][1] for i in idx], axis=0)
            a, b = _interval_moments(lo, hi)
            M0 += sign * a
            M1 += sign * b
    return M0, M1


@dataclass
class GridPoints:
    """Candidate points: ``K`` uniform points per edge plus all partition points."""

    edges: np.ndarray
    ts: np.ndarray

    def __len__(self):
        return len(self.ts)

    def point(self, i: int) -> PointOnEdge:
        return PointOnEdge(int(self.edges[i]), float(self.ts[i]))


def grid_points(net: Network, R: float, K: int, with_pp: bool = True) -> GridPoints:
    if K < 2:
        raise ValueError("grid size K must be at least 2")
    u = np.linspace(0.0, 1.0, K)
    edges = [np.full(K, e) for e in range(net.m)]
    ts = [u] * net.m
    if with_pp:
        pp = partition_points(net, R)
        for e in range(net.m):
            t = pp.ts(e)
            edges.append(np.full(len(t), e))
            ts.append(t)
    return GridPoints(np.concatenate(edges).astype(np.intp), np.concatenate(ts))


class _Evaluator:
    """Regret of many ``x`` against a fixed candidate set of ``y``."""

    def __init__(self, net, R, bounds, model):
        bounds, model = resolve_model(bounds, model)
        self.net, self.R, self.model = net, float(R), model
        if model == "constant":
            self.lb, self.ub = bounds.lb[:, None, None], bounds.ub[:, None, None]
        else:
            self.corners = as_linear(bounds).corners()

    def moments(self, pts: GridPoints):
        return coverage_moments(self.net, self.R, pts.edges, pts.ts)

    def regret(self, mx, my):
        """``max_y r(x, y)`` for moments ``mx`` of shape ``(m, Nx)`` and ``my`` of ``(m, Ny)``.

        Returns the maxima and the arg-max index into ``y``.
        """
        (x0, x1), (y0, y1) = mx, my
        n_x, n_y = x0.shape[1], y0.shape[1]
        step = max(1, _CHUNK // max(1, self.net.m * n_y))
        vals = np.empty(n_x)
        arg = np.empty(n_x, dtype=np.intp)
        for s in range(0, n_x, step):
            sl = slice(s, s + step)
            d0 = y0[:, None, :] - x0[:, sl, None]
            if self.model == "constant":
                r = np.maximum(self.ub * d0, self.lb * d0).sum(axis=0)
            else:
                d1 = y1[:, None, :] - x1[:, sl, None]
                r = None
                for k in range(4):
                    a = self.corners[:, k, 0][:, None, None]
                    b = self.corners[:, k, 1][:, None, None]
                    v = a * d0 + b * d1
                    r = v if r is None else np.maximum(r, v)
                r = r.sum(axis=0)
            arg[sl] = np.argmax(r, axis=1)
            vals[sl] = r[np.arange(r.shape[0]), arg[sl]]
        return vals, arg


def grid_regret(net: Network, R: float, bounds, x: PointOnEdge, K: int = 600, model=None) -> float:
    """Lower bound on ``r(x)``: maximum over the grid and partition points."""
    ev = _Evaluator(net, R, bounds, model)
    ys = grid_points(net, R, K)
    mx = ev.moments(GridPoints(np.array([x.edge]), np.array([x.t])))
    return float(ev.regret(mx, ev.moments(ys))[0][0])


@dataclass
class GridOptimum:
    optimum: PointOnEdge
    regret: float
    worst_case_alternative: PointOnEdge
    gap: float
    n_points: int
    n_full: int


def grid_optimum(net: Network, R: float, bounds, K: int = 600, model=None, coarse: int = 17) -> GridOptimum:
    """Minimize :func:`grid_regret` over the same candidate points.

    Equal to evaluating every pair, but organized as a best-first search:
    regret against a coarse subset of alternatives is a lower bound, and
    points are fully evaluated in order of that bound until it exceeds the
    best full value found.  Ties go to the earliest point (smallest edge,
    then grid order).
    """
    ev = _Evaluator(net, R, bounds, model)
    pts = grid_points(net, R, K)
    mom = ev.moments(pts)
    sub = grid_points(net, R, coarse)
    lower, _ = ev.regret(mom, ev.moments(sub))
    order = np.lexsort((np.arange(len(pts)), lower))
    best_val, best_i, best_y = np.inf, -1, -1
    n_full = 0
    for i in order:
        if best_i >= 0 and lower[i] > best_val + tie_tol(best_val):
            break
        v, a = ev.regret((mom[0][:, [i]], mom[1][:, [i]]), mom)
        n_full += 1
        better = best_i < 0 or v[0] < best_val - tie_tol(best_val)
        tie = abs(v[0] - best_val) <= tie_tol(best_val) and i < best_i
        if better or tie:
            best_val, best_i, best_y = float(v[0]), int(i), int(a[0])
    return GridOptimum(
        optimum=pts.point(best_i),
        regret=best_val,
        worst_case_alternative=pts.point(best_y),
        gap=lipschitz_gap(net, bounds, K),
        n_points=len(pts),
        n_full=n_full,
    )


def lipschitz_gap(net: Network, bounds, K: int) -> float:
    """Certified distance between ``r`` at any point and at the nearest grid point.

    Moving a facility by distance ``h`` moves every coverage boundary by at
    most ``h``, so each ``c_e`` changes by at most ``2 h / l_e`` and the
    regret by at most ``sum_e 2 ub_e^max h / l_e``.  The nearest of ``K``
    uniform points on an edge is at most half a grid step away.
    """
    lin = as_linear(bounds)
    ub_max = np.maximum(lin.a_ub, lin.a_ub + lin.b_ub)
    slope = float(np.sum(2.0 * ub_max / net.lengths))
    return slope * float(net.lengths.max()) / (2.0 * (K - 1))
