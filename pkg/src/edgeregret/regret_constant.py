"""Minmax-regret location with unknown constant edge demand.

For fixed ``x`` and alternative ``y`` the worst realization puts ``ub_e`` on
edges that ``y`` covers at least as well as ``x`` and ``lb_e`` elsewhere,
so ``r(x, y) = sum_e max(ub_e * d_e, lb_e * d_e)`` with
``d_e = c_e(y) - c_e(x)``.  The maximum over ``y`` is attained at a
partition point, and on each host edge ``r(., y)`` is piecewise linear with
breakpoints at partition and identical coverage points.
"""

from __future__ import annotations

import numpy as np

from .breakpoints import identical_coverage_points
from .context import CoverageContext
from .coverage import PiecewiseFn, affine_profile, coverage_parts, merge_close
from .demand import ConstantDemandBounds, EdgeMinimum, LinearDemandBounds, RegretSolution, pick_best
from .envelope import EnvelopeFn, envelope_from_arrays, minimize_envelope
from .netcore import EPS, Network, PointOnEdge


def _constant(bounds) -> ConstantDemandBounds:
    if isinstance(bounds, LinearDemandBounds):
        return bounds.as_constant()
    return bounds


def _ctx(net, R, context) -> CoverageContext:
    if context is None:
        return CoverageContext(net, R)
    if context.net is not net or context.R != R:
        raise ValueError("context belongs to a different instance")
    return context


def worst_case_demand(net: Network, R: float, bounds, x: PointOnEdge, y: PointOnEdge) -> np.ndarray:
    b = _constant(bounds)
    cx = coverage_parts(net, R, x.edge, x.t)[0]
    cy = coverage_parts(net, R, y.edge, y.t)[0]
    return np.where(cy >= cx, b.ub, b.lb)


def _edge_regret(delta, lb, ub):
    return np.maximum(ub * delta, lb * delta)


def regret_edge_pieces(
    net: Network, R: float, bounds, e_x: int, y: PointOnEdge, e: int, context=None
) -> PiecewiseFn:
    """``t -> r_e((e_x, t), y)`` as a piecewise-affine function."""
    ctx = _ctx(net, R, context)
    b = _constant(bounds)
    table = ctx.table(e_x)
    ic = [z.t for z in identical_coverage_points(net, R, e_x, y, e, table=table)]
    knots = merge_close(np.r_[table.knots, ic])
    cy = coverage_parts(net, R, y.edge, y.t)[0][e]

    def fn(t):
        return _edge_regret(cy - coverage_parts(net, R, e_x, t)[0][e], b.lb[e], b.ub[e])

    return affine_profile(fn, knots).simplified()


def regret_xy(net: Network, R: float, bounds, e_x: int, y: PointOnEdge, context=None) -> PiecewiseFn:
    """``t -> r((e_x, t), y)`` as a piecewise-affine function."""
    ctx = _ctx(net, R, context)
    b = _constant(bounds)
    table = ctx.table(e_x)
    ic = [z.t for e in range(net.m) for z in identical_coverage_points(net, R, e_x, y, e, table=table)]
    knots = merge_close(np.r_[table.knots, ic])
    cy = coverage_parts(net, R, y.edge, y.t)[0]

    def fn(t):
        d = cy[:, None] - coverage_parts(net, R, e_x, t)[0]
        return _edge_regret(d, b.lb[:, None], b.ub[:, None]).sum(axis=0)

    return affine_profile(fn, knots).simplified()


def max_regret_at(net: Network, R: float, bounds, x: PointOnEdge, context=None):
    """Exact ``r(x)`` as a maximum over partition points.

    Returns:
        ``(r, y, w)``: the regret, the first maximizing partition point and
        the worst-case realization for ``(x, y)``.
    """
    ctx = _ctx(net, R, context)
    b = _constant(bounds)
    cY = ctx.candidate_parts[0]
    cx = coverage_parts(net, R, x.edge, x.t)[0]
    vals = _edge_regret(cY - cx[:, None], b.lb[:, None], b.ub[:, None]).sum(axis=0)
    k = int(np.argmax(vals))
    y = ctx.candidates[k]
    return float(vals[k]), y, np.where(cY[:, k] >= cx, b.ub, b.lb)


def host_envelope(net: Network, R: float, bounds, e_x: int, context=None) -> tuple[EnvelopeFn, np.ndarray]:
    """Upper envelope of ``r(., y)`` over all partition points ``y`` on ``e_x``.

    Returns the envelope and the identical coverage points found on ``e_x``
    that are not partition points.
    """
    ctx = _ctx(net, R, context)
    b = _constant(bounds)
    table = ctx.table(e_x)
    cY = ctx.candidate_parts[0]
    lb, ub = b.lb[:, None, None], b.ub[:, None, None]
    n_y = cY.shape[1]
    cols = [[], [], [], [], []]
    ic_found = []
    for p in range(table.n_pieces):
        lo, hi = table.knots[p], table.knots[p + 1]
        c0, c1 = table.C[:, p, 0][:, None], table.C[:, p, 1][:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (cY - c0) / c1
        inside = np.isfinite(z) & (z > lo + EPS) & (z < hi - EPS)
        ic_found.append(np.unique(z[inside]))
        z = np.where(inside, z, hi)
        # breakpoints per y, shape (|PP|, m + 2)
        T = np.sort(np.column_stack([np.full(n_y, lo), z.T, np.full(n_y, hi)]), axis=1)
        delta = cY[:, :, None] - (c0[:, :, None] + c1[:, :, None] * T[None, :, :])
        V = _edge_regret(delta, lb, ub).sum(axis=0)
        t0, t1, v0, v1 = T[:, :-1], T[:, 1:], V[:, :-1], V[:, 1:]
        keep = t1 > t0
        lab = np.broadcast_to(np.arange(n_y)[:, None], t0.shape)
        q = (v1 - v0)[keep] / (t1 - t0)[keep]
        cols[0].append(t0[keep])
        cols[1].append(t1[keep])
        cols[2].append(v0[keep] - q * t0[keep])
        cols[3].append(q)
        cols[4].append(lab[keep])
    env = envelope_from_arrays(*(np.concatenate(c) for c in cols))
    ic = merge_close(np.concatenate(ic_found)) if ic_found else np.zeros(0)
    return env, ic


def solve_constant(net: Network, R: float, bounds, context=None) -> RegretSolution:
    """Minimize the maximal regret over the whole network."""
    ctx = _ctx(net, R, context)
    minima = []
    n_ic = 0
    for e_x in range(net.m):
        env, ic = host_envelope(net, R, bounds, e_x, context=ctx)
        t, v = minimize_envelope(env)
        minima.append(EdgeMinimum(e_x, t, v))
        n_ic += len(ic)
    best = pick_best(minima)
    x = PointOnEdge(best.edge, best.t)
    _, y, w = max_regret_at(net, R, bounds, x, context=ctx)
    return RegretSolution(
        optimum=x,
        regret=best.regret,
        per_edge_minima=minima,
        worst_case_alternative=y,
        worst_case_demand=w,
        stats={"n_pp": len(ctx.candidates), "n_icp": n_ic},
    )
