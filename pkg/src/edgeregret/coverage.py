"""Edge coverage functions, coverage classes and covered demand.

For a facility at ``x`` and an edge ``e = [i, j]`` the covered part of ``e``
is described by two relative positions ``s_plus`` and ``s_minus``.  On an
edge other than the host edge the covered part is ``[0, s_plus]`` together
with ``[s_minus, 1]``; on the host edge it is the single interval
``[s_plus, s_minus]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, InstanceError
from .netcore import EPS, Network, PointOnEdge, host_distances


class PiecewiseFn:
    """Piecewise polynomial function on ``[knots[0], knots[-1]]``.

    ``coefs[p]`` holds the coefficients of piece ``p`` in increasing powers
    of ``t`` (``a + b t`` or ``a + b t + c t**2``).
    """

    def __init__(self, knots, coefs):
        knots = np.asarray(knots, dtype=float)
        coefs = np.atleast_2d(np.asarray(coefs, dtype=float))
        if knots.ndim != 1 or len(knots) != len(coefs) + 1:
            raise ValueError("need one more knot than pieces")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        self.knots = knots
        self.coefs = coefs

    @property
    def degree(self) -> int:
        return self.coefs.shape[1] - 1

    @property
    def n_pieces(self) -> int:
        return len(self.coefs)

    def pieces(self):
        for p in range(self.n_pieces):
            yield float(self.knots[p]), float(self.knots[p + 1]), self.coefs[p]

    def piece_index(self, t):
        idx = np.searchsorted(self.knots, t, side="right") - 1
        return np.clip(idx, 0, self.n_pieces - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        c = self.coefs[self.piece_index(t)]
        out = c[..., -1]
        for d in range(self.degree - 1, -1, -1):
            out = out * t + c[..., d]
        return out

    def simplified(self, tol: float = EPS) -> "PiecewiseFn":
        """Merge adjacent pieces carrying the same expression."""
        knots = [self.knots[0]]
        coefs = [self.coefs[0]]
        for p in range(1, self.n_pieces):
            if np.all(np.abs(self.coefs[p] - coefs[-1]) <= tol):
                continue
            knots.append(self.knots[p])
            coefs.append(self.coefs[p])
        knots.append(self.knots[-1])
        return PiecewiseFn(knots, coefs)

    def __repr__(self):
        parts = ", ".join(f"[{lo:.6g},{hi:.6g}]:{np.round(c, 9).tolist()}" for lo, hi, c in self.pieces())
        return f"PiecewiseFn({parts})"


@dataclass
class CoverageClass:
    covered: set = field(default_factory=set)
    uncovered: set = field(default_factory=set)
    partial: set = field(default_factory=set)
    host: int = -1


def coverage_bounds(net: Network, R: float, e_x: int, t):
    """``s_plus`` and ``s_minus`` of every edge for points ``(e_x, t)``.

    Returns two arrays of shape ``(m,) + shape(t)``.
    """
    t = np.asarray(t, dtype=float)
    D = host_distances(net, e_x, t)
    lens = net.lengths.reshape((-1,) + (1,) * t.ndim)
    di, dj = D[net.ek], D[net.el]
    sp = np.clip((R - di) / lens, 0.0, 1.0)
    sm = np.clip(1.0 - (R - dj) / lens, 0.0, 1.0)
    # host edge: the covered part is the single interval [s_plus, s_minus]
    lx = net.lengths[e_x]
    sp[e_x] = np.clip((di[e_x] - R) / lx, 0.0, 1.0)
    sm[e_x] = np.clip(1.0 - (dj[e_x] - R) / lx, 0.0, 1.0)
    return sp, sm


def coverage_parts(net: Network, R: float, e_x: int, t):
    """Parts per unit of coverage ``c`` and its squared counterpart ``cbar``.

    Returns two arrays of shape ``(m,) + shape(t)``.
    """
    sp, sm = coverage_bounds(net, R, e_x, t)
    covered = sm <= sp
    uncovered = (sp <= 0.0) & (sm >= 1.0)
    c = np.where(covered, 1.0, np.where(uncovered, 0.0, 1.0 - (sm - sp)))
    cb = np.where(covered, 1.0, np.where(uncovered, 0.0, 1.0 - (sm * sm - sp * sp)))
    c[e_x] = sm[e_x] - sp[e_x]
    cb[e_x] = sm[e_x] ** 2 - sp[e_x] ** 2
    return c, cb


def s_plus(net: Network, R: float, e: int, x: PointOnEdge) -> float:
    return float(coverage_bounds(net, R, x.edge, x.t)[0][e])


def s_minus(net: Network, R: float, e: int, x: PointOnEdge) -> float:
    return float(coverage_bounds(net, R, x.edge, x.t)[1][e])


def c_value(net: Network, R: float, e: int, x: PointOnEdge) -> float:
    return float(coverage_parts(net, R, x.edge, x.t)[0][e])


def cbar_value(net: Network, R: float, e: int, x: PointOnEdge) -> float:
    return float(coverage_parts(net, R, x.edge, x.t)[1][e])


def classify(net: Network, R: float, x: PointOnEdge) -> CoverageClass:
    sp, sm = coverage_bounds(net, R, x.edge, x.t)
    out = CoverageClass(host=x.edge)
    for e in range(net.m):
        if e == x.edge:
            continue
        if sm[e] <= sp[e] + EPS:
            out.covered.add(e)
        elif sp[e] <= EPS and sm[e] >= 1.0 - EPS:
            out.uncovered.add(e)
        else:
            out.partial.add(e)
    return out


def _solve_branches(net: Network, e_x: int, node: int, level: float) -> list[float]:
    """Parameters where either distance branch to ``node`` equals ``level``."""
    ln = net.lengths[e_x]
    dk = net.node_dist[net.ek[e_x], node]
    dl = net.node_dist[net.el[e_x], node]
    return [(level - dk) / ln, 1.0 - (level - dl) / ln]


def _bottleneck(net: Network, e_x: int, node: int) -> float:
    ln = net.lengths[e_x]
    return (ln + net.node_dist[net.el[e_x], node] - net.node_dist[net.ek[e_x], node]) / (2.0 * ln)


def kink_candidates(net: Network, R: float, e_x: int, edges=None) -> np.ndarray:
    """Superset of the parameters on ``e_x`` where some ``s_plus``/``s_minus`` kinks.

    Candidates are the bottleneck points of the relevant nodes and the
    points where a node distance reaches ``R`` or ``R - length(e)``.
    """
    edges = range(net.m) if edges is None else edges
    cand = [0.0, 1.0]
    for e in edges:
        i, j = net.ek[e], net.el[e]
        levels = (R,) if e == e_x else (R, R - net.lengths[e])
        for node in (i, j):
            cand.append(_bottleneck(net, e_x, node))
            for level in levels:
                cand.extend(_solve_branches(net, e_x, node, level))
    cand = np.array(cand)
    cand = np.unique(cand[(cand >= 0.0) & (cand <= 1.0)])
    return merge_close(cand)


def merge_close(t: np.ndarray, tol: float = EPS) -> np.ndarray:
    """Sorted values with near-duplicates (within ``tol``) removed; 0 and 1 win."""
    t = np.sort(np.asarray(t, dtype=float))
    if t.size == 0:
        return t
    keep = [t[0]]
    for v in t[1:]:
        if v - keep[-1] > tol:
            keep.append(v)
        elif v == 1.0:
            keep[-1] = 1.0
    return np.array(keep)


def affine_profile(fn, knots) -> PiecewiseFn:
    """Affine interpolation of ``fn`` between ``knots``, checked at two probes."""
    knots = np.asarray(knots, dtype=float)
    lo, hi = knots[:-1], knots[1:]
    v = fn(knots)
    slope = (v[1:] - v[:-1]) / (hi - lo)
    icpt = v[:-1] - slope * lo
    for frac in (1.0 / 3.0, 2.0 / 3.0):
        probe = lo + frac * (hi - lo)
        if np.any(np.abs(fn(probe) - (icpt + slope * probe)) > 1e3 * EPS):
            raise ConsistencyError("affine interpolation check failed: missed breakpoint")
    return PiecewiseFn(knots, np.column_stack([icpt, slope]))


def coverage_profile(net: Network, R: float, e: int, e_x: int) -> tuple[PiecewiseFn, PiecewiseFn]:
    """Piecewise-affine forms of ``t -> s_plus``/``s_minus`` of ``e`` over ``e_x``."""
    knots = kink_candidates(net, R, e_x, edges=[e])
    plus = affine_profile(lambda t: coverage_bounds(net, R, e_x, t)[0][e], knots)
    minus = affine_profile(lambda t: coverage_bounds(net, R, e_x, t)[1][e], knots)
    return plus.simplified(), minus.simplified()


class HostTable:
    """Per-piece closed forms of ``c`` and ``cbar`` for all edges over ``e_x``.

    ``knots`` must contain every partition point of ``e_x``; then ``c`` is
    affine and ``cbar`` quadratic on each piece.  Both are checked at
    interior probes on construction.

    Attributes:
        C: array ``(m, P, 2)`` of affine coefficients of ``c``.
        CB: array ``(m, P, 3)`` of quadratic coefficients of ``cbar``.
    """

    def __init__(self, net: Network, R: float, e_x: int, knots):
        self.net, self.R, self.e_x = net, R, e_x
        knots = np.asarray(knots, dtype=float)
        self.knots = knots
        lo, hi = knots[:-1], knots[1:]
        mid = 0.5 * (lo + hi)
        c_lo, cb_lo = coverage_parts(net, R, e_x, lo)
        c_hi, cb_hi = coverage_parts(net, R, e_x, hi)
        c_mid, cb_mid = coverage_parts(net, R, e_x, mid)
        h = hi - lo
        slope = (c_hi - c_lo) / h
        self.C = np.stack([c_lo - slope * lo, slope], axis=-1)
        # quadratic through three points, expressed in powers of t
        q2 = 2.0 * (cb_hi - 2.0 * cb_mid + cb_lo) / (h * h)
        q1 = (cb_hi - cb_lo) / h - q2 * (lo + hi)
        q0 = cb_lo - q1 * lo - q2 * lo * lo
        # curvature at rounding level: use the chord so flat pieces are exactly affine
        flat = np.abs(q2) * h * h <= 1e-12
        chord = (cb_hi - cb_lo) / h
        q2 = np.where(flat, 0.0, q2)
        q1 = np.where(flat, chord, q1)
        q0 = np.where(flat, cb_lo - chord * lo, q0)
        self.C[..., 1] = np.where(np.abs(slope) * h <= 1e-12, 0.0, slope)
        self.C[..., 0] = np.where(np.abs(slope) * h <= 1e-12, 0.5 * (c_lo + c_hi), self.C[..., 0])
        steady = (q2 == 0.0) & (np.abs(q1) * h <= 1e-12)
        q0 = np.where(steady, 0.5 * (cb_lo + cb_hi), q0)
        q1 = np.where(steady, 0.0, q1)
        self.CB = np.stack([q0, q1, q2], axis=-1)
        for frac in (0.25, 0.75):
            probe = lo + frac * h
            c_p, cb_p = coverage_parts(net, R, e_x, probe)
            if np.any(np.abs(self.c_at(probe, pieces=np.arange(len(lo))) - c_p) > 1e4 * EPS) or np.any(
                np.abs(self.cbar_at(probe, pieces=np.arange(len(lo))) - cb_p) > 1e4 * EPS
            ):
                raise ConsistencyError(f"coverage on edge {e_x} is not polynomial between partition points")

    @property
    def n_pieces(self) -> int:
        return len(self.knots) - 1

    def piece_index(self, t):
        idx = np.searchsorted(self.knots, t, side="right") - 1
        return np.clip(idx, 0, self.n_pieces - 1)

    def c_at(self, t, pieces=None):
        t = np.asarray(t, dtype=float)
        p = self.piece_index(t) if pieces is None else pieces
        C = self.C[:, p]
        return C[..., 0] + C[..., 1] * t

    def cbar_at(self, t, pieces=None):
        t = np.asarray(t, dtype=float)
        p = self.piece_index(t) if pieces is None else pieces
        Q = self.CB[:, p]
        return Q[..., 0] + (Q[..., 1] + Q[..., 2] * t) * t


def as_realization(w, m: int) -> np.ndarray:
    """Normalize a demand realization to an ``(m, 2)`` array of (intercept, slope)."""
    w = np.asarray(w, dtype=float)
    if w.shape == (m,):
        w = np.column_stack([w, np.zeros(m)])
    if w.shape != (m, 2):
        raise InstanceError(f"demand realization must have shape ({m},) or ({m}, 2), got {w.shape}")
    if np.any(w[:, 0] < -EPS) or np.any(w[:, 0] + w[:, 1] < -EPS):
        raise InstanceError("demand must be nonnegative on every edge")
    return w


def covered_demand(net: Network, R: float, x: PointOnEdge, w) -> float:
    """Covered demand ``sum_e (a_e c_e(x) + b_e cbar_e(x) / 2)``."""
    w = as_realization(w, net.m)
    c, cb = coverage_parts(net, R, x.edge, x.t)
    return float(np.dot(w[:, 0], c) + 0.5 * np.dot(w[:, 1], cb))
