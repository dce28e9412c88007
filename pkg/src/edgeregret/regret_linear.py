"""Minmax-regret location with unknown linear edge demand.

A linear realization ``w_e(t) = a + b t`` covers ``a c_e + b cbar_e / 2``
of edge ``e``.  For fixed ``x`` and ``y`` the worst realization on each edge
is a corner of the feasible (intercept, slope) parallelogram, selected by
the signs of ``dc = c_e(y) - c_e(x)``, ``dcb = cbar_e(y) - cbar_e(x)`` and
``dcb - 2 dc``.

On a rectangle ``strip x row`` of the partition grids of ``e_x`` and ``e_y``,
``c`` is affine and ``cbar`` quadratic in each coordinate, so every sign
condition reads ``Q(t_y) = P(t_x)`` with quadratics ``Q`` and ``P``.  These
curves cut the rectangle into cells on which ``r(x, y)`` is a separable
quadratic.  Maximizing over ``y`` for fixed ``x`` happens on the curves, on
the grid rows, or on the stationary line of a cell that is concave in
``t_y``; these candidates are the arcs whose upper envelope is ``r(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .context import CoverageContext
from .coverage import coverage_parts
from .demand import EdgeMinimum, LinearDemandBounds, RegretSolution, as_linear, pick_best
from .envelope import Arc, EnvelopeFn, minimize_envelope, upper_envelope_arcs
from .netcore import EPS, Network, PointOnEdge, tie_tol

CORNER_NAMES = ("i", "ii", "iii", "iv")
# quantities whose zero sets bound the cells: dc, dcb and dcb - 2 dc
KINDS = ("dc", "dcb", "dcb2")

_FLAT = 1e-12  # polynomial coefficients below this (scaled) are treated as zero
_SIGN_TOL = 1e-12  # sign quantities this close to zero count as zero at a probe


def worst_case_corner(dc: float, dcb: float, corners) -> tuple[int, tuple[float, float], float]:
    """Worst-case corner of one edge's parallelogram by the sign table.

    Args:
        dc: ``c_e(y) - c_e(x)``.
        dcb: ``cbar_e(y) - cbar_e(x)``.
        corners: ``(4, 2)`` array of (intercept, slope) corners (i)-(iv).

    Returns:
        ``(index, (a, b), value)`` with ``value = a dc + b dcb / 2``.
    """
    g = dcb - 2.0 * dc
    if dc <= 0 and dcb <= 0 and g >= 0:
        k = 0
    elif (dc >= 0 and dcb >= 0 and g >= 0) or (dc <= 0 and dcb >= 0):
        k = 1
    elif dc >= 0 and dcb >= 0 and g <= 0:
        k = 2
    else:
        k = 3
    a, b = (float(v) for v in np.asarray(corners)[k])
    return k, (a, b), a * dc + 0.5 * b * dcb


def corner_index(dc, dcb):
    """Vectorized corner selection of :func:`worst_case_corner`."""
    dc, dcb = np.asarray(dc, dtype=float), np.asarray(dcb, dtype=float)
    g = dcb - 2.0 * dc
    c0 = (dc <= 0) & (dcb <= 0) & (g >= 0)
    c1 = ((dc >= 0) & (dcb >= 0) & (g >= 0)) | ((dc <= 0) & (dcb >= 0))
    c2 = (dc >= 0) & (dcb >= 0) & (g <= 0)
    return np.select([c0, c1, c2], [0, 1, 2], 3)


def corner_values(dc, dcb, corners):
    """Objective of all four corners; ``corners`` is ``(m, 4, 2)``, deltas ``(m, ...)``."""
    extra = (1,) * (np.ndim(dc) - 1)
    a = corners[:, :, 0].reshape(corners.shape[:2] + extra)
    b = corners[:, :, 1].reshape(corners.shape[:2] + extra)
    return a * dc[:, None] + 0.5 * b * dcb[:, None]


def _regret_sum(dc, dcb, corners):
    return corner_values(dc, dcb, corners).max(axis=1).sum(axis=0)


def regret_pair(ctx: CoverageContext, bounds: LinearDemandBounds, e_x: int, tx, e_y: int, ty):
    """``r(x, y)`` for arrays of parameters on ``e_x`` and ``e_y``."""
    tx, ty = np.broadcast_arrays(np.asarray(tx, dtype=float), np.asarray(ty, dtype=float))
    cx, cbx = coverage_parts(ctx.net, ctx.R, e_x, tx)
    cy, cby = coverage_parts(ctx.net, ctx.R, e_y, ty)
    return _regret_sum(cy - cx, cby - cbx, bounds.corners())


# ---------------------------------------------------------------- polynomials


def _pad(c):
    out = np.zeros(3)
    if c is not None:
        out[: len(c)] = c
    return out


def _peval(c, t):
    return c[0] + (c[1] + c[2] * t) * t


def _is_const(c, lo, hi) -> bool:
    w = max(abs(lo), abs(hi), 1.0)
    return abs(c[1]) * w <= _FLAT and abs(c[2]) * w * w <= _FLAT


def quad_roots(c2, c1, c0):
    """Real roots of ``c2 t^2 + c1 t + c0`` elementwise; ``nan`` where absent.

    Degenerate (linear) rows use the single root in the first slot.
    """
    c2, c1, c0 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (c2, c1, c0)))
    r1 = np.full(c2.shape, np.nan)
    r2 = np.full(c2.shape, np.nan)
    lin = np.abs(c2) <= _FLAT
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = lin & (np.abs(c1) > _FLAT)
        r1 = np.where(ok, -c0 / c1, r1)
        disc = c1 * c1 - 4.0 * c2 * c0
        quad = ~lin & (disc >= -1e-14 * (c1 * c1 + np.abs(4 * c2 * c0)))
        sq = np.sqrt(np.maximum(disc, 0.0))
        qq = -0.5 * (c1 + np.where(c1 >= 0, sq, -sq))
        a = np.where(qq != 0, qq / c2, -c1 / (2 * c2))
        b = np.where(qq != 0, c0 / qq, -c1 / (2 * c2))
    r1 = np.where(quad, a, r1)
    r2 = np.where(quad, b, r2)
    return r1, r2


def _quad_roots_scalar(c2, c1, c0):
    """Scalar version of :func:`quad_roots`; missing roots are ``None``."""
    if abs(c2) <= _FLAT:
        return (-c0 / c1 if abs(c1) > _FLAT else None), None
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < -1e-14 * (c1 * c1 + abs(4 * c2 * c0)):
        return None, None
    sq = math.sqrt(max(disc, 0.0))
    qq = -0.5 * (c1 + (sq if c1 >= 0 else -sq))
    if qq != 0:
        return qq / c2, c0 / qq
    return -c1 / (2 * c2), -c1 / (2 * c2)


def _roots_in(c, level, lo, hi) -> list[float]:
    """Roots of ``c(t) = level`` inside ``[lo, hi]``."""
    out = []
    for r in _quad_roots_scalar(float(c[2]), float(c[1]), float(c[0] - level)):
        if r is not None and lo - EPS <= r <= hi + EPS:
            out.append(min(max(r, lo), hi))
    return out


def _inverse(Q, level, u0, u1):
    """Solve ``Q(y) = level`` for ``y`` on the monotone stretch ``[u0, u1]``."""
    if np.ndim(level) == 0:
        level = float(level)
        best, dist = None, np.inf
        for r in _quad_roots_scalar(float(Q[2]), float(Q[1]), float(Q[0]) - level):
            if r is not None:
                d = max(u0 - r, 0.0) + max(r - u1, 0.0)
                if d < dist:
                    best, dist = r, d
        if best is None:
            best = u0 if abs(_peval(Q, u0) - level) < abs(_peval(Q, u1) - level) else u1
        return min(max(best, u0), u1)
    r1, r2 = quad_roots(Q[2], Q[1], Q[0] - level)
    d1 = np.where(np.isnan(r1), np.inf, np.maximum(u0 - r1, 0) + np.maximum(r1 - u1, 0))
    d2 = np.where(np.isnan(r2), np.inf, np.maximum(u0 - r2, 0) + np.maximum(r2 - u1, 0))
    y = np.where(d1 <= d2, r1, r2)
    y = np.where(np.isnan(y), np.where(np.abs(_peval(Q, u0) - level) < np.abs(_peval(Q, u1) - level), u0, u1), y)
    return np.clip(y, u0, u1)


def _pmul(a, b):
    return np.convolve(a, b)


def _psub(a, b):
    if len(a) == len(b):
        return a - b
    out = np.zeros(max(len(a), len(b)))
    out[: len(a)] += a
    out[: len(b)] -= b
    return out


def _resultant(A, PA, B, PB):
    """Coefficients (increasing powers of ``t_x``) of a polynomial vanishing
    where the curves ``A(y)=PA(x)`` and ``B(y)=PB(x)`` meet."""
    A2, A1, A0 = np.array([A[2]]), np.array([A[1]]), _psub(np.array([A[0]]), PA)
    B2, B1, B0 = np.array([B[2]]), np.array([B[1]]), _psub(np.array([B[0]]), PB)
    a_quad, b_quad = abs(A[2]) > _FLAT, abs(B[2]) > _FLAT
    if a_quad and b_quad:
        u = _psub(_pmul(A2, B0), _pmul(B2, A0))
        return _psub(_pmul(u, u), _pmul(_psub(_pmul(A2, B1), _pmul(B2, A1)), _psub(_pmul(A1, B0), _pmul(B1, A0))))
    if b_quad:
        return _psub(_psub(_pmul(_pmul(A1, A1), B0), _pmul(_pmul(A1, A0), B1)), -_pmul(_pmul(A0, A0), B2))
    if a_quad:
        return _psub(_psub(_pmul(_pmul(B1, B1), A0), _pmul(_pmul(B1, B0), A1)), -_pmul(_pmul(B0, B0), A2))
    return _psub(_pmul(A1, B0), _pmul(B1, A0))


def _real_roots_in(c, lo, hi) -> list[float]:
    """Real roots of the polynomial ``c`` (increasing powers) strictly inside ``(lo, hi)``."""
    c = np.asarray(c, dtype=float)
    scale = np.abs(c).max() if len(c) else 0.0
    if scale == 0.0:
        return []
    nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    c = c[: nz[-1] + 1] / scale
    if len(c) < 2:
        return []
    if len(c) == 2:
        r = [-c[0] / c[1]]
    elif len(c) == 3:
        r = [v for v in _quad_roots_scalar(c[2], c[1], c[0]) if v is not None]
    else:
        r = [z.real for z in np.roots(c[::-1]) if abs(z.imag) <= 1e-6 * max(1.0, abs(z.real))]
    return [float(v) for v in r if lo < v < hi]


# ---------------------------------------------------------------- cells and arcs


@dataclass
class Curve:
    """One x-monotone branch of a sign curve ``Q(t_y) = P(t_x)`` in a rectangle."""

    edge: int
    kind: str
    strip: int
    row: int
    Q: np.ndarray
    P: np.ndarray
    u0: float
    u1: float
    xa: float
    xb: float

    def y(self, tx):
        if np.ndim(tx) == 0:
            return _inverse(self.Q, _peval(self.P, float(tx)), self.u0, self.u1)
        return _inverse(self.Q, _peval(self.P, np.asarray(tx, dtype=float)), self.u0, self.u1)

    def y_range(self, lo, hi) -> tuple[float, float]:
        """Bounds of ``y`` over ``[lo, hi]``; ``y`` is monotone in ``P``."""
        xs = [lo, hi]
        if abs(self.P[2]) > _FLAT:
            xv = -self.P[1] / (2 * self.P[2])
            if lo < xv < hi:
                xs.append(xv)
        ys = [self.y(x) for x in xs]
        return min(ys), max(ys)

    def may_meet(self, other: "Curve", lo, hi) -> bool:
        a0, a1 = self.y_range(lo, hi)
        b0, b1 = other.y_range(lo, hi)
        return min(a1, b1) - max(a0, b0) >= -1e-9


@dataclass
class Cell:
    """Maximal connected region of a rectangle with one sign pattern.

    ``coef`` holds the coefficients of ``r`` on the cell for the monomials
    ``1, t_x, t_x^2, t_y, t_y^2``.  ``pieces`` lists the vertical slabs the
    cell spans as ``(x_lo, x_hi, lower, upper)`` where the bounds are either
    a float (grid row) or a :class:`Curve`.
    """

    e_x: int
    e_y: int
    strip: int
    row: int
    probe: tuple[float, float]
    signs: tuple
    corners: np.ndarray
    coef: np.ndarray
    pieces: list = field(default_factory=list)

    @property
    def x_range(self) -> tuple[float, float]:
        return min(p[0] for p in self.pieces), max(p[1] for p in self.pieces)

    @property
    def y_range(self) -> tuple[float, float]:
        lo, hi = np.inf, -np.inf
        for xa, xb, low, up in self.pieces:
            xs = np.linspace(xa, xb, 5)
            lo = min(lo, float(np.min(_bound_at(low, xs))))
            hi = max(hi, float(np.max(_bound_at(up, xs))))
        return lo, hi

    def value(self, tx, ty):
        c = self.coef
        return c[0] + c[1] * tx + c[2] * tx * tx + c[3] * ty + c[4] * ty * ty


def _bound_at(b, xs):
    return np.full(np.shape(xs), b) if isinstance(b, float) else b.y(xs)


class _Pair:
    """Rectangle structure of the square ``e_x x e_y``."""

    def __init__(self, ctx: CoverageContext, bounds: LinearDemandBounds, e_x: int, e_y: int, edges=None):
        self.ctx, self.bounds, self.e_x, self.e_y = ctx, bounds, e_x, e_y
        self.tx_tab, self.ty_tab = ctx.table(e_x), ctx.table(e_y)
        self.edges = list(range(ctx.net.m)) if edges is None else list(edges)
        self.corners = bounds.corners()
        self.tx_C3 = np.concatenate([self.tx_tab.C, np.zeros(self.tx_tab.C.shape[:2] + (1,))], axis=2)
        self.ty_C3 = np.concatenate([self.ty_tab.C, np.zeros(self.ty_tab.C.shape[:2] + (1,))], axis=2)

    def polys(self, e, p, q, kind):
        """``(Q, P)`` of one sign quantity on rectangle ``(p, q)``."""
        a = self.ty_C3[e, q]
        ab = self.ty_tab.CB[e, q]
        b = self.tx_C3[e, p]
        bb = self.tx_tab.CB[e, p]
        if kind == "dc":
            return a.copy(), b.copy()
        if kind == "dcb":
            return ab.copy(), bb.copy()
        return ab - 2 * a, bb - 2 * b

    def curves(self, p, q):
        """Curves and vertical event abscissae inside rectangle ``(p, q)``."""
        x0, x1 = self.tx_tab.knots[p], self.tx_tab.knots[p + 1]
        y0, y1 = self.ty_tab.knots[q], self.ty_tab.knots[q + 1]
        curves, vertical = [], []
        for e in self.edges:
            for kind in KINDS:
                Q, P = self.polys(e, p, q, kind)
                if _is_const(Q, y0, y1):
                    if not _is_const(P, x0, x1):
                        vertical += _roots_in(P, Q[0], x0, x1)
                    continue
                cuts = [y0, y1]
                if abs(Q[2]) > _FLAT:
                    yv = -Q[1] / (2 * Q[2])
                    if y0 < yv < y1:
                        cuts.insert(1, yv)
                for u0, u1 in zip(cuts[:-1], cuts[1:]):
                    qa, qb = sorted((_peval(Q, u0), _peval(Q, u1)))
                    xs = sorted({x0, x1, *_roots_in(P, qa, x0, x1), *_roots_in(P, qb, x0, x1)})
                    spans = []
                    for xa, xb in zip(xs[:-1], xs[1:]):
                        if xb - xa <= EPS:
                            continue
                        v = _peval(P, 0.5 * (xa + xb))
                        if qa - EPS <= v <= qb + EPS:
                            if spans and spans[-1][1] == xa:
                                spans[-1][1] = xb
                            else:
                                spans.append([xa, xb])
                    for xa, xb in spans:
                        curves.append(Curve(e, kind, p, q, Q, P, u0, u1, xa, xb))
        return curves, vertical

    def events(self, p, curves, vertical):
        x0, x1 = self.tx_tab.knots[p], self.tx_tab.knots[p + 1]
        ev = [x0, x1, *vertical]
        for c in curves:
            ev += [c.xa, c.xb]
        for i, A in enumerate(curves):
            for B in curves[i + 1 :]:
                lo, hi = max(A.xa, B.xa), min(A.xb, B.xb)
                if hi <= lo:
                    continue
                if not A.may_meet(B, lo, hi):
                    continue
                ev += _real_roots_in(_resultant(A.Q, A.P, B.Q, B.P), lo, hi)
        ev = np.unique(np.clip(ev, x0, x1))
        return ev[np.r_[True, np.diff(ev) > 1e-12]]

    def quantities(self, tx, ty):
        """``dc`` and ``dcb`` for the selected edges at one point."""
        cx, cbx = coverage_parts(self.ctx.net, self.ctx.R, self.e_x, tx)
        cy, cby = coverage_parts(self.ctx.net, self.ctx.R, self.e_y, ty)
        idx = self.edges
        return (cy - cx)[idx], (cby - cbx)[idx]

    def cell_form(self, p, q, tx, ty):
        """Sign pattern, corner choice and quadratic of ``r`` at a probe point."""
        idx = self.edges
        Cy, CBy = self.ty_tab.C[idx, q], self.ty_tab.CB[idx, q]
        Cx, CBx = self.tx_tab.C[idx, p], self.tx_tab.CB[idx, p]
        dc = (Cy[:, 0] + Cy[:, 1] * ty) - (Cx[:, 0] + Cx[:, 1] * tx)
        dcb = _peval(CBy.T, ty) - _peval(CBx.T, tx)
        dc = np.where(np.abs(dc) <= _SIGN_TOL, 0.0, dc)
        dcb = np.where(np.abs(dcb) <= _SIGN_TOL, 0.0, dcb)
        g = dcb - 2.0 * dc
        g = np.where(np.abs(g) <= _SIGN_TOL, 0.0, g)
        corners = corner_index(dc, dcb)
        ab = self.corners[idx, corners]  # (len(edges), 2)
        a, b = ab[:, 0:1], ab[:, 1:2]
        pad = np.zeros((len(idx), 1))
        ty_part = (a * np.hstack([Cy, pad]) + 0.5 * b * CBy).sum(axis=0)
        tx_part = (a * np.hstack([Cx, pad]) + 0.5 * b * CBx).sum(axis=0)
        coef = np.array([ty_part[0] - tx_part[0], -tx_part[1], -tx_part[2], ty_part[1], ty_part[2]])
        signs = tuple(zip(np.sign(dc).astype(int).tolist(), np.sign(dcb).astype(int).tolist(), np.sign(g).astype(int).tolist()))
        return signs, corners, coef

    def cells(self, p, q):
        """Cells of rectangle ``(p, q)`` and the curves that bound them."""
        y0, y1 = float(self.ty_tab.knots[q]), float(self.ty_tab.knots[q + 1])
        curves, vertical = self.curves(p, q)
        ev = self.events(p, curves, vertical)
        slabs = []
        for xa, xb in zip(ev[:-1], ev[1:]):
            xm = 0.5 * (xa + xb)
            bounds = [(y0, y0), (y1, y1)]
            for c in curves:
                if c.xa <= xm <= c.xb:
                    bounds.append((float(c.y(xm)), c))
            bounds.sort(key=lambda z: z[0])
            pieces = []
            for (ya, la), (yb, lb) in zip(bounds[:-1], bounds[1:]):
                if yb - ya <= 1e-12:
                    continue
                la = la if isinstance(la, Curve) else float(la)
                lb = lb if isinstance(lb, Curve) else float(lb)
                signs, corners, coef = self.cell_form(p, q, xm, 0.5 * (ya + yb))
                pieces.append([xa, xb, la, lb, signs, corners, coef, (xm, 0.5 * (ya + yb))])
            slabs.append(pieces)
        # join slab pieces that touch across a shared abscissa and share a sign pattern
        parent = {}

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for s, pieces in enumerate(slabs):
            for i in range(len(pieces)):
                parent[(s, i)] = (s, i)
        for s in range(1, len(slabs)):
            x = slabs[s][0][0] if slabs[s] else None
            for i, A in enumerate(slabs[s - 1]):
                a_lo, a_hi = float(_bound_at(A[2], x)), float(_bound_at(A[3], x))
                for j, B in enumerate(slabs[s]):
                    if A[4] != B[4]:
                        continue
                    b_lo, b_hi = float(_bound_at(B[2], x)), float(_bound_at(B[3], x))
                    if min(a_hi, b_hi) - max(a_lo, b_lo) > 1e-12:
                        parent[find((s, j))] = find((s - 1, i))
        groups: dict = {}
        for s, pieces in enumerate(slabs):
            for i, pc in enumerate(pieces):
                groups.setdefault(find((s, i)), []).append(pc)
        cells = []
        for members in groups.values():
            first = members[0]
            cells.append(
                Cell(
                    self.e_x, self.e_y, p, q, first[7], first[4], first[5], first[6],
                    [(m[0], m[1], m[2], m[3]) for m in members],
                )
            )
        cells.sort(key=lambda c: (c.x_range[0], c.probe[1]))
        return cells, curves

    def rectangles(self):
        for p in range(self.tx_tab.n_pieces):
            for q in range(self.ty_tab.n_pieces):
                yield p, q


def _ctx(net, R, context):
    if context is None:
        return CoverageContext(net, R)
    if context.net is not net or context.R != R:
        raise ValueError("context belongs to a different instance")
    return context


def cell_subdivision(net: Network, R: float, bounds, e_x: int, e_y: int, edges=None, context=None) -> list[Cell]:
    """Cells of the square ``e_x x e_y`` for the overlay of the given edges (default all)."""
    ctx = _ctx(net, R, context)
    pair = _Pair(ctx, as_linear(bounds), e_x, e_y, edges)
    out = []
    for p, q in pair.rectangles():
        out += pair.cells(p, q)[0]
    return out


@dataclass
class _ArcSpec:
    kind: str
    xa: float
    xb: float
    curve: Curve | None = None
    level: float = 0.0

    def y(self, tx):
        if self.curve is not None:
            return self.curve.y(tx)
        return np.full(np.shape(tx), self.level)


def _pair_arcs(pair: _Pair) -> list[_ArcSpec]:
    arcs = [_ArcSpec("grid", 0.0, 1.0, level=float(t)) for t in pair.ty_tab.knots]
    for p, q in pair.rectangles():
        cells, curves = pair.cells(p, q)
        arcs += [_ArcSpec("curve", c.xa, c.xb, curve=c) for c in curves]
        for cell in cells:
            c4, c3 = cell.coef[4], cell.coef[3]
            if c4 >= -_FLAT:
                continue
            ys = -c3 / (2 * c4)
            for xa, xb, low, up in cell.pieces:
                cuts = [xa, xb]
                for b in (low, up):
                    if isinstance(b, Curve):
                        cuts += _roots_in(b.P, _peval(b.Q, ys), xa, xb)
                cuts = sorted(set(cuts))
                for ca, cb in zip(cuts[:-1], cuts[1:]):
                    if cb - ca <= EPS:
                        continue
                    xm = 0.5 * (ca + cb)
                    if float(_bound_at(low, xm)) <= ys <= float(_bound_at(up, xm)):
                        arcs.append(_ArcSpec("stationary", ca, cb, level=float(ys)))
    return arcs


def candidate_arcs(net: Network, R: float, bounds, e_x: int, e_y: int, context=None) -> list[Arc]:
    """Arcs ``t_x -> r(x, y(t_x))`` over ``e_x`` whose envelope is ``max_{y in e_y} r(x, y)``."""
    ctx = _ctx(net, R, context)
    lin = as_linear(bounds)
    pair = _Pair(ctx, lin, e_x, e_y)
    out = []
    for spec in _pair_arcs(pair):
        out.append(_make_arc(ctx, lin, e_x, e_y, spec, len(out)))
    return out


def _table_regret(ctx, corners, e_x, tx, e_y, ty):
    """``r(x, y)`` from the per-piece closed forms of ``c`` and ``cbar``."""
    tab_x, tab_y = ctx.table(e_x), ctx.table(e_y)
    dc = tab_y.c_at(ty) - tab_x.c_at(tx)
    dcb = tab_y.cbar_at(ty) - tab_x.cbar_at(tx)
    return _regret_sum(dc, dcb, corners)


def _make_arc(ctx, lin, e_x, e_y, spec: _ArcSpec, label: int) -> Arc:
    corners = lin.corners()

    def value(tx, spec=spec):
        tx = np.asarray(tx, dtype=float)
        return _table_regret(ctx, corners, e_x, tx, e_y, spec.y(tx))

    arc = Arc(spec.xa, spec.xb, value, label)
    arc.spec = spec
    arc.e_y = e_y
    return arc


def max_regret_at_linear(net: Network, R: float, bounds, x: PointOnEdge, tol: float = 1e-6, context=None):
    """Exact ``r(x)`` by maximizing over each ``e_y`` along the vertical line at ``x``.

    For fixed ``x`` every sign quantity is a quadratic in ``t_y`` per grid
    row, so its roots split ``e_y`` into intervals on which ``r(x, .)`` is a
    single quadratic, maximized at an end or its stationary point.

    Returns:
        ``(r, y, w)`` with ``w`` the worst-case (intercept, slope) per edge.
    """
    ctx = _ctx(net, R, context)
    lin = as_linear(bounds)
    corners = lin.corners()
    cx, cbx = coverage_parts(ctx.net, ctx.R, x.edge, x.t)
    best = (-np.inf, None)
    for e_y in range(ctx.net.m):
        tab = ctx.table(e_y)
        cand = [tab.knots]
        C, CB = tab.C, tab.CB  # (m, P, 2), (m, P, 3)
        for Qc, level in (
            (np.concatenate([C, np.zeros(C.shape[:2] + (1,))], axis=2), cx),
            (CB, cbx),
            (CB - 2 * np.concatenate([C, np.zeros(C.shape[:2] + (1,))], axis=2), cbx - 2 * cx),
        ):
            r1, r2 = quad_roots(Qc[..., 2], Qc[..., 1], Qc[..., 0] - level[:, None])
            lo, hi = tab.knots[:-1][None, :], tab.knots[1:][None, :]
            for r in (r1, r2):
                ok = np.isfinite(r) & (r >= lo) & (r <= hi)
                cand.append(r[ok])
        t = np.unique(np.concatenate(cand))
        t = t[(t >= 0) & (t <= 1)]
        ta, tb = t[:-1], t[1:]
        tm = 0.5 * (ta + tb)
        cy, cby = coverage_parts(ctx.net, ctx.R, e_y, np.concatenate([t, tm]))
        vals = _regret_sum(cy - cx[:, None], cby - cbx[:, None], corners)
        va, vb, vm = vals[: len(t) - 1], vals[1 : len(t)], vals[len(t) :]
        h = tb - ta
        with np.errstate(divide="ignore", invalid="ignore"):
            c2 = 2.0 * (va - 2.0 * vm + vb) / (h * h)
            ts = tm - (vb - va) / (h * c2 * 2.0)
        ok = (c2 < 0) & (ts > ta) & (ts < tb) & np.isfinite(ts)
        cand_t = np.concatenate([t, ts[ok]])
        if ok.any():
            cy2, cby2 = coverage_parts(ctx.net, ctx.R, e_y, ts[ok])
            vals_s = _regret_sum(cy2 - cx[:, None], cby2 - cbx[:, None], corners)
            all_v = np.concatenate([vals[: len(t)], vals_s])
        else:
            all_v = vals[: len(t)]
        k = int(np.argmax(all_v))
        if best[1] is None or all_v[k] > best[0] + tie_tol(best[0]):
            best = (float(all_v[k]), PointOnEdge(e_y, float(cand_t[k])))
    r, y = best
    cy, cby = coverage_parts(ctx.net, ctx.R, y.edge, y.t)
    w = np.array(
        [worst_case_corner(cy[e] - cx[e], cby[e] - cbx[e], corners[e])[1] for e in range(ctx.net.m)]
    )
    return r, y, w


def host_envelope_linear(net: Network, R: float, bounds, e_x: int, tol: float = 1e-6, context=None) -> EnvelopeFn:
    """Approximate ``t -> r((e_x, t))`` as the envelope of all candidate arcs."""
    ctx = _ctx(net, R, context)
    arcs = []
    for e_y in range(ctx.net.m):
        arcs += candidate_arcs(ctx.net, ctx.R, bounds, e_x, e_y, context=ctx)
    for k, a in enumerate(arcs):
        a.label = k
    corners = as_linear(bounds).corners()

    def evaluate(arcs, idx, ts):
        # one table evaluation per alternative edge
        out = [None] * len(ts)
        groups: dict[int, list[int]] = {}
        for j, i in enumerate(idx):
            groups.setdefault(arcs[i].e_y, []).append(j)
        for e_y, js in groups.items():
            tx = np.concatenate([ts[j] for j in js])
            ty = np.concatenate([arcs[idx[j]].spec.y(ts[j]) for j in js])
            vals = _table_regret(ctx, corners, e_x, tx, e_y, ty)
            for j, v in zip(js, np.split(vals, np.cumsum([len(ts[j]) for j in js])[:-1])):
                out[j] = v
        return out

    return upper_envelope_arcs(arcs, tol=tol, max_rounds=1, evaluate=evaluate)


def envelope_local_minima(env: EnvelopeFn, limit: int = 3):
    """Lowest local minima of an envelope as ``(t, value, t_left, t_right)``.

    ``t_left`` and ``t_right`` are the neighbouring vertices, which bracket
    the basin of the minimum.
    """
    ts, vs = env.vertices()
    order = np.argsort(ts, kind="stable")
    ts, vs = ts[order], vs[order]
    keep = np.r_[True, np.diff(ts) > 0]
    # at a shared vertex keep the larger value, which is the envelope's
    vs = np.maximum.reduceat(vs, np.flatnonzero(keep))
    ts = ts[keep]
    n = len(ts)
    out = []
    for i in range(n):
        left = vs[i - 1] if i > 0 else np.inf
        right = vs[i + 1] if i < n - 1 else np.inf
        if vs[i] <= left and vs[i] <= right:
            out.append((float(ts[i]), float(vs[i]), float(ts[max(i - 1, 0)]), float(ts[min(i + 1, n - 1)])))
    out.sort(key=lambda z: (z[1], z[0]))
    return out[:limit]


def _polish(fn, cand, xatol):
    """Minimize the exact ``fn`` over the basin ``[t_left, t_right]`` of a candidate."""
    t, _, a, b = cand
    best_t, best_v = t, fn(t)
    for end in (a, b):
        if end in (0.0, 1.0):
            v = fn(end)
            if v < best_v - tie_tol(best_v):
                best_t, best_v = end, v
    if b - a > xatol:
        res = minimize_scalar(fn, bounds=(a, b), method="bounded", options={"xatol": xatol})
        if res.fun < best_v - tie_tol(best_v):
            best_t, best_v = float(res.x), float(res.fun)
        # Brent stops at xatol + sqrt(eps)|x|; finish with an absolute tolerance
        h = 4 * (xatol + 1.5e-8 * abs(best_t))
        t2, v2 = _golden(fn, max(a, best_t - h), min(b, best_t + h), xatol)
        if v2 < best_v:
            best_t, best_v = t2, v2
    return best_t, best_v


def _golden(fn, a, b, xatol):
    g = (np.sqrt(5.0) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xatol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (float(c), fc) if fc <= fd else (float(d), fd)


def solve_linear(
    net: Network,
    R: float,
    bounds,
    tol: float = 1e-6,
    context=None,
    polish_margin: float = 0.02,
    polish_xatol: float = 1e-10,
):
    """Minimize the maximal regret under linear demand bounds.

    The arc envelope of every host edge locates the basins of ``r``.  Basins
    whose envelope value is within ``polish_margin`` (relative) of the best
    are then minimized with the exact evaluation of ``r`` down to
    ``polish_xatol`` in ``t``, so every reported regret is an exact value
    ``r(x)`` at the reported point.
    """
    ctx = _ctx(net, R, context)
    lin = as_linear(bounds)

    def exact(e):
        return lambda t: max_regret_at_linear(ctx.net, ctx.R, lin, PointOnEdge(e, min(max(t, 0.0), 1.0)), context=ctx)[0]

    cands = []
    for e_x in range(ctx.net.m):
        env = host_envelope_linear(ctx.net, ctx.R, lin, e_x, tol=tol, context=ctx)
        cands.append(envelope_local_minima(env))
    env_best = min(c[0][1] for c in cands)
    margin = polish_margin * max(1.0, abs(env_best)) + 10 * tol
    minima = []
    n_polished = 0
    for e_x, cs in enumerate(cands):
        fn = exact(e_x)
        if cs[0][1] <= env_best + margin:
            found = []
            for c in cs:
                if c[1] <= env_best + margin:
                    found.append(_polish(fn, c, polish_xatol))
                    n_polished += 1
            t, v = min(found, key=lambda z: (z[1], z[0]))
        else:
            t, v = cs[0][0], fn(cs[0][0])
        minima.append(EdgeMinimum(e_x, t, v))
    best = pick_best(minima)
    x = PointOnEdge(best.edge, best.t)
    _, y, w = max_regret_at_linear(ctx.net, ctx.R, lin, x, tol=tol, context=ctx)
    return RegretSolution(
        optimum=x,
        regret=best.regret,
        per_edge_minima=minima,
        worst_case_alternative=y,
        worst_case_demand=w,
        stats={"n_pp": len(ctx.candidates), "n_polished": n_polished},
    )
