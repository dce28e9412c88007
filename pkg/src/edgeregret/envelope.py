"""Upper envelopes of line segments and of parametrized arcs, and their minimization.

The segment envelope is exact: it is built by a divide-and-conquer merge
whose output pieces carry the coefficients of the winning input segment.
The arc envelope samples each arc, merges the chords as segments, then
refines breakpoints and piece minima on the exact arc expressions.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .netcore import tie_tol


@dataclass(frozen=True)
class Segment:
    a: float
    b: float
    p: float
    q: float
    label: int = 0

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"segment domain [{self.a}, {self.b}] is empty")

    def __call__(self, t):
        return self.p + self.q * np.asarray(t, dtype=float)


@dataclass
class Arc:
    """Continuous function on ``[a, b]``; ``value`` must accept arrays."""

    a: float
    b: float
    value: Callable[[np.ndarray], np.ndarray]
    label: int = 0


class EnvelopeFn:
    """Piecewise-affine function with gaps, each piece tagged with a label.

    Pieces are sorted and pairwise interior-disjoint.  Where no piece is
    defined the value is ``-inf``.
    """

    def __init__(self, lo, hi, p, q, label):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.p = np.asarray(p, dtype=float)
        self.q = np.asarray(q, dtype=float)
        self.label = np.asarray(label, dtype=np.int64)

    @property
    def n_pieces(self) -> int:
        return len(self.lo)

    def pieces(self):
        for k in range(self.n_pieces):
            yield float(self.lo[k]), float(self.hi[k]), float(self.p[k]), float(self.q[k]), int(self.label[k])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.full(flat.shape, -np.inf)
        # a probe can sit on the shared end of two pieces: check both neighbours
        right = np.searchsorted(self.lo, flat, side="right") - 1
        for idx in (right, right - 1):
            ok = idx >= 0
            k = np.where(ok, idx, 0)
            ok &= (self.lo[k] <= flat) & (flat <= self.hi[k])
            out = np.where(ok, np.maximum(out, self.p[k] + self.q[k] * flat), out)
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def labels_at(self, t: float) -> list[int]:
        sel = (self.lo <= t) & (t <= self.hi)
        return sorted(set(self.label[sel].tolist()))

    def vertices(self):
        """Piece end points and their values (``2 * n_pieces`` entries)."""
        ts = np.column_stack([self.lo, self.hi]).ravel()
        vs = np.column_stack([self.p + self.q * self.lo, self.p + self.q * self.hi]).ravel()
        return ts, vs

    def covers(self, a: float = 0.0, b: float = 1.0) -> bool:
        if self.n_pieces == 0 or self.lo[0] > a or self.hi[-1] < b:
            return False
        return bool(np.all(self.lo[1:] <= self.hi[:-1]))


def _empty():
    z = np.zeros(0)
    return z, z, z, z, np.zeros(0, dtype=np.int64)


def _compress(lo, hi, p, q, lab):
    """Join contiguous pieces carrying the same segment."""
    if len(lo) < 2:
        return lo, hi, p, q, lab
    same = (lab[1:] == lab[:-1]) & (p[1:] == p[:-1]) & (q[1:] == q[:-1]) & (lo[1:] == hi[:-1])
    if not same.any():
        return lo, hi, p, q, lab
    start = np.r_[True, ~same]
    end = np.r_[~same, True]
    return lo[start], hi[end], p[start], q[start], lab[start]


def _merge(A, B):
    """Upper envelope of two envelopes given as ``(lo, hi, p, q, label)`` arrays."""
    if len(A[0]) == 0:
        return B
    if len(B[0]) == 0:
        return A
    X = np.unique(np.concatenate([A[0], A[1], B[0], B[1]]))
    x0, x1 = X[:-1], X[1:]

    def active(E):
        # the last piece starting at or before x0 is the only one that can span [x0, x1]
        idx = np.searchsorted(E[0], x0, side="right") - 1
        k = np.clip(idx, 0, None)
        return (idx >= 0) & (E[1][k] >= x1) & (E[0][k] <= x0), k

    act_a, ia = active(A)
    act_b, ib = active(B)
    pa, qa, la = A[2][ia], A[3][ia], A[4][ia]
    pb, qb, lb = B[2][ib], B[3][ib], B[4][ib]
    d0 = (pa + qa * x0) - (pb + qb * x0)
    d1 = (pa + qa * x1) - (pb + qb * x1)
    both = act_a & act_b
    tie = (d0 == 0) & (d1 == 0)
    a_win = act_a & ~act_b | both & ((d0 >= 0) & (d1 >= 0) & ~tie | tie & (la <= lb))
    b_win = act_b & ~act_a | both & ((d0 <= 0) & (d1 <= 0) & ~tie | tie & (lb < la))
    cross = both & ~a_win & ~b_win
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (x1 - x0) * (d0 / (d0 - d1))
    xc = np.clip(xc, x0, x1)
    a_first = d0 > 0

    parts = []
    for mask, P, Q, L in ((a_win, pa, qa, la), (b_win, pb, qb, lb)):
        parts.append((x0[mask], x1[mask], P[mask], Q[mask], L[mask]))
    c = cross
    first = (np.where(a_first, pa, pb)[c], np.where(a_first, qa, qb)[c], np.where(a_first, la, lb)[c])
    second = (np.where(a_first, pb, pa)[c], np.where(a_first, qb, qa)[c], np.where(a_first, lb, la)[c])
    parts.append((x0[c], xc[c], *first))
    parts.append((xc[c], x1[c], *second))
    lo, hi, p, q, lab = (np.concatenate(z) for z in zip(*parts))
    keep = hi > lo
    lo, hi, p, q, lab = lo[keep], hi[keep], p[keep], q[keep], lab[keep]
    order = np.argsort(lo, kind="stable")
    return _compress(lo[order], hi[order], p[order], q[order], lab[order])


def _chains(lo, hi):
    """Group intervals into chains of pairwise disjoint intervals (greedy partitioning)."""
    order = np.lexsort((hi, lo))
    heap: list[tuple[float, int]] = []
    chains: list[list[int]] = []
    for k in order:
        if heap and heap[0][0] <= lo[k]:
            _, c = heapq.heappop(heap)
        else:
            c = len(chains)
            chains.append([])
        chains[c].append(k)
        heapq.heappush(heap, (hi[k], c))
    return chains


def _label_chains(lo, hi, lab):
    """Split by label if every label's intervals are already disjoint, else ``None``."""
    order = np.lexsort((lo, lab))
    ls, lo_s, hi_s = lab[order], lo[order], hi[order]
    same = ls[1:] == ls[:-1]
    if np.any(same & (lo_s[1:] < hi_s[:-1])):
        return None
    cuts = np.flatnonzero(~same) + 1
    return np.split(order, cuts)


def _envelope_arrays(lo, hi, p, q, lab):
    ok = (hi > lo) & np.isfinite(p) & np.isfinite(q)
    if not ok.all():
        lo, hi, p, q, lab = lo[ok], hi[ok], p[ok], q[ok], lab[ok]
    if lo.size == 0:
        return _empty()
    chains = _label_chains(lo, hi, lab)
    if chains is None:
        chains = [np.array(c) for c in _chains(lo, hi)]
    leaves = []
    for idx in chains:
        idx = idx[np.argsort(lo[idx], kind="stable")]
        leaves.append((lo[idx], hi[idx], p[idx], q[idx], lab[idx]))
    while len(leaves) > 1:
        nxt = [_merge(leaves[i], leaves[i + 1]) for i in range(0, len(leaves) - 1, 2)]
        if len(leaves) % 2:
            nxt.append(leaves[-1])
        leaves = nxt
    return leaves[0]


def upper_envelope_segments(segments: Sequence[Segment]) -> EnvelopeFn:
    """Exact upper envelope of line segments.

    Raises:
        ValueError: if ``segments`` is empty.
    """
    if len(segments) == 0:
        raise ValueError("upper envelope of an empty family")
    arr = np.array([(s.a, s.b, s.p, s.q) for s in segments], dtype=float)
    lab = np.array([s.label for s in segments], dtype=np.int64)
    return EnvelopeFn(*_envelope_arrays(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], lab))


def envelope_from_arrays(lo, hi, p, q, label) -> EnvelopeFn:
    """Like :func:`upper_envelope_segments` but takes column arrays."""
    lo = np.asarray(lo, dtype=float)
    if lo.size == 0:
        raise ValueError("upper envelope of an empty family")
    return EnvelopeFn(
        *_envelope_arrays(
            lo,
            np.asarray(hi, dtype=float),
            np.asarray(p, dtype=float),
            np.asarray(q, dtype=float),
            np.asarray(label, dtype=np.int64),
        )
    )


def minimize_envelope(env: EnvelopeFn) -> tuple[float, float]:
    """Global minimum of the envelope; ties go to the smallest ``t``."""
    ts, vs = env.vertices()
    if ts.size == 0:
        raise ValueError("envelope has no pieces")
    vmin = vs.min()
    cand = vs <= vmin + tie_tol(vmin)
    k = np.flatnonzero(cand)[np.argmin(ts[cand])]
    return float(ts[k]), float(vs[k])


def _evaluate_each(arcs, idx, ts):
    return [np.asarray(arcs[i].value(t), dtype=float) for i, t in zip(idx, ts)]


def _sample_arcs(arcs, tol: float, n_init: int, max_rounds: int, evaluate):
    """Sample every arc, bisecting next to large second differences."""
    # n_init points across the unit interval, at least 9 per arc
    ts = [np.unique(np.linspace(a.a, a.b, max(9, int(np.ceil(n_init * (a.b - a.a)))))) for a in arcs]
    vs = evaluate(arcs, range(len(arcs)), ts)
    for _ in range(max_rounds):
        todo, new_t = [], []
        for i, (t, v) in enumerate(zip(ts, vs)):
            if len(t) < 3:
                continue
            hot = np.abs(v[:-2] - 2.0 * v[1:-1] + v[2:]) > tol
            bad = np.zeros(len(t) - 1, dtype=bool)
            bad[:-1] |= hot
            bad[1:] |= hot
            if bad.any():
                todo.append(i)
                new_t.append(0.5 * (t[:-1] + t[1:])[bad])
        if not todo:
            break
        new_v = evaluate(arcs, todo, new_t)
        for i, tm, vm in zip(todo, new_t, new_v):
            order = np.argsort(np.r_[ts[i], tm], kind="stable")
            ts[i], vs[i] = np.r_[ts[i], tm][order], np.r_[vs[i], vm][order]
    return list(zip(ts, vs))


def upper_envelope_arcs(
    arcs: Sequence[Arc], tol: float = 1e-6, n_init: int = 64, max_rounds: int = 3, evaluate=None
) -> EnvelopeFn:
    """Approximate upper envelope of arcs with refined breakpoints and minima.

    Each arc is sampled on ``n_init`` points per unit length (at least 9)
    and intervals next to a large
    second difference are bisected (at most ``max_rounds`` times).  Chords
    are merged exactly; every label change is then relocated by a bracketed
    root search of the difference of the two arcs, and every interior piece
    minimum by a bounded scalar minimization, both to ``tol`` in ``t``.
    The returned pieces are chords between refined vertices whose values are
    exact arc values.

    ``evaluate(arcs, indices, t_arrays)``, if given, returns the values of
    several arcs at once and replaces calling ``arc.value`` one by one
    during sampling.

    Raises:
        ValueError: if ``arcs`` is empty.
    """
    if not arcs:
        raise ValueError("upper envelope of an empty family")
    arcs = [a for a in arcs if a.b - a.a > 1e-12]
    if not arcs:
        raise ValueError("upper envelope of an empty family")
    samples = _sample_arcs(arcs, tol, n_init, max_rounds, evaluate or _evaluate_each)
    cols = [[], [], [], [], []]
    for idx, (t, v) in enumerate(samples):
        q = (v[1:] - v[:-1]) / (t[1:] - t[:-1])
        cols[0].append(t[:-1])
        cols[1].append(t[1:])
        cols[2].append(v[:-1] - q * t[:-1])
        cols[3].append(q)
        cols[4].append(np.full(len(q), idx))
    lo, hi, p, q, lab = _envelope_arrays(*(np.concatenate(c) for c in cols))

    # maximal runs of one arc
    runs = []
    start = 0
    for k in range(1, len(lo) + 1):
        if k == len(lo) or lab[k] != lab[start] or lo[k] != hi[k - 1]:
            runs.append([float(lo[start]), float(hi[k - 1]), int(lab[start])])
            start = k

    def value(idx, t):
        return float(np.asarray(arcs[idx].value(np.array([t])), dtype=float)[0])

    # relocate label changes between contiguous runs
    for r0, r1 in zip(runs[:-1], runs[1:]):
        if r0[1] != r1[0]:
            continue
        a, b, t0 = r0[2], r1[2], r0[1]
        lo_b = max(r0[0], arcs[b].a)
        hi_b = min(r1[1], arcs[a].b)
        if not lo_b < t0 < hi_b:
            continue

        def g(t, a=a, b=b):
            return value(a, t) - value(b, t)

        g_lo, g_hi = g(lo_b), g(hi_b)
        if g_lo >= 0.0 >= g_hi and g_lo != g_hi:
            t_new = brentq(g, lo_b, hi_b, xtol=tol) if g_lo > 0 > g_hi else (lo_b if g_lo == 0 else hi_b)
            t_new = min(max(t_new, r0[0]), r1[1])
            r0[1] = r1[0] = t_new

    out = [[], [], [], [], []]
    for t_lo, t_hi, idx in runs:
        if t_hi <= t_lo:
            continue
        ts, vs = samples[idx]
        inner = ts[(ts > t_lo) & (ts < t_hi)]
        verts = [t_lo, *inner.tolist(), t_hi]
        vals = [value(idx, t_lo), *vs[(ts > t_lo) & (ts < t_hi)].tolist(), value(idx, t_hi)]
        k = int(np.argmin(vals))
        if 0 < k < len(verts) - 1:
            res = minimize_scalar(
                lambda t: value(idx, t), bounds=(verts[k - 1], verts[k + 1]), method="bounded",
                options={"xatol": tol},
            )
            if res.fun < vals[k] and verts[k - 1] < res.x < verts[k + 1]:
                pos = k if res.x < verts[k] else k + 1
                verts.insert(pos, float(res.x))
                vals.insert(pos, float(res.fun))
        verts, vals = np.array(verts), np.array(vals)
        keep = np.r_[True, np.diff(verts) > 0]
        verts, vals = verts[keep], vals[keep]
        if len(verts) < 2:
            continue
        qq = (vals[1:] - vals[:-1]) / (verts[1:] - verts[:-1])
        out[0].append(verts[:-1])
        out[1].append(verts[1:])
        out[2].append(vals[:-1] - qq * verts[:-1])
        out[3].append(qq)
        out[4].append(np.full(len(qq), arcs[idx].label))
    return EnvelopeFn(*(np.concatenate(c) for c in out))
