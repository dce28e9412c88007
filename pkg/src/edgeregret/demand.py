"""Demand bound types and solution records shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceError
from .netcore import EPS, PointOnEdge, tie_tol


def _vec(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise InstanceError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ConstantDemandBounds:
    """Constant demand intensity ``lb_e <= w_e <= ub_e`` per edge."""

    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        lb, ub = _vec(self.lb, "lb"), _vec(self.ub, "ub")
        if lb.shape != ub.shape:
            raise InstanceError("lb and ub must have the same length")
        if np.any(lb < 0):
            raise InstanceError(f"negative lower bound on edge {int(np.argmax(lb < 0))}")
        if np.any(ub < lb):
            raise InstanceError(f"ub < lb on edge {int(np.argmax(ub < lb))}")
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    @property
    def m(self) -> int:
        return len(self.lb)

    def as_linear(self) -> "LinearDemandBounds":
        z = np.zeros(self.m)
        return LinearDemandBounds(self.lb, z, self.ub, z)


@dataclass(frozen=True)
class LinearDemandBounds:
    """Affine bounds ``a_lb + b_lb t <= w_e(t) <= a_ub + b_ub t`` per edge."""

    a_lb: np.ndarray
    b_lb: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray

    def __post_init__(self):
        names = ("a_lb", "b_lb", "a_ub", "b_ub")
        arrs = [_vec(getattr(self, n), n) for n in names]
        if len({a.shape for a in arrs}) != 1:
            raise InstanceError("bound coefficient arrays must have equal length")
        for n, a in zip(names, arrs):
            object.__setattr__(self, n, a)
        lb0, lb1 = self.a_lb, self.a_lb + self.b_lb
        ub0, ub1 = self.a_ub, self.a_ub + self.b_ub
        for name, bad in (
            ("lb(0) < 0", lb0 < -EPS),
            ("lb(1) < 0", lb1 < -EPS),
            ("lb(0) > ub(0)", lb0 > ub0 + EPS),
            ("lb(1) > ub(1)", lb1 > ub1 + EPS),
        ):
            if np.any(bad):
                raise InstanceError(f"{name} on edge {int(np.argmax(bad))}")

    @property
    def m(self) -> int:
        return len(self.a_lb)

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.b_lb == 0) and np.all(self.b_ub == 0))

    def as_constant(self) -> ConstantDemandBounds:
        if not self.is_constant:
            raise InstanceError("bounds have nonzero slopes")
        return ConstantDemandBounds(self.a_lb, self.a_ub)

    def corners(self) -> np.ndarray:
        """Corners of the feasible (intercept, slope) parallelogram, shape ``(m, 4, 2)``.

        Order: (i) lower bound, (ii) lb(0) to ub(1), (iii) upper bound,
        (iv) ub(0) to lb(1).
        """
        a_lb, b_lb, a_ub, b_ub = self.a_lb, self.b_lb, self.a_ub, self.b_ub
        a = np.stack([a_lb, a_lb, a_ub, a_ub], axis=1)
        b = np.stack([b_lb, a_ub + b_ub - a_lb, b_ub, a_lb + b_lb - a_ub], axis=1)
        return np.stack([a, b], axis=2)


def as_linear(bounds) -> LinearDemandBounds:
    return bounds.as_linear() if isinstance(bounds, ConstantDemandBounds) else bounds


def mean_demand(bounds) -> np.ndarray:
    """Coefficient-wise mean of the bounds as an ``(m, 2)`` realization."""
    lin = as_linear(bounds)
    return np.column_stack([(lin.a_lb + lin.a_ub) / 2, (lin.b_lb + lin.b_ub) / 2])


@dataclass
class EdgeMinimum:
    edge: int
    t: float
    regret: float


@dataclass
class RegretSolution:
    optimum: PointOnEdge
    regret: float
    per_edge_minima: list[EdgeMinimum]
    worst_case_alternative: PointOnEdge | None
    worst_case_demand: np.ndarray
    model: str = "max-regret"
    stats: dict = field(default_factory=dict)


def pick_best(minima: list[EdgeMinimum]) -> EdgeMinimum:
    """Smallest regret; ties broken by smallest edge id, then smallest ``t``."""
    best = min(m.regret for m in minima)
    ties = [m for m in minima if m.regret <= best + tie_tol(best)]
    return min(ties, key=lambda m: (m.edge, m.t))
