"""Per-instance cache of partition points and coverage tables."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .breakpoints import PartitionPointSet, partition_points
from .coverage import HostTable, coverage_parts
from .errors import InstanceError
from .netcore import Network, PointOnEdge


class CoverageContext:
    """Lazily computed data shared by the solvers for one ``(net, R)`` pair."""

    def __init__(self, net: Network, R: float):
        if not R > 0:
            raise InstanceError(f"radius must be positive, got {R}")
        self.net = net
        self.R = float(R)
        self._tables: dict[int, HostTable] = {}

    @cached_property
    def pp(self) -> PartitionPointSet:
        return partition_points(self.net, self.R)

    def table(self, e: int) -> HostTable:
        if e not in self._tables:
            self._tables[e] = HostTable(self.net, self.R, e, self.pp.ts(e))
        return self._tables[e]

    @cached_property
    def candidates(self) -> list[PointOnEdge]:
        """Global partition point list (nodes first)."""
        return self.pp.points()

    @cached_property
    def candidate_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """``c`` and ``cbar`` of every edge at every candidate, shape ``(m, |PP|)``."""
        pts = self.candidates
        c = np.empty((self.net.m, len(pts)))
        cb = np.empty_like(c)
        for idx, y in enumerate(pts):
            c[:, idx], cb[:, idx] = coverage_parts(self.net, self.R, y.edge, y.t)
        return c, cb

    def parts(self, x: PointOnEdge):
        return coverage_parts(self.net, self.R, x.edge, x.t)
