"""JSON-ready views of solutions and human-readable summaries.

Edges are reported by their 1-based position in the instance file together
with their ``[k,l]`` label.
"""

from __future__ import annotations

import numpy as np

from .baselines import DeterministicSolution
from .demand import RegretSolution
from .netcore import Network, PointOnEdge


def point_dict(net: Network, x: PointOnEdge | None):
    if x is None:
        return None
    return {"edge": x.edge + 1, "label": net.edge(x.edge).label(), "t": float(x.t)}


def _demand_dict(net: Network, w) -> dict:
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        return {str(e + 1): float(w[e]) for e in range(net.m)}
    return {str(e + 1): [float(v) for v in w[e]] for e in range(net.m)}


def solution_dict(net: Network, sol: RegretSolution) -> dict:
    return {
        "model": sol.model,
        "optimum": point_dict(net, sol.optimum),
        "regret": float(sol.regret),
        "per_edge_minima": [
            {**point_dict(net, PointOnEdge(m.edge, m.t)), "regret": float(m.regret)} for m in sol.per_edge_minima
        ],
        "worst_case_alternative": point_dict(net, sol.worst_case_alternative),
        "worst_case_demand": _demand_dict(net, sol.worst_case_demand),
        "stats": {k: v for k, v in sol.stats.items() if isinstance(v, (int, float, str))},
    }


def deterministic_dict(net: Network, sol: DeterministicSolution, regret: float | None = None) -> dict:
    out = {
        "model": sol.model,
        "optimum": point_dict(net, sol.optimum),
        "covered_demand": float(sol.covered_demand),
        "per_edge_maxima": [
            {**point_dict(net, PointOnEdge(m.edge, m.t)), "covered_demand": float(m.value)}
            for m in sol.per_edge_maxima
        ],
    }
    if regret is not None:
        out["regret"] = float(regret)
    return out


def fmt_point(net: Network, x: PointOnEdge) -> str:
    return f"({net.edge(x.edge).label()}, {x.t:.6f})"


def solution_summary(net: Network, sol: RegretSolution) -> str:
    lines = [
        f"model: {sol.model}",
        f"optimum: edge {net.edge(sol.optimum.edge).label()}, t = {sol.optimum.t:.6f}",
        f"regret: {sol.regret:.6f}",
    ]
    if sol.worst_case_alternative is not None:
        lines.append(f"worst-case alternative: {fmt_point(net, sol.worst_case_alternative)}")
    if sol.per_edge_minima:
        lines.append("per-edge minima:")
        for m in sol.per_edge_minima:
            lines.append(f"  {net.edge(m.edge).label():>10}  t = {m.t:.6f}  regret = {m.regret:.6f}")
    return "\n".join(lines)
