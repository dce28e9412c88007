"""Random instances, street-graph loading and the comparison experiment.

Random networks are a uniformly random recursive spanning tree plus extra
edges drawn without replacement from the remaining node pairs.  Edge lengths
are uniform on ``[1, 20]`` and then repaired so that every edge is a
shortest path between its end nodes.

Seeding: ``generate_instance`` draws everything from
``numpy.random.default_rng(seed)`` (PCG64).  An experiment with seed ``s``
gives row ``i`` the seed ``SeedSequence(s).generate_state(N, uint64)[i]``,
so each row can be regenerated on its own.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .baselines import solve_deterministic, solve_node_restricted
from .context import CoverageContext
from .demand import ConstantDemandBounds, LinearDemandBounds, mean_demand
from .errors import InstanceError
from .instance import Instance
from .models import max_regret, solve
from .netcore import EPS, Network

ROW_COLUMNS = [
    "row", "nodes", "edges", "density", "ub", "radius_frac", "replication", "seed",
    "r_star", "r_nr", "r_det", "dev_nr_pct", "dev_det_pct",
    "time_maxregret_s", "time_nr_s", "time_det_s", "n_pp", "n_icp", "error",
]  # fmt: skip

AGG_COLUMNS = [
    "nodes", "density_or_edges", "ub", "radius_frac", "time_maxregret_s",
    "avg_dev_nr_pct", "max_dev_nr_pct", "time_nr_s",
    "avg_dev_det_pct", "max_dev_det_pct", "time_det_s", "n_pp", "n_icp",
]  # fmt: skip

TIME_COLUMNS = ("time_maxregret_s", "time_nr_s", "time_det_s")


def edge_count(n: int, p: float) -> int:
    return math.ceil(p * n * (n - 1) / 2 - 1e-9)


def _random_edges(n: int, m: int, rng) -> list[tuple[int, int]]:
    perm = rng.permutation(n) + 1
    tree = set()
    for i in range(1, n):
        a, b = int(perm[i]), int(perm[rng.integers(0, i)])
        tree.add((min(a, b), max(a, b)))
    rest = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in tree]
    extra = rng.choice(len(rest), size=m - (n - 1), replace=False)
    return sorted(tree | {rest[int(i)] for i in extra})


def repair_lengths(n: int, pairs, lengths) -> np.ndarray:
    """Shorten edges longer than the shortest path between their ends, until stable."""
    lengths = np.array(lengths, dtype=float)
    k = np.array([a - 1 for a, _ in pairs])
    l = np.array([b - 1 for _, b in pairs])
    while True:
        adj = csr_matrix((np.r_[lengths, lengths], (np.r_[k, l], np.r_[l, k])), shape=(n, n))
        D = shortest_path(adj, method="D", directed=False)
        short = D[k, l]
        bad = lengths > short
        if not bad.any():
            return lengths
        lengths[bad] = short[bad]


def generate_bounds(m: int, UB: float, rng, model: str = "constant"):
    """``lb ~ U[0, UB/2]`` and ``ub ~ U[UB/2, UB]``; linear bounds draw both end values."""
    if model == "constant":
        lb = rng.uniform(0.0, UB / 2, size=m)
        ub = rng.uniform(UB / 2, UB, size=m)
        return ConstantDemandBounds(lb, ub)
    lb0, lb1 = rng.uniform(0.0, UB / 2, size=(2, m))
    ub0, ub1 = rng.uniform(UB / 2, UB, size=(2, m))
    return LinearDemandBounds(lb0, lb1 - lb0, ub0, ub1 - ub0)


def generate_instance(n: int, p: float, UB: float, radius_frac: float, seed, model: str = "constant") -> Instance:
    """Random connected instance with ``ceil(p n (n-1) / 2)`` edges."""
    if n < 2:
        raise InstanceError("need at least two nodes")
    if not 0 < p <= 1:
        raise InstanceError(f"density must lie in (0, 1], got {p}")
    m = edge_count(n, p)
    if m < n - 1:
        raise InstanceError(f"density {p} gives {m} edges, fewer than the {n - 1} needed to connect {n} nodes")
    rng = np.random.default_rng(seed)
    pairs = _random_edges(n, m, rng)
    lengths = repair_lengths(n, pairs, rng.uniform(1.0, 20.0, size=m))
    bounds = generate_bounds(m, UB, rng, model)
    net = Network(n, [(a, b, ln) for (a, b), ln in zip(pairs, lengths)])
    return Instance(net, radius_frac * net.diameter, bounds, model)


def load_street_graph(path) -> Network:
    """Read a ``k l length`` edge list; blank lines and ``#`` comments are skipped."""
    triples, lines, seen = [], [], {}
    text = Path(path).read_text(encoding="utf-8")
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InstanceError(f"line {no}: expected 'k l length', got {raw.strip()!r}")
        try:
            k, l, length = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise InstanceError(f"line {no}: cannot parse {raw.strip()!r}") from None
        key = (min(k, l), max(k, l))
        if key in seen:
            raise InstanceError(f"line {no}: duplicate edge {k} {l} (first on line {seen[key]})")
        seen[key] = no
        triples.append((k, l, length))
        lines.append(no)
    if not triples:
        raise InstanceError(f"{path}: no edges")
    n = max(max(k, l) for k, l, _ in triples)
    try:
        return Network(n, triples)
    except InstanceError as exc:
        msg = str(exc)
        if msg.startswith("edge "):
            idx = int(msg.split()[1].rstrip(":"))
            raise InstanceError(f"line {lines[idx]}: {msg.split(':', 1)[1].strip()}") from None
        raise


@dataclass
class ExperimentConfig:
    """Grid of instance parameters; defaults are the desk-scale run."""

    nodes: tuple = (10, 15)
    densities: tuple = (0.2, 0.3)
    ubs: tuple = (10, 50, 100)
    radius_fracs: tuple = (0.1, 0.2, 0.3)
    replications: int = 5
    seed: int = 0
    model: str = "constant"
    tol: float = 1e-6

    def __post_init__(self):
        if any(not 0 < p <= 1 for p in self.densities):
            raise InstanceError("densities must lie in (0, 1]")
        if self.replications < 1:
            raise InstanceError("replications must be at least 1")

    @classmethod
    def full_scale(cls, **kw) -> "ExperimentConfig":
        return cls(nodes=(40, 60, 80, 100), densities=(0.1, 0.2, 0.3), **kw)

    def rows(self) -> list[dict]:
        grid = list(product(self.nodes, self.densities, self.ubs, self.radius_fracs, range(self.replications)))
        seeds = np.random.SeedSequence(self.seed).generate_state(len(grid), dtype=np.uint64)
        return [
            {"row": i, "nodes": n, "density": p, "ub": ub, "radius_frac": f, "replication": rep, "seed": int(s)}
            for i, ((n, p, ub, f, rep), s) in enumerate(zip(grid, seeds))
        ]


def _deviation(r, r_star):
    if r_star > EPS:
        return 100.0 * (r - r_star) / r_star
    return 0.0 if abs(r - r_star) <= EPS else float("nan")


def run_row(spec: dict, model: str = "constant", tol: float = 1e-6) -> dict:
    """Solve one generated instance with all three methods."""
    row = dict.fromkeys(ROW_COLUMNS, float("nan"))
    row.update(spec)
    row["error"] = ""
    try:
        inst = generate_instance(spec["nodes"], spec["density"], spec["ub"], spec["radius_frac"], spec["seed"], model)
        net, R, b = inst.net, inst.R, inst.bounds
        row["edges"] = net.m
        ctx = CoverageContext(net, R)

        t0 = time.perf_counter()
        sol = solve(net, R, b, model=model, tol=tol, context=ctx)
        row["time_maxregret_s"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        nr = solve_node_restricted(net, R, b, model=model, tol=tol, context=CoverageContext(net, R))
        row["time_nr_s"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        det = solve_deterministic(net, R, mean_demand(b), context=CoverageContext(net, R))
        row["time_det_s"] = time.perf_counter() - t0
        r_det = max_regret(net, R, b, det.optimum, model=model, tol=tol, context=ctx)[0]

        row.update(
            r_star=sol.regret,
            r_nr=nr.regret,
            r_det=r_det,
            dev_nr_pct=_deviation(nr.regret, sol.regret),
            dev_det_pct=_deviation(r_det, sol.regret),
            n_pp=sol.stats.get("n_pp", float("nan")),
            n_icp=sol.stats.get("n_icp", float("nan")),
        )
    except Exception as exc:  # recorded per row, the run goes on
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _run_row_args(args):
    return run_row(*args)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """Per-row results in row order, whatever the number of workers."""
    jobs = [(spec, config.model, config.tol) for spec in config.rows()]
    if workers <= 1:
        return [run_row(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_row_args, jobs))


def _nanmean(v):
    v = np.asarray(v, dtype=float)
    v = v[np.isfinite(v)]
    return float(v.mean()) if len(v) else float("nan")


def _nanmax(v):
    v = np.asarray(v, dtype=float)
    v = v[np.isfinite(v)]
    return float(v.max()) if len(v) else float("nan")


def aggregate(rows: list[dict]) -> list[dict]:
    """Average and maximum deviations per ``(nodes, density, ub, radius_frac)`` group."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["nodes"], r["density"], r["ub"], r["radius_frac"]), []).append(r)
    out = []
    for (n, p, ub, f), rs in groups.items():
        col = lambda name: [float(r[name]) for r in rs]  # noqa: E731
        out.append(
            {
                "nodes": n,
                "density_or_edges": p,
                "ub": ub,
                "radius_frac": f,
                "time_maxregret_s": _nanmean(col("time_maxregret_s")),
                "avg_dev_nr_pct": _nanmean(col("dev_nr_pct")),
                "max_dev_nr_pct": _nanmax(col("dev_nr_pct")),
                "time_nr_s": _nanmean(col("time_nr_s")),
                "avg_dev_det_pct": _nanmean(col("dev_det_pct")),
                "max_dev_det_pct": _nanmax(col("dev_det_pct")),
                "time_det_s": _nanmean(col("time_det_s")),
                "n_pp": _nanmean(col("n_pp")),
                "n_icp": _nanmean(col("n_icp")),
            }
        )
    return out


def to_csv(rows: list[dict], columns: list[str], delimiter: str = ",", drop=()) -> str:
    buf = io.StringIO()
    cols = [c for c in columns if c not in drop]
    w = csv.DictWriter(buf, fieldnames=cols, delimiter=delimiter, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in cols})
    return buf.getvalue()


def read_csv(text: str, delimiter: str = ",") -> list[dict]:
    """Parse CSV text produced by :func:`to_csv`; numeric fields become floats."""
    out = []
    for rec in csv.DictReader(io.StringIO(text), delimiter=delimiter):
        row = {}
        for k, v in rec.items():
            try:
                row[k] = float(v)
            except ValueError:
                row[k] = v
        out.append(row)
    return out


__all__ = [
    "AGG_COLUMNS",
    "ExperimentConfig",
    "ROW_COLUMNS",
    "aggregate",
    "edge_count",
    "generate_bounds",
    "generate_instance",
    "load_street_graph",
    "read_csv",
    "repair_lengths",
    "run_experiment",
    "run_row",
    "to_csv",
]
