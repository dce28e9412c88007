"""Command-line interface: ``edgeregret <command> [options]``.

Exit status is 0 on success, 2 for invalid input and 1 for internal errors.
Machine-readable output goes to ``--output`` (JSON, CSV or TSV), human
summaries to standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .baselines import solve_deterministic, solve_node_restricted
from .context import CoverageContext
from .demand import ConstantDemandBounds, mean_demand
from .errors import InstanceError
from .instance import Instance, read_instance
from .models import MODELS, max_regret, resolve_model, solve
from .netcore import PointOnEdge
from .oracle import grid_optimum
from .report import deterministic_dict, fmt_point, point_dict, solution_dict, solution_summary

DEFAULT_TOL = 1e-6


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=2) + "\n"
    return bench.to_csv(rows, columns, delimiter="\t" if fmt == "tsv" else ",")


def _load(args) -> tuple[Instance, object, str]:
    if not args.instance:
        raise InstanceError("--instance is required")
    inst = read_instance(args.instance)
    bounds, model = resolve_model(inst.bounds, args.demand or inst.demand_model)
    return inst, bounds, model


def _edge_arg(inst: Instance, text: str) -> int:
    try:
        if "," in text:
            k, l = (int(v) for v in text.strip("[]").split(","))
            return inst.net.edge_id(k, l)
        e = int(text) - 1
    except ValueError:
        raise InstanceError(f"--edge: expected 'k,l' or an edge number, got {text!r}") from None
    if not 0 <= e < inst.net.m:
        raise InstanceError(f"--edge: no edge number {text}")
    return e


def cmd_solve(args) -> int:
    inst, bounds, model = _load(args)
    sol = solve(inst.net, inst.R, bounds, model=model, tol=args.tol)
    print(solution_summary(inst.net, sol))
    if args.output:
        _emit(json.dumps(solution_dict(inst.net, sol), indent=2) + "\n", args.output)
    return 0


def cmd_eval(args) -> int:
    inst, bounds, model = _load(args)
    x = PointOnEdge(_edge_arg(inst, args.edge), args.t)
    r, y, w = max_regret(inst.net, inst.R, bounds, x, model=model, tol=args.tol)
    print(f"point: {fmt_point(inst.net, x)}")
    print(f"regret: {r:.6f}")
    print(f"worst-case alternative: {fmt_point(inst.net, y)}")
    print("worst-case demand: " + ", ".join(f"{e.label()}={np.round(w[e.id], 6).tolist()}" for e in inst.net.edges))
    if args.output:
        out = {"point": point_dict(inst.net, x), "regret": r, "worst_case_alternative": point_dict(inst.net, y)}
        out["worst_case_demand"] = {str(e + 1): np.asarray(w[e]).tolist() for e in range(inst.net.m)}
        _emit(json.dumps(out, indent=2) + "\n", args.output)
    return 0


def cmd_baseline(args) -> int:
    inst, bounds, model = _load(args)
    net, R = inst.net, inst.R
    ctx = CoverageContext(net, R)
    if args.mode == "node":
        sol = solve_node_restricted(net, R, bounds, model=model, tol=args.tol, context=ctx)
        print(solution_summary(net, sol))
        out = solution_dict(net, sol)
    else:
        w = mean_demand(bounds)
        det = solve_deterministic(net, R, w, context=ctx)
        r = max_regret(net, R, bounds, det.optimum, model=model, tol=args.tol, context=ctx)[0]
        print("model: deterministic (mean demand)")
        print(f"optimum: {fmt_point(net, det.optimum)}")
        print(f"covered demand: {det.covered_demand:.6f}")
        print(f"regret: {r:.6f}")
        out = deterministic_dict(net, det, regret=r)
    if args.output:
        _emit(json.dumps(out, indent=2) + "\n", args.output)
    return 0


def cmd_oracle(args) -> int:
    inst, bounds, model = _load(args)
    net, R = inst.net, inst.R
    g = grid_optimum(net, R, bounds, K=args.grid, model=model)
    sol = solve(net, R, bounds, model=model, tol=args.tol)
    diff = abs(g.regret - sol.regret)
    report = {
        "grid": args.grid,
        "grid_optimum": point_dict(net, g.optimum),
        "grid_regret": g.regret,
        "solver_optimum": point_dict(net, sol.optimum),
        "solver_regret": sol.regret,
        "difference": diff,
        "certified_gap": g.gap,
        "within_gap": bool(diff <= g.gap + 1e-9),
    }
    print(f"grid optimum: {fmt_point(net, g.optimum)}  regret = {g.regret:.6f}")
    print(f"solver optimum: {fmt_point(net, sol.optimum)}  regret = {sol.regret:.6f}")
    print(f"difference: {diff:.6g}  certified gap delta({args.grid}) = {g.gap:.6g}")
    print("within gap" if report["within_gap"] else "OUTSIDE gap")
    if args.output:
        _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0 if report["within_gap"] else 1


def cmd_gen(args) -> int:
    model = args.demand or "constant"
    if args.street:
        net = bench.load_street_graph(args.street)
        rng = np.random.default_rng(args.seed)
        b = bench.generate_bounds(net.m, args.ub, rng, model)
        inst = Instance(net, args.radius_frac * net.diameter, b, model)
    else:
        inst = bench.generate_instance(args.nodes, args.density, args.ub, args.radius_frac, args.seed, model)
    _emit(inst.dumps(), args.output)
    if args.output:
        print(f"wrote {args.output}: {inst.net.n} nodes, {inst.net.m} edges, R = {inst.R:.6g}")
    return 0


def cmd_bench(args) -> int:
    kw = dict(seed=args.seed, model=args.demand or "constant", tol=args.tol)
    if args.replications is not None:
        kw["replications"] = args.replications
    for name in ("nodes", "densities", "ubs", "radius_fracs"):
        v = getattr(args, name)
        if v:
            kw[name] = tuple(v)
    cfg = bench.ExperimentConfig.full_scale(**kw) if args.full_scale else bench.ExperimentConfig(**kw)
    rows = bench.run_experiment(cfg, workers=args.threads)
    agg = bench.aggregate(rows)
    if args.rows:
        Path(args.rows).write_text(_table(rows, bench.ROW_COLUMNS, args.format), encoding="utf-8")
    _emit(_table(agg, bench.AGG_COLUMNS, args.format), args.output)
    failed = sum(bool(r["error"]) for r in rows)
    print(f"{len(rows)} rows, {failed} failed", file=sys.stderr)
    return 0


def _pp_rows(inst: Instance, ctx: CoverageContext) -> list[dict]:
    rows = []
    for x in ctx.candidates:
        part = ctx.pp.per_edge[x.edge]
        k = int(np.argmin(np.abs(part.t - x.t)))
        node = inst.net.point_node(x)
        rows.append(
            {
                **point_dict(inst.net, x),
                "node": node if node is not None else "",
                "tags": "+".join(sorted(part.tags[k])),
            }
        )
    return rows


def cmd_dump(args) -> int:
    inst, bounds, model = _load(args)
    net, R = inst.net, inst.R
    ctx = CoverageContext(net, R)
    if args.what == "pp":
        rows, cols = _pp_rows(inst, ctx), ["edge", "label", "t", "node", "tags"]
    elif args.what == "counts":
        from .regret_constant import host_envelope

        # identical coverage points depend on coverage only, not on the bounds
        zero = ConstantDemandBounds(np.zeros(net.m), np.zeros(net.m))
        rows = []
        for rec in ctx.pp.counts():
            e = rec["edge"]
            _, ic = host_envelope(net, R, zero, e, context=ctx)
            rows.append({**rec, "edge": e + 1, "label": net.edge(e).label(), "n_ic": len(ic)})
        cols = ["edge", "label", "n_bp", "n_nip", "n_ep", "n_ic"]
    elif args.what == "envelope":
        from .regret_constant import host_envelope
        from .regret_linear import host_envelope_linear

        e = _edge_arg(inst, args.edge or "1")
        if model == "constant":
            env, _ = host_envelope(net, R, bounds, e, context=ctx)
            names = [fmt_point(net, y) for y in ctx.candidates]
        else:
            env = host_envelope_linear(net, R, bounds, e, tol=args.tol, context=ctx)
            names = None
        rows = [
            {"t_lo": a, "t_hi": b, "p": p, "q": q, "label": names[lab] if names else lab}
            for a, b, p, q, lab in env.pieces()
        ]
        cols = ["t_lo", "t_hi", "p", "q", "label"]
    else:
        from .regret_linear import CORNER_NAMES, cell_subdivision

        e = _edge_arg(inst, args.edge or "1")
        e_y = _edge_arg(inst, args.edge_y or args.edge or "1")
        rows = []
        for c in cell_subdivision(net, R, bounds, e, e_y, context=ctx):
            (xa, xb), (ya, yb) = c.x_range, c.y_range
            rows.append(
                {
                    "strip": c.strip,
                    "row": c.row,
                    "x_lo": xa,
                    "x_hi": xb,
                    "y_lo": ya,
                    "y_hi": yb,
                    "corners": "-".join(CORNER_NAMES[int(k)] for k in c.corners),
                    **{f"c_{n}": float(v) for n, v in zip(("1", "tx", "tx2", "ty", "ty2"), c.coef)},
                }
            )
        cols = ["strip", "row", "x_lo", "x_hi", "y_lo", "y_hi", "corners", "c_1", "c_tx", "c_tx2", "c_ty", "c_ty2"]
    _emit(_table(rows, cols, args.format), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance JSON file")
    common.add_argument("--demand", choices=MODELS, help="override the instance's demand model")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="linear-model envelope tolerance (default 1e-6)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for bench (default 1)")
    common.add_argument("--output", help="write machine-readable output here")
    common.add_argument("--format", choices=("json", "csv", "tsv"), default=None, help="table format")

    p = argparse.ArgumentParser(prog="edgeregret", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="minimize the maximal regret")

    s = sub.add_parser("eval", parents=[common], help="maximal regret at one point")
    s.add_argument("--edge", required=True, help="edge as 'k,l' or 1-based edge number")
    s.add_argument("--t", type=float, required=True, help="position on the edge, from k")

    s = sub.add_parser("baseline", parents=[common], help="node-restricted or mean-demand solution")
    s.add_argument("--mode", choices=("node", "deterministic"), default="node")

    s = sub.add_parser("oracle", parents=[common], help="grid cross-check of the solver")
    s.add_argument("--grid", type=int, default=600, help="grid points per edge (default 600)")

    s = sub.add_parser("gen", parents=[common], help="generate a random instance")
    s.add_argument("--nodes", type=int, default=10)
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--ub", type=float, default=50.0)
    s.add_argument("--radius-frac", type=float, default=0.2)
    s.add_argument("--street", help="edge-list file to use instead of a random graph")

    s = sub.add_parser("bench", parents=[common], help="run the comparison experiment")
    s.add_argument("--full-scale", action="store_true", help="n in {40,60,80,100}, p in {0.1,0.2,0.3}")
    s.add_argument("--nodes", type=int, nargs="+")
    s.add_argument("--densities", type=float, nargs="+")
    s.add_argument("--ubs", type=float, nargs="+")
    s.add_argument("--radius-fracs", type=float, nargs="+")
    s.add_argument("--replications", type=int)
    s.add_argument("--rows", help="also write per-row results here")

    s = sub.add_parser("dump", parents=[common], help="partition points, point counts, envelopes or cells")
    s.add_argument("what", choices=("pp", "counts", "envelope", "cells"))
    s.add_argument("--edge", help="host edge for envelope/cells")
    s.add_argument("--edge-y", help="alternative edge for cells")
    return p


COMMANDS = {
    "solve": cmd_solve,
    "eval": cmd_eval,
    "baseline": cmd_baseline,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "dump": cmd_dump,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "bench" else "tsv" if args.command == "dump" else "json"
    try:
        return COMMANDS[args.command](args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
