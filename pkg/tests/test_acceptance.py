"""Acceptance criteria, one test each; every test reports a PASS/FAIL line."""

import time

import numpy as np
import pytest

from edgeregret.baselines import mean_demand, solve_deterministic, solve_node_restricted
from edgeregret.bench import AGG_COLUMNS, ROW_COLUMNS, TIME_COLUMNS, ExperimentConfig, aggregate, run_experiment, to_csv
from edgeregret.breakpoints import partition_points
from edgeregret.context import CoverageContext
from edgeregret.coverage import HostTable, PiecewiseFn, coverage_profile, covered_demand
from edgeregret.envelope import Segment, upper_envelope_segments
from edgeregret.models import max_regret
from edgeregret.netcore import PointOnEdge
from edgeregret.oracle import grid_optimum, grid_regret
from edgeregret.regret_constant import host_envelope, max_regret_at, solve_constant
from edgeregret.regret_linear import solve_linear, worst_case_corner

import golden
from conftest import random_instance

TOL = 1e-6


@pytest.fixture
def verdict(record_property):
    def report(n, title, checks, detail=""):
        failed = [name for name, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"{status}  criterion {n}: {title}" + (f" ({detail})" if detail else "")
        if failed:
            line += " failed: " + ", ".join(failed)
        print(line)
        record_property("acceptance", line)
        assert not failed, line

    return report


def close(a, b, tol):
    return abs(a - b) <= tol


def test_criterion_1_example1(tri, ex1_bounds, verdict):
    t0 = time.perf_counter()
    sol = solve_constant(tri, 1.0, ex1_bounds)
    pp = partition_points(tri, 1.0)
    elapsed = time.perf_counter() - t0
    minima = {m.edge: m for m in sol.per_edge_minima}
    checks = [
        ("x*", sol.optimum.edge == 0 and close(sol.optimum.t, 2 / 3, 1e-9)),
        ("r*", close(sol.regret, 13 / 9, 1e-9)),
        ("[2,3] minimum", minima[1].t == 0.0 and close(minima[1].regret, 13 / 6, 1e-9)),
        ("[1,3] minimum", minima[2].t == 0.0 and close(minima[2].regret, 10 / 3, 1e-9)),
        ("PP", [pp.ts(e).tolist() for e in range(3)] == [[0.0, 1.0], [0.0, 0.5, 1.0], [0.0, 1 / 3, 2 / 3, 1.0]]),
        ("runtime", elapsed < 1.0),
    ]
    verdict(1, "Example 1 reproduced", checks, f"r* = {sol.regret:.12f}, {elapsed:.3f} s")


def test_criterion_2_example1_baselines(tri, ex1_bounds, verdict):
    det = solve_deterministic(tri, 1.0, mean_demand(ex1_bounds))
    r_det = max_regret(tri, 1.0, ex1_bounds, det.optimum)[0]
    g_star = covered_demand(tri, 1.0, PointOnEdge(0, 2 / 3), mean_demand(ex1_bounds))
    checks = [
        ("vertex 2", tri.point_node(det.optimum) == 2),
        ("covered demand 11", close(det.covered_demand, 11.0, 1e-9)),
        ("regret 13/6", close(r_det, 13 / 6, 1e-9)),
        ("covered demand at x*", close(g_star, 10.8889, 1e-3)),
    ]
    verdict(2, "Example 1 baselines", checks, f"g(x*) = {g_star:.4f}")


def test_criterion_3_example2(tri, ex2_bounds, verdict):
    t0 = time.perf_counter()
    sol = solve_linear(tri, 1.0, ex2_bounds, tol=TOL)
    det = solve_deterministic(tri, 1.0, mean_demand(ex2_bounds))
    r_det = max_regret(tri, 1.0, ex2_bounds, det.optimum, model="linear")[0]
    elapsed = time.perf_counter() - t0
    g_star = covered_demand(tri, 1.0, sol.optimum, mean_demand(ex2_bounds))
    m = {e.edge: e for e in sol.per_edge_minima}
    checks = [
        ("x*", sol.optimum.edge == 2 and close(sol.optimum.t, 0.0533, 5e-4)),
        ("r*", close(sol.regret, 6.3055, 5e-4)),
        ("[1,2] minimum", close(m[0].t, 0.1572, 5e-4) and close(m[0].regret, 6.4836, 5e-4)),
        ("[2,3] minimum", tri.point_node(PointOnEdge(1, m[1].t)) == 2 and close(m[1].regret, 7.9023, 5e-4)),
        ("deterministic vertex 2", tri.point_node(det.optimum) == 2),
        ("deterministic regret", close(r_det, 569 / 72, 1e-3)),
        ("deterministic covered demand", close(det.covered_demand, 12.125, 1e-3)),
        ("covered demand at x*", close(g_star, 10.6858, 1e-3)),
        ("runtime", elapsed < 10.0),
    ]
    detail = f"t* = {sol.optimum.t:.5f}, r* = {sol.regret:.5f}, {elapsed:.2f} s"
    verdict(3, "Example 2 reproduced", checks, detail)


def test_criterion_4_golden_functions(tri, verdict):
    worst = 0.0
    for (e_x, e), want in golden.S_PLUS.items():
        plus, minus = coverage_profile(tri, 1.0, e, e_x)
        worst = max(worst, golden.max_piece_error(golden.pieces_of(plus), want))
        worst = max(worst, golden.max_piece_error(golden.pieces_of(minus), golden.S_MINUS[(e_x, e)]))
    pp = partition_points(tri, 1.0)
    for (e_x, e), want in golden.C.items():
        table = HostTable(tri, 1.0, e_x, pp.ts(e_x))
        fn = PiecewiseFn(table.knots, table.C[e]).simplified()
        worst = max(worst, golden.max_piece_error(golden.pieces_of(fn), want))
    n = 2 * len(golden.S_PLUS) + len(golden.C)
    verdict(4, "closed-form coverage functions", [("max error <= 1e-9", worst <= 1e-9)], f"{n} functions, max error {worst:.1e}")


def test_criterion_5_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    checks = []
    worst_c = worst_l = 0.0
    for i in range(20):
        inst = random_instance(5000 + i, n_max=12, m_max=20)
        net, R, b = inst.net, inst.R, inst.bounds
        assert net.n <= 12 and net.m <= 20
        sol = solve_constant(net, R, b)
        g = grid_optimum(net, R, b, K=600)
        diff = abs(sol.regret - g.regret)
        worst_c = max(worst_c, diff / g.gap if g.gap > 0 else 0.0)
        checks.append((f"constant {i} gap", diff <= g.gap))
        checks.append((f"constant {i} grid_regret(x*)", grid_regret(net, R, b, sol.optimum, K=600) <= sol.regret + 1e-9))
    for i in range(10):
        inst = random_instance(6000 + i, n_max=8, m_max=10, model="linear")
        net, R, b = inst.net, inst.R, inst.bounds
        sol = solve_linear(net, R, b, tol=TOL)
        g = grid_optimum(net, R, b, K=400, model="linear")
        allowed = max(g.gap, 10 * TOL)
        diff = abs(sol.regret - g.regret)
        worst_l = max(worst_l, diff / allowed)
        checks.append((f"linear {i} gap", diff <= allowed))
        checks.append((f"linear {i} grid_regret(x*)", grid_regret(net, R, b, sol.optimum, K=400, model="linear") <= sol.regret + 1e-9))
    elapsed = time.perf_counter() - t0
    checks.append(("runtime", elapsed < 300.0))
    detail = f"worst diff/gap {worst_c:.3f} constant, {worst_l:.3f} linear, {elapsed:.1f} s"
    verdict(5, "solver agrees with the grid oracle", checks, detail)


def test_criterion_6_envelope_exactness(verdict):
    rng = np.random.default_rng(2024)
    exact = bounded = True
    for _ in range(1000):
        k = int(rng.integers(1, 41))
        segs = []
        while len(segs) < k:
            a, b = np.sort(rng.random(2))
            if b - a > 1e-3:
                segs.append(Segment(float(a), float(b), float(rng.normal()), float(3 * rng.normal()), len(segs)))
        env = upper_envelope_segments(segs)
        ts = rng.random(1000)
        truth = np.full(ts.shape, -np.inf)
        for s in segs:
            inside = (s.a <= ts) & (ts <= s.b)
            truth = np.where(inside, np.maximum(truth, s(ts)), truth)
        exact &= bool(np.array_equal(env(ts), truth))
        bounded &= env.n_pieces <= 2 * k - 1
    verdict(6, "segment envelope", [("pointwise max", exact), ("pieces <= 2k-1", bounded)], "1000 sets x 1000 probes")


def test_criterion_7_corner_table(verdict):
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(10_000):
        a_lb = rng.random() * 10
        b_lb = rng.uniform(-a_lb, 10)
        a_ub = a_lb + rng.random() * 10
        b_ub = rng.uniform(a_lb + b_lb - a_ub, 10)
        corners = np.array([[a_lb, b_lb], [a_lb, a_ub + b_ub - a_lb], [a_ub, b_ub], [a_ub, a_lb + b_lb - a_ub]])
        dc, dcb = rng.uniform(-1, 1, 2)
        want = max(a * dc + 0.5 * b * dcb for a, b in corners)
        mismatches += worst_case_corner(dc, dcb, corners)[2] != want
    verdict(7, "worst-case corner table", [("exact match", mismatches == 0)], f"{mismatches} mismatches in 10^4")


def test_criterion_8_properties(verdict):
    rng = np.random.default_rng(8)
    neg = base = convex = mono = 0
    n_inst = 0
    for i in range(8):
        model = "linear" if i >= 6 else "constant"
        inst = random_instance(7000 + i, n_max=8 if model == "linear" else 10, m_max=8 if model == "linear" else 14, model=model)
        net, R, b = inst.net, inst.R, inst.bounds
        ctx = CoverageContext(net, R)
        n_inst += 1
        sol = solve_linear(net, R, b, tol=TOL, context=ctx) if model == "linear" else solve_constant(net, R, b, context=ctx)
        for _ in range(100):
            x = PointOnEdge(int(rng.integers(net.m)), float(rng.random()))
            neg += max_regret(net, R, b, x, model=model, context=ctx)[0] < -1e-12
        nr = solve_node_restricted(net, R, b, model=model, context=ctx)
        det = solve_deterministic(net, R, mean_demand(b), context=ctx)
        base += nr.regret < sol.regret - 1e-9
        base += max_regret(net, R, b, det.optimum, model=model, context=ctx)[0] < sol.regret - 1e-9
        if model == "constant":
            for e_x in range(net.m):
                _, ic = host_envelope(net, R, b, e_x, context=ctx)
                z = np.unique(np.r_[ctx.pp.ts(e_x), ic])
                r = lambda t: max_regret_at(net, R, b, PointOnEdge(e_x, t), context=ctx)[0]  # noqa: E731
                for z1, z2 in zip(z[:-1], z[1:]):
                    mid = r(0.5 * (z1 + z2))
                    convex += mid > 0.5 * (r(z1) + r(z2)) + 1e-9
            lo = b.lb + rng.random(net.m) * (b.ub - b.lb)
            hi = lo + rng.random(net.m) * (b.ub - lo)
            for _ in range(50):
                x = PointOnEdge(int(rng.integers(net.m)), float(rng.random()))
                mono += covered_demand(net, R, x, hi) < covered_demand(net, R, x, lo) - 1e-12
    checks = [("r >= 0", neg == 0), ("baselines >= r*", base == 0), ("convexity", convex == 0), ("monotone g", mono == 0)]
    verdict(8, "property suites", checks, f"{n_inst} instances")


def test_criterion_9_desk_bench(verdict):
    cfg = ExperimentConfig(nodes=(10, 15), densities=(0.2, 0.3), ubs=(10, 100), radius_fracs=(0.2,), replications=1, seed=2024)
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    same = to_csv(first, ROW_COLUMNS, drop=TIME_COLUMNS) == to_csv(second, ROW_COLUMNS, drop=TIME_COLUMNS)
    row_head = to_csv(first, ROW_COLUMNS).splitlines()[0].split(",")
    agg_head = to_csv(aggregate(first), AGG_COLUMNS).splitlines()[0].split(",")
    devs = [r[c] for r in first for c in ("dev_nr_pct", "dev_det_pct")]
    checks = [
        ("no failed rows", all(r["error"] == "" for r in first)),
        ("deterministic", same),
        ("row schema", row_head == ROW_COLUMNS),
        ("aggregate schema", agg_head == AGG_COLUMNS),
        ("deviations >= 0", all(np.isfinite(d) and d >= 0 for d in devs)),
    ]
    verdict(9, "desk-scale bench", checks, f"{len(first)} rows, min deviation {min(devs):.3g}%")

