import numpy as np
import pytest

from edgeregret import ConstantDemandBounds
from edgeregret.context import CoverageContext
from edgeregret.coverage import coverage_parts, covered_demand
from edgeregret.oracle import grid_optimum
from edgeregret.regret_constant import (
    host_envelope,
    max_regret_at,
    regret_edge_pieces,
    regret_xy,
    solve_constant,
    worst_case_demand,
)
from edgeregret.netcore import PointOnEdge

from conftest import random_instance


def test_example1_solution(tri, ex1_bounds):
    sol = solve_constant(tri, 1.0, ex1_bounds)
    assert sol.optimum.edge == 0
    assert sol.optimum.t == pytest.approx(2 / 3, abs=1e-9)
    assert sol.regret == pytest.approx(13 / 9, abs=1e-9)
    minima = {m.edge: (m.t, m.regret) for m in sol.per_edge_minima}
    assert minima[1] == pytest.approx((0.0, 13 / 6), abs=1e-9)
    assert minima[2] == pytest.approx((0.0, 10 / 3), abs=1e-9)
    assert sol.stats["n_pp"] == 6


def test_example1_point_regrets(tri, ex1_bounds):
    assert max_regret_at(tri, 1.0, ex1_bounds, PointOnEdge(0, 1.0))[0] == pytest.approx(13 / 6)
    r, y, w = max_regret_at(tri, 1.0, ex1_bounds, PointOnEdge(0, 2 / 3))
    assert r == pytest.approx(13 / 9)
    # the witness realizes the regret
    gap = covered_demand(tri, 1.0, y, w) - covered_demand(tri, 1.0, PointOnEdge(0, 2 / 3), w)
    assert gap == pytest.approx(r)


def test_worst_case_demand(tri, ex1_bounds):
    x = PointOnEdge(0, 0.4)
    assert list(worst_case_demand(tri, 1.0, ex1_bounds, x, x)) == [15.0, 7.0, 8.0]
    w = worst_case_demand(tri, 1.0, ex1_bounds, PointOnEdge(0, 1.0), PointOnEdge(1, 0.5))
    assert w[1] == 7.0
    same = ConstantDemandBounds([2.0, 2.0, 2.0], [2.0, 2.0, 2.0])
    assert list(worst_case_demand(tri, 1.0, same, x, PointOnEdge(2, 0.1))) == [2.0, 2.0, 2.0]


def test_edge_pieces_example(tri, ex1_bounds):
    fn = regret_edge_pieces(tri, 1.0, ex1_bounds, 0, PointOnEdge(2, 1 / 3), 2)
    assert fn.n_pieces == 1
    # 8 (2/3 - (1 - t)/3) = 8/3 + 8t/3
    assert fn.coefs[0] == pytest.approx([8 / 3, 8 / 3])


def test_identical_alternatives(tri, ex1_bounds):
    a = regret_xy(tri, 1.0, ex1_bounds, 0, PointOnEdge(2, 1 / 3))
    b = regret_xy(tri, 1.0, ex1_bounds, 0, PointOnEdge(2, 2 / 3))
    ts = np.linspace(0, 1, 101)
    assert np.allclose(a(ts), b(ts), atol=1e-12)


def test_regret_xy_matches_pointwise():
    for seed in range(3):
        inst = random_instance(seed, n_max=7, m_max=10)
        net, R, b = inst.net, inst.R, inst.bounds
        ctx = CoverageContext(net, R)
        rng = np.random.default_rng(seed)
        for _ in range(4):
            y = ctx.candidates[int(rng.integers(len(ctx.candidates)))]
            e_x = int(rng.integers(net.m))
            fn = regret_xy(net, R, b, e_x, y, context=ctx)
            ts = rng.random(100)
            d = coverage_parts(net, R, y.edge, y.t)[0][:, None] - coverage_parts(net, R, e_x, ts)[0]
            direct = np.maximum(b.ub[:, None] * d, b.lb[:, None] * d).sum(axis=0)
            assert np.allclose(fn(ts), direct, atol=1e-9)


def test_no_uncertainty_gives_zero_regret(tri):
    w = ConstantDemandBounds([4.0, 1.0, 2.0], [4.0, 1.0, 2.0])
    sol = solve_constant(tri, 1.0, w)
    assert sol.regret == pytest.approx(0.0, abs=1e-12)


def test_regret_nonnegative_and_nodes_not_better():
    rng = np.random.default_rng(7)
    for seed in range(5):
        inst = random_instance(seed, n_max=8, m_max=12)
        net, R, b = inst.net, inst.R, inst.bounds
        ctx = CoverageContext(net, R)
        sol = solve_constant(net, R, b, context=ctx)
        for _ in range(100):
            x = PointOnEdge(int(rng.integers(net.m)), float(rng.random()))
            assert max_regret_at(net, R, b, x, context=ctx)[0] >= -1e-12
        for v in range(1, net.n + 1):
            assert max_regret_at(net, R, b, net.node_point(v), context=ctx)[0] >= sol.regret - 1e-9


def test_convex_between_refinement_points():
    for seed in range(4):
        inst = random_instance(seed + 20, n_max=7, m_max=10)
        net, R, b = inst.net, inst.R, inst.bounds
        ctx = CoverageContext(net, R)
        for e_x in range(net.m):
            _, ic = host_envelope(net, R, b, e_x, context=ctx)
            z = np.unique(np.r_[ctx.pp.ts(e_x), ic])
            r = lambda t: max_regret_at(net, R, b, PointOnEdge(e_x, t), context=ctx)[0]  # noqa: E731
            for z1, z2 in zip(z[:-1], z[1:]):
                r1, r2 = r(z1), r(z2)
                for a in (0.25, 0.5, 0.75):
                    assert r((1 - a) * z1 + a * z2) <= (1 - a) * r1 + a * r2 + 1e-9


def test_envelope_equals_max_over_candidates():
    inst = random_instance(4, n_max=7, m_max=10)
    net, R, b = inst.net, inst.R, inst.bounds
    ctx = CoverageContext(net, R)
    for e_x in range(net.m):
        env, _ = host_envelope(net, R, b, e_x, context=ctx)
        for t in np.linspace(0, 1, 37):
            assert env(t) == pytest.approx(max_regret_at(net, R, b, PointOnEdge(e_x, t), context=ctx)[0], abs=1e-9)


def test_partition_points_dominate_for_fixed_demand():
    rng = np.random.default_rng(2)
    for seed in range(3):
        inst = random_instance(seed, n_max=7, m_max=10)
        net, R, b = inst.net, inst.R, inst.bounds
        ctx = CoverageContext(net, R)
        w = b.lb + rng.random(net.m) * (b.ub - b.lb)
        best_pp = max(float(np.dot(w, ctx.candidate_parts[0][:, k])) for k in range(len(ctx.candidates)))
        for e in range(net.m):
            c = coverage_parts(net, R, e, np.linspace(0, 1, 500))[0]
            assert np.max(w @ c) <= best_pp + 1e-9


def test_solver_matches_grid_oracle():
    for seed in range(3):
        inst = random_instance(seed + 40, n_max=6, m_max=8)
        sol = solve_constant(inst.net, inst.R, inst.bounds)
        g = grid_optimum(inst.net, inst.R, inst.bounds, K=300)
        assert sol.regret <= g.regret + 1e-9
        assert g.regret - sol.regret <= g.gap
