import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgeregret.errors import DisconnectedGraphError, InstanceError
from edgeregret.netcore import (
    Network,
    PointOnEdge,
    Subedge,
    build_network,
    host_distances,
    point_node_distance,
    point_point_distance,
)

from conftest import random_instance, triangle


def test_triangle_distances(tri):
    assert tri.dist(1, 3) == 3.0
    assert tri.dist(1, 2) == 1.0
    assert tri.dist(2, 3) == 2.0
    assert tri.diameter == 3.0


def test_single_edge_and_path():
    assert build_network(2, [(1, 2, 5.0)]).dist(1, 2) == 5.0
    assert build_network(3, [(1, 2, 1.0), (2, 3, 1.0)]).dist(1, 3) == 2.0


def test_shortcut_makes_distance_shorter_than_edge():
    net = Network(3, [(1, 2, 1.0), (2, 3, 1.0), (1, 3, 5.0)])
    assert net.dist(1, 3) == 2.0


@pytest.mark.parametrize(
    "edges",
    [
        [(1, 2, 0.0)],
        [(1, 2, -1.0)],
        [(1, 1, 1.0)],
        [(1, 2, 1.0), (2, 1, 2.0)],
        [(1, 4, 1.0)],
        [],
    ],
)
def test_invalid_networks(edges):
    with pytest.raises(InstanceError):
        Network(3, edges)


def test_disconnected():
    with pytest.raises(DisconnectedGraphError):
        Network(4, [(1, 2, 1.0), (3, 4, 1.0)])


def test_single_node_rejected():
    with pytest.raises(InstanceError):
        Network(1, [])


def test_network_is_read_only(tri):
    with pytest.raises(ValueError):
        tri.node_dist[0, 1] = 7.0


def test_point_node_distance(tri):
    assert point_node_distance(tri, PointOnEdge(0, 0.5), 3) == pytest.approx(2.5)
    assert point_node_distance(tri, PointOnEdge(0, 0.0), 1) == 0.0
    assert point_node_distance(tri, PointOnEdge(0, 1.0), 3) == 2.0


def test_point_point_distance(tri):
    assert point_point_distance(tri, PointOnEdge(0, 0.25), PointOnEdge(0, 0.75)) == pytest.approx(0.5)
    x = PointOnEdge(2, 0.3)
    assert point_point_distance(tri, x, x) == 0.0
    assert point_point_distance(tri, PointOnEdge(0, 1.0), PointOnEdge(1, 0.0)) == 0.0


def test_point_validation():
    with pytest.raises(InstanceError):
        PointOnEdge(0, 1.5)
    with pytest.raises(InstanceError):
        PointOnEdge(0, float("nan"))
    assert PointOnEdge(0, -1e-12).t == 0.0
    with pytest.raises(InstanceError):
        Subedge(0, 0.6, 0.4)


def test_edge_lookup_and_nodes(tri):
    assert tri.edge_id(3, 2) == 1
    assert tri.edge(2).label() == "[1,3]"
    with pytest.raises(InstanceError):
        Network(4, [(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).edge_id(1, 4)
    assert tri.node_point(3) == PointOnEdge(1, 1.0)
    assert tri.point_node(PointOnEdge(2, 0.0)) == 1
    assert tri.point_node(PointOnEdge(2, 0.5)) is None


def test_host_distances_match_scalar(tri):
    ts = np.linspace(0, 1, 7)
    D = host_distances(tri, 2, ts)
    for j, t in enumerate(ts):
        for i in range(1, 4):
            assert D[i - 1, j] == pytest.approx(point_node_distance(tri, PointOnEdge(2, t), i))


def test_node_dist_is_a_metric():
    for seed in range(5):
        net = random_instance(seed, n_max=10, m_max=20).net
        D = net.node_dist
        assert np.allclose(D, D.T)
        assert np.all(np.diag(D) == 0)
        assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + 1e-9)
        for e in net.edges:
            assert net.dist(e.k, e.l) <= e.length + 1e-12


_points = st.tuples(st.integers(0, 2), st.floats(0, 1))


@settings(max_examples=200, deadline=None)
@given(_points, _points)
def test_distance_symmetry(a, b):
    net = triangle()
    x, y = PointOnEdge(*a), PointOnEdge(*b)
    assert point_point_distance(net, x, y) == pytest.approx(point_point_distance(net, y, x), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(_points, st.integers(1, 3), st.integers(1, 3))
def test_node_distance_triangle_inequality(a, i, j):
    net = triangle()
    x = PointOnEdge(*a)
    assert point_node_distance(net, x, i) <= point_node_distance(net, x, j) + net.dist(j, i) + 1e-12


@settings(max_examples=200, deadline=None)
@given(_points)
def test_distance_to_own_endpoint(a):
    net = triangle()
    x = PointOnEdge(*a)
    e = net.edge(x.edge)
    d = point_node_distance(net, x, e.k)
    assert d <= x.t * e.length + 1e-12
    if x.t * e.length <= (1 - x.t) * e.length + net.dist(e.l, e.k):
        assert d == pytest.approx(x.t * e.length)
