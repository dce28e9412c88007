import json

import numpy as np
import pytest

from edgeregret import ConstantDemandBounds, LinearDemandBounds
from edgeregret.errors import InstanceError
from edgeregret.instance import Instance, instance_from_dict, loads, read_instance


def edge(k, l, length, lb=(1.0, 0.0), ub=(2.0, 0.0)):
    return {"k": k, "l": l, "length": length, "lb": list(lb), "ub": list(ub)}


def doc(**kw):
    d = {"nodes": 2, "radius": 1.0, "edges": [edge(1, 2, 3.0)]}
    d.update(kw)
    return d


def test_examples_load(data_dir, tri):
    ex1 = read_instance(data_dir / "example1.json")
    assert ex1.net == tri and ex1.R == 1.0 and ex1.demand_model == "constant"
    assert isinstance(ex1.bounds, ConstantDemandBounds)
    assert ex1.bounds.ub.tolist() == [15.0, 7.0, 8.0]
    ex2 = read_instance(data_dir / "example2.json")
    assert isinstance(ex2.bounds, LinearDemandBounds)
    assert ex2.bounds.b_ub.tolist() == [7.0, 3.0, 10.0]


@pytest.mark.parametrize("name", ["example1.json", "example2.json"])
def test_round_trip(data_dir, name):
    inst = read_instance(data_dir / name)
    again = loads(inst.dumps())
    assert again.to_dict() == inst.to_dict()


def test_write(tmp_path, data_dir):
    inst = read_instance(data_dir / "example2.json")
    inst.write(tmp_path / "x.json")
    assert read_instance(tmp_path / "x.json").to_dict() == inst.to_dict()


def test_default_model_is_constant():
    assert instance_from_dict(doc()).demand_model == "constant"


@pytest.mark.parametrize(
    "data, field",
    [
        (doc(nodes="3"), "nodes"),
        (doc(radius=-1.0), "radius"),
        (doc(demand_model="quadratic"), "demand_model"),
        (doc(edges=[]), "edges"),
        (doc(edges=[{"k": 1, "l": 2, "lb": [0, 0], "ub": [1, 0]}]), r"edges\[0\]\.length"),
        (doc(edges=[edge(1, 2, 1.0, lb=(1.0,))]), r"edges\[0\]\.lb"),
        (doc(edges=[edge(1, 2, 1.0, ub=(True, 0))]), r"edges\[0\]\.ub"),
        (doc(edges=[edge(1, 2, 1.0, lb=(0, 0.5))]), r"edges\[0\].*slope 0"),
    ],
)
def test_errors_name_the_field(data, field):
    with pytest.raises(InstanceError, match=field):
        instance_from_dict(data)


def test_bad_bounds():
    with pytest.raises(InstanceError):
        instance_from_dict(doc(edges=[edge(1, 2, 1.0, lb=(3, 0), ub=(2, 0))]))
    with pytest.raises(InstanceError):
        instance_from_dict(doc(edges=[edge(1, 2, 1.0, lb=(-1, 0), ub=(2, 0))]))
    # feasible at t = 0, lb > ub at t = 1
    with pytest.raises(InstanceError):
        instance_from_dict(doc(demand_model="linear", edges=[edge(1, 2, 1.0, lb=(1, 3), ub=(2, 0))]))


def test_network_errors_surface():
    with pytest.raises(InstanceError, match="self-loop"):
        instance_from_dict(doc(edges=[edge(1, 1, 1.0)]))
    with pytest.raises(InstanceError, match="connected"):
        instance_from_dict(doc(nodes=3))


def test_malformed_json_reports_position():
    with pytest.raises(InstanceError, match="line 2 column"):
        loads('{"nodes": 2,\n  radius: 1}')


def test_missing_file(tmp_path):
    with pytest.raises(InstanceError, match="cannot read"):
        read_instance(tmp_path / "nope.json")


def test_constant_model_accepts_flat_linear_bounds(tri):
    b = LinearDemandBounds(np.ones(3), np.zeros(3), 2 * np.ones(3), np.zeros(3))
    inst = Instance(tri, 1.0, b, "constant")
    assert isinstance(inst.bounds, ConstantDemandBounds)
    with pytest.raises(InstanceError):
        Instance(tri, 1.0, LinearDemandBounds(np.ones(3), np.ones(3), 3 * np.ones(3), np.zeros(3)), "constant")


def test_dumps_is_json(data_dir):
    d = json.loads(read_instance(data_dir / "example1.json").dumps())
    assert d["edges"][2] == {"k": 1, "l": 3, "length": 3.0, "lb": [2.0, 0.0], "ub": [8.0, 0.0]}
