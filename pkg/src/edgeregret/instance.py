"""Problem instances and their canonical JSON file format.

Example::

    {
      "nodes": 3,
      "radius": 1.0,
      "demand_model": "constant",
      "edges": [
        {"k": 1, "l": 2, "length": 1.0, "lb": [3.0, 0.0], "ub": [15.0, 0.0]}
      ]
    }

``lb`` and ``ub`` hold ``[intercept, slope]``; the constant model requires
zero slopes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .demand import ConstantDemandBounds, LinearDemandBounds
from .errors import InstanceError
from .models import MODELS
from .netcore import Network


@dataclass
class Instance:
    net: Network
    radius: float
    bounds: ConstantDemandBounds | LinearDemandBounds
    demand_model: str = "constant"

    def __post_init__(self):
        if self.demand_model not in MODELS:
            raise InstanceError(f"demand_model: expected one of {MODELS}, got {self.demand_model!r}")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InstanceError(f"radius: must be positive, got {self.radius}")
        if self.bounds.m != self.net.m:
            raise InstanceError("bounds and network disagree on the number of edges")
        if self.demand_model == "constant" and isinstance(self.bounds, LinearDemandBounds):
            if not self.bounds.is_constant:
                raise InstanceError("edges: constant demand_model requires zero slopes in lb and ub")
            self.bounds = self.bounds.as_constant()

    @property
    def R(self) -> float:
        return self.radius

    def to_dict(self) -> dict:
        if isinstance(self.bounds, ConstantDemandBounds):
            z = np.zeros(self.net.m)
            lb = np.column_stack([self.bounds.lb, z])
            ub = np.column_stack([self.bounds.ub, z])
        else:
            lb = np.column_stack([self.bounds.a_lb, self.bounds.b_lb])
            ub = np.column_stack([self.bounds.a_ub, self.bounds.b_ub])
        edges = [
            {
                "k": e.k,
                "l": e.l,
                "length": float(e.length),
                "lb": [float(v) for v in lb[i]],
                "ub": [float(v) for v in ub[i]],
            }
            for i, e in enumerate(self.net.edges)
        ]
        return {
            "nodes": self.net.n,
            "radius": float(self.radius),
            "demand_model": self.demand_model,
            "edges": edges,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _number(obj, key, where, integer=False):
    if key not in obj:
        raise InstanceError(f"{where}{key}: missing field")
    v = obj[key]
    ok = isinstance(v, int) if integer else isinstance(v, (int, float))
    if isinstance(v, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise InstanceError(f"{where}{key}: expected {kind}, got {v!r}")
    return v


def _pair(obj, key, where):
    v = obj.get(key)
    if (
        not isinstance(v, list)
        or len(v) != 2
        or any(isinstance(u, bool) or not isinstance(u, (int, float)) for u in v)
    ):
        raise InstanceError(f"{where}{key}: expected [intercept, slope], got {v!r}")
    return [float(u) for u in v]


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance: expected a JSON object")
    n = _number(data, "nodes", "", integer=True)
    radius = float(_number(data, "radius", ""))
    model = data.get("demand_model", "constant")
    if model not in MODELS:
        raise InstanceError(f"demand_model: expected one of {MODELS}, got {model!r}")
    edges = data.get("edges")
    if not isinstance(edges, list) or not edges:
        raise InstanceError("edges: expected a non-empty array")
    triples, lbs, ubs = [], [], []
    for i, rec in enumerate(edges):
        where = f"edges[{i}]."
        if not isinstance(rec, dict):
            raise InstanceError(f"edges[{i}]: expected an object")
        triples.append(
            (
                _number(rec, "k", where, integer=True),
                _number(rec, "l", where, integer=True),
                _number(rec, "length", where),
            )
        )
        lbs.append(_pair(rec, "lb", where))
        ubs.append(_pair(rec, "ub", where))
    net = Network(n, triples)
    lb, ub = np.array(lbs), np.array(ubs)
    if model == "constant":
        if np.any(lb[:, 1] != 0) or np.any(ub[:, 1] != 0):
            bad = int(np.argmax((lb[:, 1] != 0) | (ub[:, 1] != 0)))
            raise InstanceError(f"edges[{bad}]: constant demand_model requires slope 0")
        bounds = ConstantDemandBounds(lb[:, 0], ub[:, 0])
    else:
        bounds = LinearDemandBounds(lb[:, 0], lb[:, 1], ub[:, 0], ub[:, 1])
    return Instance(net, radius, bounds, model)


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(data)


def read_instance(path) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)
