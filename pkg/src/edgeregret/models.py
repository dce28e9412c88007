"""Dispatch between the constant and linear demand models."""

from __future__ import annotations

from .context import CoverageContext
from .demand import ConstantDemandBounds, LinearDemandBounds, RegretSolution
from .errors import InstanceError
from .netcore import Network, PointOnEdge
from .regret_constant import max_regret_at, solve_constant
from .regret_linear import max_regret_at_linear, solve_linear

MODELS = ("constant", "linear")


def resolve_model(bounds, model: str | None = None):
    """Return ``(bounds, model)`` with the bounds converted to match ``model``.

    Without an explicit model, constant bounds select the constant model and
    linear bounds the linear one.  Constant bounds under the linear model
    admit every affine realization between ``lb`` and ``ub``.
    """
    if model is None:
        model = "constant" if isinstance(bounds, ConstantDemandBounds) else "linear"
    if model not in MODELS:
        raise InstanceError(f"unknown demand model {model!r}")
    if model == "constant" and isinstance(bounds, LinearDemandBounds):
        bounds = bounds.as_constant()
    elif model == "linear" and isinstance(bounds, ConstantDemandBounds):
        bounds = bounds.as_linear()
    return bounds, model


def max_regret(net: Network, R: float, bounds, x: PointOnEdge, model=None, tol=1e-6, context=None):
    """``(r(x), worst alternative, worst realization)`` under either model."""
    bounds, model = resolve_model(bounds, model)
    if model == "constant":
        return max_regret_at(net, R, bounds, x, context=context)
    return max_regret_at_linear(net, R, bounds, x, tol=tol, context=context)


def solve(net: Network, R: float, bounds, model=None, tol=1e-6, context=None) -> RegretSolution:
    bounds, model = resolve_model(bounds, model)
    if context is None:
        context = CoverageContext(net, R)
    if model == "constant":
        return solve_constant(net, R, bounds, context=context)
    return solve_linear(net, R, bounds, tol=tol, context=context)
