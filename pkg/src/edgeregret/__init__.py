"""Minmax-regret maximal covering location on networks with uncertain edge demand.

A single facility may be placed anywhere on an undirected network and covers
every point within distance ``R``.  Demand is spread along the edges with an
unknown intensity known only to lie between per-edge bounds, either constant
or affine along each edge.  The solvers find the location minimizing the
largest possible shortfall of covered demand against the best location in
hindsight.
"""

from .baselines import DeterministicSolution, mean_demand, solve_deterministic, solve_node_restricted
from .bench import ExperimentConfig, aggregate, generate_instance, load_street_graph, run_experiment
from .breakpoints import partition_points
from .context import CoverageContext
from .coverage import c_value, cbar_value, coverage_parts, covered_demand, s_minus, s_plus
from .demand import ConstantDemandBounds, LinearDemandBounds, RegretSolution
from .envelope import Segment, minimize_envelope, upper_envelope_segments
from .errors import ConsistencyError, DisconnectedGraphError, InstanceError
from .instance import Instance, read_instance
from .models import max_regret, solve
from .netcore import EPS, Network, PointOnEdge, build_network
from .oracle import grid_optimum, grid_regret, lipschitz_gap
from .regret_constant import max_regret_at, solve_constant
from .regret_linear import max_regret_at_linear, solve_linear, worst_case_corner

__all__ = [
    "ConsistencyError",
    "ConstantDemandBounds",
    "CoverageContext",
    "DeterministicSolution",
    "DisconnectedGraphError",
    "EPS",
    "ExperimentConfig",
    "Instance",
    "InstanceError",
    "LinearDemandBounds",
    "Network",
    "PointOnEdge",
    "RegretSolution",
    "Segment",
    "aggregate",
    "build_network",
    "c_value",
    "cbar_value",
    "coverage_parts",
    "covered_demand",
    "generate_instance",
    "grid_optimum",
    "grid_regret",
    "lipschitz_gap",
    "load_street_graph",
    "max_regret",
    "max_regret_at",
    "max_regret_at_linear",
    "mean_demand",
    "minimize_envelope",
    "partition_points",
    "read_instance",
    "run_experiment",
    "s_minus",
    "s_plus",
    "solve",
    "solve_constant",
    "solve_deterministic",
    "solve_linear",
    "solve_node_restricted",
    "upper_envelope_segments",
    "worst_case_corner",
]
