from pathlib import Path

import numpy as np
import pytest

from edgeregret import ConstantDemandBounds, LinearDemandBounds, Network
from edgeregret.bench import edge_count, generate_instance

DATA = Path(__file__).parent / "data"


def triangle() -> Network:
    return Network(3, [(1, 2, 1.0), (2, 3, 2.0), (1, 3, 3.0)])


@pytest.fixture
def tri():
    return triangle()


@pytest.fixture
def ex1_bounds():
    return ConstantDemandBounds([3.0, 1.0, 2.0], [15.0, 7.0, 8.0])


@pytest.fixture
def ex2_bounds():
    return LinearDemandBounds(
        a_lb=[3.0, 0.0, 2.0], b_lb=[-3.0, 3.0, 3.0], a_ub=[15.0, 7.0, 8.0], b_ub=[7.0, 3.0, 10.0]
    )


@pytest.fixture
def data_dir():
    return DATA


def random_instance(seed: int, n_max: int = 8, m_max: int = 12, model: str = "constant", ubs=(10, 50, 100)):
    """Small random instance with at most ``n_max`` nodes and ``m_max`` edges."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(3, n_max + 1))
        p = float(rng.choice([0.2, 0.3, 0.5, 0.7]))
        if n - 1 <= edge_count(n, p) <= m_max:
            break
    return generate_instance(
        n, p, float(rng.choice(ubs)), float(rng.choice([0.1, 0.2, 0.3])), int(rng.integers(2**31)), model
    )


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call" or "::test_criterion_" not in rep.nodeid:
                continue
            found = [v for k, v in rep.user_properties if k == "acceptance"]
            lines.extend(found or [f"FAIL  {rep.nodeid.split('::')[-1]}: raised before reporting"])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0]) if "criterion " in s else 99):
            terminalreporter.write_line(line)
