import pytest

from sostree.model import ModelParams
from sostree.periodic_system import PeriodicBoundaryLaw
from sostree import special_k2 as k2

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def special_params():
    """Factory for the solvable case k=2, 2p=q_w=1 at a given tau."""
    return lambda tau: ModelParams.from_tau(tau, 0.5, 1.0, 2)


def branch_law(tau, branch=2, swap=False):
    pairs = [p for p in k2.asymmetric_solutions(tau) if p.kind == f"asym_branch{branch}"]
    p = pairs[1 if swap else 0]
    return PeriodicBoundaryLaw([1.0, p.a, 1.0, p.b])
