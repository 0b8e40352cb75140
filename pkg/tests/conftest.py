import os

import pytest
from hypothesis import HealthCheck, settings

from ccflip.generators import gen_cliques, gen_hamming
from ccflip.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def k3():
    return Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path3():
    # a-b-c as 0-1-2
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def c4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def cliques():
    return gen_cliques([3, 4, 5])


@pytest.fixture(scope="session")
def hamming():
    return gen_hamming((3, 5, 5), 2)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
