import pytest

from subsim.graph import DirectedGraph
from subsim.simengine import GammaParams, SimConfig, Simulation
from subsim.topology import TopologyParams


def fixture_config(n, protocol="transitive", k=1, **kwargs):
    """SimConfig for hand-built graphs; the topology block is only an echo."""
    kwargs.setdefault("gamma", GammaParams(1e12))
    return SimConfig(topology=TopologyParams("random", max(n, k + 1), k), protocol=protocol, **kwargs)


@pytest.fixture
def make_sim():
    def build(n, edges, protocol="transitive", trace=False, **kwargs):
        g = DirectedGraph.from_edges(n, edges)
        return Simulation(g, fixture_config(n, protocol, **kwargs), trace=trace)

    return build


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
