import numpy as np
import pytest

from diracgraph import (
    ExternalEdge,
    InternalEdge,
    MetricGraph,
    SpectralProblem,
    global_conditions,
)

ACCEPTANCE_LINES = []

# W of the two-half-line, two-segment example graph, rows in vertex order
EXAMPLE_W = np.array(
    [
        [0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
    ]
)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def example_graph(mass=1.0):
    # two outgoing half-lines at v2, internal edges v3->v1 and v2->v3
    return MetricGraph(
        ["v1", "v2", "v3"],
        [
            ExternalEdge("j1", "v2", -1, 0.0),
            InternalEdge("j2", "v3", "v1", 0.0, 1.3),
            ExternalEdge("j3", "v2", -1, 0.0),
            InternalEdge("j4", "v2", "v3", 0.0, 0.8),
        ],
        mass,
    )


def mixed_graph(mass=1.0):
    """Two vertices, two internal edges, one outgoing and one incoming half-line."""
    return MetricGraph(
        ["v1", "v2"],
        [
            InternalEdge("i1", "v1", "v2", 0.0, 1.0),
            InternalEdge("i2", "v1", "v2", 0.0, 1.5),
            ExternalEdge("out", "v1", -1, 0.0),
            ExternalEdge("in", "v2", 1, 0.0),
        ],
        mass,
    )


def segment_graph(L=1.0, mass=1.0, a=0.0):
    return MetricGraph(["v1", "v2"], [InternalEdge("e", "v1", "v2", a, a + L)], mass)


def theta_graph(mass=1.0):
    return MetricGraph(
        ["v1", "v2"],
        [
            InternalEdge("a", "v1", "v2", 0.0, 1.0),
            InternalEdge("b", "v2", "v1", 0.0, 1.7),
            InternalEdge("c", "v1", "v2", 0.0, 2.3),
        ],
        mass,
    )


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_problem(g, seed, real=False):
    rng = np.random.default_rng(seed)
    n = g.dim
    if real:
        A, B = rng.normal(size=(n, n)), rng.normal(size=(n, n))
    else:
        A, B = random_complex(rng, n), random_complex(rng, n)
    return SpectralProblem(g, global_conditions(g, A, B))


@pytest.fixture
def example():
    return example_graph()


@pytest.fixture
def mixed():
    return mixed_graph()
