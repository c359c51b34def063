import numpy as np
import pytest

from labelgad.graph import AttributedGraph


def make_graph(n, edges, attributes=None, n_features=2, seed=0):
    if attributes is None:
        attributes = np.random.default_rng(seed).normal(size=(n, n_features))
    return AttributedGraph.from_edges(n, edges, attributes)


def random_graph(n, p, n_features=3, seed=0):
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return make_graph(n, np.column_stack([iu[keep], ju[keep]]), rng.normal(size=(n, n_features)))


def random_stochastic(n, c, seed=0, concentration=1.0):
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.full(c, concentration), size=n)


@pytest.fixture
def triangle():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star5():
    return make_graph(6, [(0, k) for k in range(1, 6)])


@pytest.fixture
def path3():
    return make_graph(3, [(0, 1), (1, 2)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
