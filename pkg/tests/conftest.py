import random

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from minortest.graph import BoundedDegreeGraph

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60)
settings.load_profile("repo")


def from_nx(g: nx.Graph, delta=None) -> BoundedDegreeGraph:
    """Relabel a networkx graph to 0..n-1 (sorted node order) as a BoundedDegreeGraph."""
    nodes = sorted(g.nodes())
    idx = {v: i for i, v in enumerate(nodes)}
    return BoundedDegreeGraph.from_edges(len(nodes), [(idx[u], idx[v]) for u, v in g.edges()], delta)


def to_nx(g: BoundedDegreeGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def random_bounded(n: int, delta: int, rng: random.Random, p: float = 0.5, connected: bool = False) -> BoundedDegreeGraph:
    """Random graph with maximum degree ``delta``; optionally grown from a random spanning tree."""
    deg = [0] * n
    edges = set()
    if connected:
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            cands = [u for u in order[:i] if deg[u] < delta]
            u = rng.choice(cands)
            v = order[i]
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    for u, v in pairs:
        if (u, v) not in edges and deg[u] < delta and deg[v] < delta and rng.random() < p:
            edges.add((u, v))
            deg[u] += 1
            deg[v] += 1
    return BoundedDegreeGraph.from_edges(n, sorted(edges), delta)


def ladder(rungs: int) -> BoundedDegreeGraph:
    """Top rail 0..m-1, bottom rail m..2m-1, rung i joins i and m+i."""
    m = rungs
    edges = [(i, i + 1) for i in range(m - 1)] + [(m + i, m + i + 1) for i in range(m - 1)] + [(i, m + i) for i in range(m)]
    return BoundedDegreeGraph.from_edges(2 * m, edges)


@pytest.fixture
def rng():
    return random.Random(12345)


_acceptance_lines = {}


@pytest.fixture
def report():
    """Record the one-line outcome of an acceptance criterion; all lines are repeated in the terminal summary."""

    def emit(key: str, ok: bool, detail: str) -> None:
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}"
        _acceptance_lines[key] = line
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_acceptance_lines):
            terminalreporter.write_line(_acceptance_lines[key])
