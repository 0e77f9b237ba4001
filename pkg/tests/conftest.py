from pathlib import Path

import pytest

from adjstate.graph import Graph, read_edge_list

DATA = Path(__file__).parent / "data"


@pytest.fixture
def example8() -> Graph:
    return read_edge_list(DATA / "example8.edges")


def k(n: int) -> Graph:
    return Graph.complete(n)


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
