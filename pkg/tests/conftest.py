import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from motifcloss.graph import Digraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_digraph(rng: np.random.Generator, n: int, p: float, mutual_p: float = 0.0) -> Digraph:
    edges = set()
    for s in range(n):
        for t in range(n):
            if s != t and rng.random() < p:
                edges.add((s, t))
                if rng.random() < mutual_p:
                    edges.add((t, s))
    return Digraph.from_edges([f"v{i}" for i in range(n)], edges)


@pytest.fixture
def ffl() -> Digraph:
    return Digraph.from_labelled_edges([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture(scope="session")
def planted():
    from motifcloss.synthetic import planted_ffl_graph

    return planted_ffl_graph()


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
