import itertools

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from sepdist.gen import GenSpec, random_dag, random_mixed
from sepdist.graph import MixedGraph

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def labeled(nodes, directed=(), bidirected=(), undirected=()):
    return MixedGraph.from_labeled(list(nodes), directed, bidirected, undirected)


def chain(n):
    names = [str(i) for i in range(1, n + 1)]
    return labeled(names, directed=list(zip(names, names[1:])))


@pytest.fixture
def chain3():
    return chain(3)


@pytest.fixture
def collider3():
    return labeled("123", directed=[("1", "2"), ("3", "2")])


@pytest.fixture
def ancestral5():
    """Ancestral graph where parents of both endpoints fail to separate X and Y."""
    return labeled(
        ["X", "Y", "Z", "V", "W"],
        directed=[("Z", "Y"), ("V", "W"), ("W", "X")],
        bidirected=[("X", "Z"), ("Z", "V"), ("W", "Y")],
    )


def names(g, nodes):
    return {g.label(v) for v in nodes}


def all_subsets(items):
    items = list(items)
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def all_triples(n):
    for x in range(n):
        for y in range(x + 1, n):
            rest = [v for v in range(n) if v not in (x, y)]
            for s in all_subsets(rest):
                yield x, y, s


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def dags(draw, n_min=2, n_max=7, p_max=0.6):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.sampled_from([0.1, 0.2, 0.3, 0.4, 0.5, 0.6][: int(p_max * 10)]))
    return random_dag(GenSpec(n, p, None, draw(seeds)))


@st.composite
def mixed_graphs(draw, n_min=2, n_max=7):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.sampled_from([0.2, 0.3, 0.4, 0.5, 0.6]))
    q = draw(st.sampled_from([0.0, 0.3, 0.5, 0.7, 1.0]))
    return random_mixed(GenSpec(n, p, q, draw(seeds)))


# criterion verdicts recorded by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
