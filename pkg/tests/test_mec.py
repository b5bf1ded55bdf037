import itertools

import pytest
from hypothesis import given, settings

from sepdist.graph import GraphError, MixedGraph, validate
from sepdist.mec import (
    NoExtensionError,
    cpdag_to_dag,
    dag_to_cpdag,
    discriminating_paths,
    markov_equivalent,
    mec_members,
    meek_closure,
    unshielded_colliders,
    unshielded_triples,
)
from sepdist.metrics import sc_metric, sep_distance

from conftest import chain, dags, labeled


def _undirected(pairs, n=None, labels="123456"):
    labs = list(labels[: n or max(int(c) for p in pairs for c in p)])
    return labeled(labs, undirected=pairs)


def test_unshielded_colliders_examples(chain3, collider3):
    assert unshielded_colliders(collider3) == {(0, 1, 2)}
    assert unshielded_colliders(chain3) == set()
    h = labeled("1234", directed=[("1", "2"), ("3", "2"), ("3", "4")])
    assert unshielded_colliders(h) == {(0, 1, 2)}
    assert unshielded_triples(h) == [(0, 1, 2), (1, 2, 3)]


def test_cpdag_examples(chain3, collider3):
    assert dag_to_cpdag(chain3) == _undirected([("1", "2"), ("2", "3")])
    assert dag_to_cpdag(collider3) == collider3
    g6 = chain(6)
    cp = dag_to_cpdag(g6)
    assert cp.n_edges == 5 and all((mu, mv) == (0, 0) for _, _, mu, mv in cp.edges())


def test_extension_examples(chain3, collider3):
    assert cpdag_to_dag(_undirected([("1", "2"), ("2", "3")])) == chain3
    assert cpdag_to_dag(collider3) == collider3
    star = _undirected([("1", "2"), ("2", "3"), ("2", "4")])
    ext = cpdag_to_dag(star)
    assert unshielded_colliders(ext) == set()
    assert dag_to_cpdag(ext) == star


def test_extension_fails_without_member():
    # 4-cycle with no chords has no extension free of new colliders
    cyc = _undirected([("1", "2"), ("2", "3"), ("3", "4"), ("1", "4")])
    with pytest.raises(NoExtensionError):
        cpdag_to_dag(cyc)


def test_meek_rule_one():
    g = labeled("123", directed=[("1", "2")], undirected=[("2", "3")])
    res = meek_closure(g)
    assert res.ok
    assert res.graph == chain(3)


def test_meek_rule_two():
    g = labeled("123", directed=[("1", "2"), ("2", "3")], undirected=[("1", "3")])
    res = meek_closure(g)
    assert res.ok
    assert list(res.graph.parents(2)) == [0, 1]


def test_meek_rule_three():
    # 1-2, 1-3, 1-4, 2->4<-3, 2 and 3 non-adjacent: R3 orients 1->4
    g = labeled("1234", directed=[("2", "4"), ("3", "4")], undirected=[("1", "2"), ("1", "3"), ("1", "4")])
    res = meek_closure(g)
    assert res.ok
    assert 0 in res.graph.parents(3)


def test_meek_conflict_is_reported():
    g = labeled("1234", directed=[("1", "2"), ("4", "3")], undirected=[("2", "3")])
    res = meek_closure(g)
    assert not res.ok
    assert any("both directions" in c for c in res.conflicts)


def test_meek_reports_cycle_and_new_collider():
    g = labeled("123", directed=[("1", "2"), ("2", "3"), ("3", "1")])
    assert any("cycle" in c for c in meek_closure(g).conflicts)


@given(dags(n_max=10))
def test_closure_is_idempotent(g):
    cp = dag_to_cpdag(g)
    again = meek_closure(cp)
    assert again.ok and again.graph == cp


@given(dags(n_max=8))
def test_closure_independent_of_node_order(g):
    n = g.n_nodes
    perm = list(reversed(range(n)))
    relabel = lambda x: MixedGraph(n, [(perm[u], perm[v], a, b) for u, v, a, b in x.edges()])
    assert dag_to_cpdag(relabel(g)) == relabel(dag_to_cpdag(g))


@given(dags(n_max=15))
def test_round_trip_stays_in_class(g):
    cp = dag_to_cpdag(g)
    assert validate(cp, "CPDAG") == []
    back = cpdag_to_dag(cp)
    assert validate(back, "DAG") == []
    assert markov_equivalent(back, g)
    assert dag_to_cpdag(back) == cp


@settings(max_examples=30)
@given(dags(n_max=7))
def test_cpdag_constant_over_class(g):
    cp = dag_to_cpdag(g)
    members = list(mec_members(cp))
    assert any(m == g for m in members)
    for m in members:
        assert dag_to_cpdag(m) == cp
        assert markov_equivalent(m, g)


def test_member_enumeration_counts(chain3):
    star = _undirected([("1", "2"), ("2", "3"), ("2", "4")])
    assert len(list(mec_members(star))) == 4
    assert len(list(mec_members(chain3))) == 3
    assert len(list(mec_members(chain(5), limit=2))) == 2


def test_equivalence_examples(chain3, collider3):
    rev = labeled("123", directed=[("2", "1"), ("3", "2")])
    assert markov_equivalent(chain3, rev)
    assert not markov_equivalent(chain3, collider3)
    with pytest.raises(GraphError):
        markov_equivalent(chain3, chain(4))


def _disc_pair():
    common = dict(directed=[("X", "W"), ("W", "Y")])
    as_collider = labeled("XWVY", bidirected=[("W", "V"), ("V", "Y")], **common)
    not_collider = labeled(
        "XWVY", directed=common["directed"] + [("V", "Y")], bidirected=[("W", "V")]
    )
    return as_collider, not_collider


def test_discriminating_path_decides_equivalence():
    a, b = _disc_pair()
    assert validate(a, "MAG") == [] and validate(b, "MAG") == []
    assert unshielded_colliders(a) == unshielded_colliders(b)
    assert (0, 1, 2, 3) in discriminating_paths(a)
    assert not markov_equivalent(a, b)
    assert markov_equivalent(a, a)
    assert sep_distance(a, b, "zl", symmetric=True).value > 0


def _dags_upto(n):
    pairs = list(itertools.combinations(range(n), 2))
    for choice in itertools.product((None, 0, 1), repeat=len(pairs)):
        edges = [(u, v) if c == 0 else (v, u) for (u, v), c in zip(pairs, choice) if c is not None]
        g = MixedGraph.from_edges(n, directed=edges)
        if validate(g, "DAG") == []:
            yield g


def test_equivalence_matches_zero_full_metric():
    graphs = list(_dags_upto(3))
    assert len(graphs) == 25
    for g, h in itertools.product(graphs, repeat=2):
        zero = sc_metric(g, h, max_order=1).aggregate == 0
        assert zero == markov_equivalent(g, h)


@settings(max_examples=40)
@given(dags(n_min=4, n_max=7), dags(n_min=4, n_max=7))
def test_equivalence_matches_zero_full_metric_random(g, h):
    n = min(g.n_nodes, h.n_nodes)
    g = MixedGraph(n, [e for e in g.edges() if max(e[:2]) < n])
    h = MixedGraph(n, [e for e in h.edges() if max(e[:2]) < n])
    for other in (h, cpdag_to_dag(dag_to_cpdag(g))):
        zero = sc_metric(g, other, max_order=n - 2).aggregate == 0
        assert zero == markov_equivalent(g, other)
