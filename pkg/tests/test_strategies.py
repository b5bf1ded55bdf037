import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sepdist import mec
from sepdist.gen import GenSpec, random_mag
from sepdist.graph import GraphError, MixedGraph, ancestors_inclusive, induced_subgraph, moralize, validate
from sepdist.separation import m_separated, separated_brute_force
from sepdist.strategies import (
    SepStrategy,
    SeparatorChoice,
    StrategyContext,
    all_separators,
    select_separator,
    zl_separator,
)

from conftest import all_subsets, dags, labeled, mixed_graphs, names, seeds

DAG_STRATEGIES = [s.value for s in SepStrategy]
MAG_STRATEGIES = ["zl", "mb-zl"]


@st.composite
def mags(draw, n_min=2, n_max=7):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.sampled_from([0.2, 0.3, 0.4, 0.5]))
    q = draw(st.sampled_from([0.3, 0.5, 0.8]))
    return random_mag(GenSpec(n, p, q, draw(seeds)))


def _sep(g, x, y, strategy):
    return select_separator(g, x, y, strategy).separator


def test_strategy_vocabulary():
    assert SepStrategy("mb-zl").is_mb and SepStrategy("mb-zl").base is SepStrategy.ZL
    assert SepStrategy.PARENT.with_mb() is SepStrategy.MB_PARENT
    assert SepStrategy.ANCESTOR.is_union and not SepStrategy.ZL.is_union
    with pytest.raises(ValueError):
        SepStrategy("nearest")


def test_worked_separator_examples(chain3, collider3):
    assert names(chain3, _sep(chain3, "1", "3", "parent")) == {"2"}
    assert _sep(collider3, "1", "3", "parent") == frozenset()
    und = labeled("123", undirected=[("1", "2"), ("2", "3")])
    assert names(und, _sep(und, "1", "3", "pparent")) == {"2"}
    assert names(chain3, _sep(chain3, "3", "1", "ancestor")) == {"2"}


def test_zl_examples(chain3, collider3, ancestral5):
    assert names(chain3, zl_separator(chain3, "1", "3").separator) == {"2"}
    assert zl_separator(collider3, "1", "3").separator == frozenset()
    choice = zl_separator(ancestral5, "X", "Y")
    assert choice.pair == (0, 1)
    assert names(ancestral5, choice.separator) == {"Z", "V", "W"}


def test_zl_none_on_inducing_path():
    # 1<->2<->3 with 2 an ancestor of 3 via 2->4->3 is not maximal: 1 and 3 inseparable
    g = labeled("1234", directed=[("2", "4"), ("4", "3")], bidirected=[("1", "2"), ("2", "3")])
    assert zl_separator(g, "1", "3").separator is None
    for s in all_subsets(["2", "4"]):
        assert not m_separated(g, "1", "3", list(s))


def test_adjacent_pair_rejected(chain3):
    with pytest.raises(GraphError):
        select_separator(chain3, "1", "2", "parent")
    with pytest.raises(GraphError):
        zl_separator(chain3, "2", "3")


def test_class_checks(ancestral5):
    with pytest.raises(GraphError):
        select_separator(ancestral5, "X", "Y", "parent")
    with pytest.raises(GraphError):
        select_separator(ancestral5, "X", "Y", "pparent")
    und = labeled("123", undirected=[("1", "2"), ("2", "3")])
    with pytest.raises(GraphError):
        select_separator(und, "1", "3", "ancestor")
    with pytest.raises(GraphError):
        StrategyContext(MixedGraph(2, [(0, 1, 2, 1)]), "zl")


def test_ancestral_example_defeats_parent_separation(ancestral5):
    s = select_separator(ancestral5, "X", "Y", "parent", strict=False).separator
    assert names(ancestral5, s) == {"W", "Z"}
    assert not m_separated(ancestral5, "X", "Y", s)


def test_ancestral_example_ancestor_set_includes_v_and_separates(ancestral5):
    # V -> W -> X puts V among the ancestors, so the ancestor set is the
    # minimal separator here rather than the parent set
    s = select_separator(ancestral5, "X", "Y", "ancestor", strict=False).separator
    assert names(ancestral5, s) == {"W", "Z", "V"}
    assert m_separated(ancestral5, "X", "Y", s)


@settings(max_examples=60)
@given(mags(n_max=7))
def test_ancestor_set_separates_whenever_anything_does(g):
    for c in all_separators(g, "ancestor", strict=False):
        x, y = c.pair
        separable = zl_separator(g, x, y).separator is not None
        assert m_separated(g, x, y, c.separator) == separable


def test_all_separators_examples(chain3, collider3):
    assert all(c.separator == frozenset() for c in all_separators(MixedGraph(4), "parent"))
    assert len(all_separators(MixedGraph(4), "parent")) == 12
    out = all_separators(chain3, "parent")
    assert out == [SeparatorChoice((0, 2), frozenset({1})), SeparatorChoice((2, 0), frozenset({1}))]
    out = all_separators(chain3, "mb-parent", h=collider3)
    assert [c.separator for c in out] == [frozenset(), frozenset()]
    assert StrategyContext(collider3, "mb-parent").blankets[0] == {1, 2}


def _check_valid(g, strategy):
    for c in all_separators(g, strategy):
        x, y = c.pair
        if c.separator is None:
            assert not any(separated_brute_force(g, x, y, s) for s in all_subsets(set(range(g.n_nodes)) - {x, y}))
        else:
            assert m_separated(g, x, y, c.separator), (strategy, c)


@settings(max_examples=100)
@given(dags(n_max=15), st.sampled_from(DAG_STRATEGIES))
def test_every_strategy_valid_on_dags(g, strategy):
    _check_valid(g, strategy)


@settings(max_examples=100)
@given(mags(n_max=7), st.sampled_from(MAG_STRATEGIES))
def test_zl_strategies_valid_on_mags(g, strategy):
    assert validate(g, "MAG") == []
    _check_valid(g, strategy)


@given(mixed_graphs(n_max=7))
def test_zl_none_iff_inseparable_on_nonmaximal(g):
    _check_valid(g, "zl")


@given(mixed_graphs(n_max=9))
def test_zl_minimal(g):
    for c in all_separators(g, "zl"):
        if not c.separator:
            continue
        x, y = c.pair
        for v in c.separator:
            assert not m_separated(g, x, y, c.separator - {v})


def _moral_reach(m, x, blocked):
    seen, stack = {x}, [x]
    while stack:
        v = stack.pop()
        for w in m.neighbors(v):
            if w not in seen and w not in blocked:
                seen.add(w)
                stack.append(w)
    return seen


@settings(max_examples=40)
@given(mixed_graphs(n_max=7))
def test_zl_is_the_minimal_separator_closest_to_x(g):
    """Brute force: among minimal separators inside the ancestral set, the
    region cut off around x is smallest for the returned one."""
    n = g.n_nodes
    for x, y in itertools.permutations(range(n), 2):
        if g.adjacent(x, y):
            continue
        keep = sorted(ancestors_inclusive(g, (x, y)))
        sub = induced_subgraph(g, keep)
        m = moralize(sub)
        pos = {v: i for i, v in enumerate(keep)}
        cands = [v for v in keep if v not in (x, y)]
        minimal = []
        for s in all_subsets(cands):
            s = set(s)
            if m_separated(g, x, y, s) and all(not m_separated(g, x, y, s - {v}) for v in s):
                minimal.append(frozenset(s))
        got = zl_separator(g, x, y).separator
        if not minimal:
            assert got is None
            continue
        assert got in minimal
        region = lambda s: _moral_reach(m, pos[x], {pos[v] for v in s})
        for s in minimal:
            assert region(got) <= region(s)


@settings(max_examples=30)
@given(dags(n_max=8), st.sampled_from(["zl", "pparent", "mb-zl", "mb-pparent"]))
def test_invariant_across_equivalence_class(g, strategy):
    want = all_separators(g, strategy)
    for member in mec.mec_members(mec.dag_to_cpdag(g)):
        assert all_separators(member, strategy) == want
    assert all_separators(mec.dag_to_cpdag(g), strategy) == want


@settings(max_examples=40)
@given(dags(n_max=12))
def test_possible_parents_separate_in_every_member(g):
    cp = mec.dag_to_cpdag(g)
    choices = all_separators(cp, "pparent")
    for member in mec.mec_members(cp, limit=20):
        for c in choices:
            assert m_separated(member, *c.pair, c.separator)


@given(dags(n_max=8))
def test_ordered_pairs_symmetric_for_symmetric_strategies(g):
    for strategy in ("parent", "ancestor", "pparent", "zl"):
        got = {c.pair: c.separator for c in all_separators(g, strategy)}
        for (x, y), s in got.items():
            if strategy != "zl":
                assert got[(y, x)] == s
