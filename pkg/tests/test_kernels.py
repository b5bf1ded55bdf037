"""Compiled and pure-Python kernels must agree exactly."""

import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sepdist import _pykernels, kernels
from sepdist.graph import ancestors_inclusive, collider_reach
from sepdist.strategies import StrategyContext

from conftest import dags, mixed_graphs, seeds

try:
    from sepdist import _ckernels
except ImportError:  # pragma: no cover - pure install
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _pack(sets):
    return StrategyContext._pack(sets)


def test_backend_selection_reports_a_name():
    assert kernels.BACKEND in ("python", "cython")
    assert kernels.get("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.get("fortran")


@needs_c
@pytest.mark.skipif(os.environ.get("SEPDIST_PURE_PYTHON", "") not in ("", "0"), reason="fallback forced")
def test_compiled_backend_active_by_default():
    assert kernels.BACKEND == "cython"


@needs_c
@given(mixed_graphs(n_max=9), seeds)
def test_single_queries_match(g, seed):
    rng = np.random.default_rng(seed)
    n = g.n_nodes
    for _ in range(10):
        x, y = (int(v) for v in rng.choice(n, 2, replace=False))
        s = [v for v in range(n) if v not in (x, y) and rng.random() < 0.35]
        a = _pykernels.reachable(g.csr, x, s)
        b = _ckernels.reachable(g.csr, x, s)
        assert (a == b).all()
        assert _pykernels.connected(g.csr, x, y, s) == _ckernels.connected(g.csr, x, y, s) == bool(a[y])


@needs_c
@given(mixed_graphs(n_min=3, n_max=10), dags(n_min=3, n_max=10), st.integers(1, 3))
def test_batch_kernels_match(g, h, threads):
    n = min(g.n_nodes, h.n_nodes)
    g = type(g)(n, [e for e in g.edges() if e[0] < n and e[1] < n])
    h = type(h)(n, [e for e in h.edges() if e[0] < n and e[1] < n])
    ctx = StrategyContext(h, "mb-parent")
    bp, bi = ctx.packed_basis()
    hp, hi = ctx.packed_adjacency()
    mp, mi = ctx.packed_blankets()
    for mod_a, mod_b in [(_pykernels, _ckernels)]:
        ca, fa = mod_a.union_failures(g.csr, bp, bi, hp, hi, collect=True)
        cb, fb = mod_b.union_failures(g.csr, bp, bi, hp, hi, threads=threads, collect=True)
        assert ca == cb and fa.tolist() == fb.tolist()
        assert (mod_a.mb_outside_counts(g.csr, mp, mi) == mod_b.mb_outside_counts(g.csr, mp, mi, threads=threads)).all()
        assert mod_a.mb_fast_failures(g.csr, mp, mi, hp, hi, bp, bi) == mod_b.mb_fast_failures(
            g.csr, mp, mi, hp, hi, bp, bi, threads=threads
        )
        xs = np.array([x for x in range(n) for y in range(n) if x != y], dtype=np.int32)
        ys = np.array([y for x in range(n) for y in range(n) if x != y], dtype=np.int32)
        seps = [sorted(bi[bp[x]:bp[x + 1]].tolist()) for x in xs.tolist()]
        seps = [[v for v in s if v != y] for s, y in zip(seps, ys.tolist())]
        sp, si = _pack(seps)
        assert (mod_a.pair_failures(g.csr, xs, ys, sp, si) == mod_b.pair_failures(g.csr, xs, ys, sp, si, threads=threads)).all()


@given(mixed_graphs(n_max=10))
def test_blankets_match_graph_routine(g):
    want = [sorted(collider_reach(g, v)) for v in g.nodes()]
    mods = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
    for mod in mods:
        ip, ix = mod.collider_neighbors(g.csr)
        assert [ix[ip[v]:ip[v + 1]].tolist() for v in g.nodes()] == want


def _zl_reference(g, x, y):
    keep = ancestors_inclusive(g, (x, y))
    near = collider_reach(g, x, keep)
    if y in near:
        return None
    out, seen, todo = set(), {y}, [y]
    while todo:
        for w in collider_reach(g, todo.pop(), keep):
            if w not in seen:
                seen.add(w)
                (out.add if w in near else todo.append)(w)
    return sorted(out)


@given(mixed_graphs(n_max=10), st.sampled_from([1, 3]))
def test_nearest_separators_match_reference(g, threads):
    pairs = [(x, y) for x in g.nodes() for y in g.nodes() if x != y and not g.adjacent(x, y)]
    xs = np.array([p[0] for p in pairs], dtype=np.int32)
    ys = np.array([p[1] for p in pairs], dtype=np.int32)
    want = [_zl_reference(g, x, y) for x, y in pairs]
    mods = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
    for mod in mods:
        found, ip, ix = mod.zl_separators(g.csr, xs, ys, threads)
        got = [ix[ip[i]:ip[i + 1]].tolist() if found[i] else None for i in range(len(pairs))]
        assert got == want


def test_empty_graph_kernels():
    from sepdist.graph import MixedGraph

    g = MixedGraph(4)
    mods = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
    empty = np.zeros(5, dtype=np.int32), np.zeros(0, dtype=np.int32)
    for mod in mods:
        assert not mod.reachable(g.csr, 0, []).any()
        assert mod.union_failures(g.csr, *empty, *empty)[0] == 0
        assert mod.mb_fast_failures(g.csr, *empty, *empty, *empty) == 0
        found, ip, ix = mod.zl_separators(g.csr, np.zeros(0, np.int32), np.zeros(0, np.int32))
        assert len(found) == 0 and ip.tolist() == [0] and len(ix) == 0
