"""Distances between causal graphs.

* :func:`shd` counts node pairs whose edge differs.
* :func:`sep_distance` checks, for every ordered pair non-adjacent in ``h``,
  whether the separator a strategy picks in ``h`` still separates in ``g``.
* :func:`sep_distance_fast_mb` computes the same number for MB-enhanced
  strategies with one traversal per source node.
* :func:`sc_metric` and :func:`order_rates` compare separation statements
  ``(x, y, S)`` order by order, exhaustively or by seeded sampling.

Counts are exact integers and per-order rates are :class:`fractions.Fraction`,
so results do not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from . import kernels, mec
from .graph import GraphError, MixedGraph, require_acyclic_mixed
from .strategies import SepStrategy, StrategyContext, _zl

__all__ = [
    "DistanceReport",
    "OrderRate",
    "OrderProfile",
    "shd",
    "sep_distance",
    "sep_distance_fast_mb",
    "sc_metric",
    "order_rates",
    "verification_graph",
    "n_triples",
    "unrank_triple",
]


@dataclass
class DistanceReport:
    """Distance value with the counts it was computed from.

    ``value`` equals ``numerator / denominator`` whenever the denominator is
    positive. ``failures`` lists ``((x, y), separator)`` for failed pairs when
    requested. ``skipped`` counts pairs without a separator in the estimate
    that were also inseparable in the reference and hence not scored.
    """

    metric: str
    value: float
    numerator: int
    denominator: int
    failures: list[tuple[tuple[int, int], frozenset[int] | None]] | None = None
    skipped: int = 0

    @property
    def exact(self) -> Fraction:
        return Fraction(self.numerator, self.denominator) if self.denominator else Fraction(0)


@dataclass(frozen=True)
class OrderRate:
    order: int
    rate: Fraction | None
    tested: int
    disagreements: int


@dataclass
class OrderProfile:
    """Per-order rates and their aggregate; undefined orders have ``rate=None``."""

    metric: str
    per_order: list[OrderRate]
    aggregate: Fraction | None
    weights: list[float] | None = None
    sampler: str = "full"
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> float | None:
        return None if self.aggregate is None else float(self.aggregate)


def _check_pair(g: MixedGraph, h: MixedGraph) -> None:
    if g.n_nodes != h.n_nodes:
        raise GraphError(f"node counts differ ({g.n_nodes} vs {h.n_nodes})")


# -- structural Hamming distance -------------------------------------------


def shd(g: MixedGraph, h: MixedGraph, normalized: bool = False) -> DistanceReport:
    """Number of node pairs whose edge (presence or mark pattern) differs."""
    _check_pair(g, h)
    pairs = {(u, v) for u, v, _, _ in g.edges()} | {(u, v) for u, v, _, _ in h.edges()}
    num = sum(1 for u, v in pairs if g.marks(u, v) != h.marks(u, v))
    n = g.n_nodes
    if normalized:
        den = n * (n - 1) // 2
        return DistanceReport("shd", num / den if den else 0.0, num, den)
    return DistanceReport("shd", float(num), num, 1)


# -- separation distances ----------------------------------------------------


def verification_graph(g: MixedGraph) -> MixedGraph:
    """Graph on which separators are checked: a member DAG for CPDAGs."""
    if g.has_undirected:
        if g.has_bidirected:
            raise GraphError("graph mixes undirected and bidirected edges")
        g = mec.cpdag_to_dag(g)
    require_acyclic_mixed(g, "separator verification")
    return g


def _threads(threads: int | None) -> int:
    return kernels.default_threads() if threads is None else max(1, int(threads))


def _separable(g: MixedGraph, x: int, y: int) -> bool:
    return not g.adjacent(x, y) and _zl(g, x, y) is not None


def _one_sided(g, h, strategy, threads, collect, backend, strict) -> DistanceReport:
    kb = kernels.get(backend)
    gw = verification_graph(g)
    ctx = StrategyContext(h, strategy, strict=strict)
    n = g.n_nodes
    den = n * (n - 1)
    csr = gw.csr
    if ctx.strategy.is_union and not ctx.strategy.is_mb:
        bp, bi = ctx.packed_basis()
        hp, hi = ctx.packed_adjacency()
        num, fails = kb.union_failures(csr, bp, bi, hp, hi, threads=threads, collect=collect)
        failures = None
        if collect:
            failures = [((int(x), int(y)), ctx.separator(int(x), int(y))) for x, y in fails]
        return DistanceReport(ctx.strategy.value, num / den if den else 0.0, int(num), den, failures)

    ctx.prefetch(ctx.base_pairs())
    xs, ys, seps, skipped, none_fail = [], [], [], 0, []
    for x in range(n):
        for y in range(n):
            if x == y or h.adjacent(x, y):
                continue
            s = ctx.separator(x, y)
            if s is None:
                if _separable(gw, x, y):
                    none_fail.append((x, y))
                else:
                    skipped += 1
                continue
            xs.append(x)
            ys.append(y)
            seps.append(sorted(s))
    sp = np.zeros(len(seps) + 1, dtype=np.int32)
    sp[1:] = np.cumsum([len(s) for s in seps], dtype=np.int64)
    si = np.fromiter((v for s in seps for v in s), dtype=np.int32, count=int(sp[-1]))
    bad = kb.pair_failures(csr, np.asarray(xs, dtype=np.int32), np.asarray(ys, dtype=np.int32), sp, si, threads=threads)
    num = int(np.count_nonzero(bad)) + len(none_fail)
    failures = None
    if collect:
        failures = [((xs[i], ys[i]), frozenset(seps[i])) for i in np.flatnonzero(bad)]
        failures += [(p, None) for p in none_fail]
        failures.sort(key=lambda f: f[0])
    return DistanceReport(ctx.strategy.value, num / den if den else 0.0, num, den, failures, skipped)


def _combine(name: str, a: DistanceReport, b: DistanceReport) -> DistanceReport:
    num = a.numerator + b.numerator
    den = a.denominator + b.denominator
    failures = None
    if a.failures is not None and b.failures is not None:
        failures = a.failures + b.failures
    return DistanceReport(name, num / den if den else 0.0, num, den, failures, a.skipped + b.skipped)


def sep_distance(
    g: MixedGraph,
    h: MixedGraph,
    strategy,
    symmetric: bool = False,
    *,
    threads: int | None = None,
    collect: bool = False,
    backend: str | None = None,
    strict: bool = True,
) -> DistanceReport:
    """Fraction of ordered pairs whose separator from ``h`` fails in ``g``.

    The sum runs over ordered pairs non-adjacent in ``h`` and is divided by
    ``N(N-1)``. CPDAG references are checked on a member DAG. When ``h`` has
    no separator for a pair, the pair counts as a failure if it is separable
    in ``g`` and is otherwise skipped (tallied in ``report.skipped``).

    ``symmetric=True`` returns the average of both directions. ``backend``
    selects ``"python"`` or ``"cython"`` kernels explicitly.
    """
    _check_pair(g, h)
    strategy = SepStrategy(strategy)
    t = _threads(threads)
    a = _one_sided(g, h, strategy, t, collect, backend, strict)
    if not symmetric:
        return a
    b = _one_sided(h, g, strategy, t, collect, backend, strict)
    return _combine(strategy.value + "-sym", a, b)


def _fast_mb_one(g, h, base, threads, backend, strict) -> DistanceReport:
    kb = kernels.get(backend)
    gw = verification_graph(g)
    strategy = SepStrategy(base).with_mb()
    ctx = StrategyContext(h, strategy, strict=strict)
    n = g.n_nodes
    den = n * (n - 1)
    csr = gw.csr
    mp, mi = ctx.packed_blankets()
    hp, hi = ctx.packed_adjacency()
    if ctx.strategy.is_union:
        bp, bi = ctx.packed_basis()
        num = int(kb.mb_fast_failures(csr, mp, mi, hp, hi, bp, bi, threads=threads))
        return DistanceReport(strategy.value, num / den if den else 0.0, num, den)
    # ZL base: full traversals for the blanket part, pair checks for exceptions
    num = int(kb.mb_outside_counts(csr, mp, mi, threads=threads).sum())
    ctx.prefetch(ctx.base_pairs())
    skipped = 0
    for x in range(n):
        for y in sorted(ctx.blankets[x]):
            if h.adjacent(x, y):
                continue
            s = ctx.base_separator(x, y)
            if s is None:
                if _separable(gw, x, y):
                    num += 1
                else:
                    skipped += 1
            elif kb.connected(csr, x, y, sorted(s)):
                num += 1
    return DistanceReport(strategy.value, num / den if den else 0.0, num, den, None, skipped)


def sep_distance_fast_mb(
    g: MixedGraph,
    h: MixedGraph,
    base,
    symmetric: bool = False,
    *,
    threads: int | None = None,
    backend: str | None = None,
    strict: bool = True,
) -> DistanceReport:
    """Same value as :func:`sep_distance` with the MB-enhanced ``base`` strategy.

    For each source ``x`` a single traversal of ``g`` given the blanket of
    ``x`` in ``h`` scores every ``y`` outside the blanket. Only blanket
    members not adjacent to ``x`` need a separate check with the base
    separator.
    """
    _check_pair(g, h)
    t = _threads(threads)
    a = _fast_mb_one(g, h, base, t, backend, strict)
    if not symmetric:
        return a
    b = _fast_mb_one(h, g, base, t, backend, strict)
    return _combine(a.metric + "-sym", a, b)


# -- separation statements -------------------------------------------------


def n_triples(n: int, k: int) -> int:
    """Number of canonical statements ``(x < y, S)`` with ``|S| = k``."""
    if k < 0 or k > n - 2:
        return 0
    return math.comb(n, 2) * math.comb(n - 2, k)


def _unrank_pair(n: int, r: int) -> tuple[int, int]:
    x = 0
    while r >= n - 1 - x:
        r -= n - 1 - x
        x += 1
    return x, x + 1 + r


def _unrank_comb(items: Sequence[int], k: int, r: int) -> tuple[int, ...]:
    out = []
    start = 0
    m = len(items)
    for slot in range(k):
        for i in range(start, m):
            c = math.comb(m - i - 1, k - slot - 1)
            if r < c:
                out.append(items[i])
                start = i + 1
                break
            r -= c
    return tuple(out)


def unrank_triple(n: int, k: int, r: int) -> tuple[int, int, tuple[int, ...]]:
    """The ``r``-th canonical statement of order ``k`` in lexicographic order.

    Statements are ordered by pair ``(x, y)`` first and then by the sorted
    conditioning set.
    """
    per_pair = math.comb(n - 2, k)
    pr, cr = divmod(r, per_pair)
    x, y = _unrank_pair(n, pr)
    rest = [v for v in range(n) if v != x and v != y]
    return x, y, _unrank_comb(rest, k, cr)


def _sample_ranks(rng: np.random.Generator, total: int, m: int) -> list[int]:
    if m >= total:
        return list(range(total))
    if total < 2**62:
        return sorted(int(v) for v in rng.choice(total, size=m, replace=False))
    # huge spaces: rejection sampling on raw bits, duplicates redrawn
    bits = total.bit_length()
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    picked: set[int] = set()
    while len(picked) < m:
        v = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if v < total:
            picked.add(v)
    return sorted(picked)


def _tables(g, h, max_order, sampler, seed, threads, backend):
    """Per order: (tested, g-connected, g-conn & h-sep, g-sep & h-conn)."""
    kb = kernels.get(backend)
    _check_pair(g, h)
    n = g.n_nodes
    if n < 2:
        raise GraphError("need at least two nodes")
    if not 0 <= max_order <= n - 2:
        raise GraphError(f"max order must lie in [0, {n - 2}], got {max_order}")
    cg = verification_graph(g).csr
    ch = verification_graph(h).csr
    out = []
    if sampler == "full":
        for k in range(max_order + 1):
            tested = gc = gc_hs = gs_hc = 0
            for x in range(n - 1):
                others = [v for v in range(n) if v != x]
                for s in combinations(others, k):
                    rg = kb.reachable(cg, x, s)
                    rh = kb.reachable(ch, x, s)
                    mask = np.ones(n, dtype=bool)
                    mask[: x + 1] = False
                    if s:
                        mask[list(s)] = False
                    a = rg[mask]
                    b = rh[mask]
                    tested += int(mask.sum())
                    gc += int(a.sum())
                    gc_hs += int(np.count_nonzero(a & ~b))
                    gs_hc += int(np.count_nonzero(~a & b))
            out.append((tested, gc, gc_hs, gs_hc))
        return out
    # sampled: ``sampler`` is the per-order budget L
    budget = int(sampler)
    if budget < 1:
        raise GraphError("sample budget must be positive")
    for k in range(max_order + 1):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), k])))
        total = n_triples(n, k)
        ranks = _sample_ranks(rng, total, min(budget, total))
        tested = gc = gc_hs = gs_hc = 0
        for r in ranks:
            x, y, s = unrank_triple(n, k, r)
            a = bool(kb.connected(cg, x, y, s))
            b = bool(kb.connected(ch, x, y, s))
            tested += 1
            gc += a
            gc_hs += a and not b
            gs_hc += b and not a
        out.append((tested, gc, gc_hs, gs_hc))
    return out


def _aggregate(rates: list[Fraction | None], weights) -> Fraction | None:
    pairs = [(r, w) for r, w in zip(rates, weights) if r is not None]
    wsum = sum((w for _, w in pairs), Fraction(0))
    if not pairs or wsum == 0:
        return None
    return sum((r * w for r, w in pairs), Fraction(0)) / wsum


def _weights(weights, max_order) -> list[Fraction]:
    if weights is None:
        return [Fraction(1)] * (max_order + 1)
    if len(weights) != max_order + 1:
        raise GraphError(f"expected {max_order + 1} weights, got {len(weights)}")
    out = [Fraction(w) for w in weights]
    if any(w < 0 for w in out) or sum(out) == 0:
        raise GraphError("weights must be non-negative and not all zero")
    return out


def sc_metric(
    g: MixedGraph,
    h: MixedGraph,
    max_order: int,
    weights: Sequence[float] | None = None,
    sampler: str | int = "full",
    seed: int = 0,
    *,
    threads: int | None = None,
    backend: str | None = None,
) -> OrderProfile:
    """Disagreement rate of separation statements, per conditioning-set size.

    Parameters
    ----------
    max_order : int
        Largest conditioning-set size ``K``, between 0 and ``N - 2``.
    weights : sequence of float, optional
        One weight per order; the aggregate is the weighted mean.
    sampler : ``"full"`` or int
        ``"full"`` tests every canonical statement. An integer ``L`` draws
        ``min(L, |C^k|)`` statements per order without replacement, seeded by
        ``seed`` and the order.
    """
    w = _weights(weights, max_order)
    tabs = _tables(g, h, max_order, sampler, seed, threads, backend)
    per = []
    for k, (tested, _, a, b) in enumerate(tabs):
        rate = Fraction(a + b, tested) if tested else None
        per.append(OrderRate(k, rate, tested, a + b))
    agg = _aggregate([p.rate for p in per], w)
    return OrderProfile(
        "sc",
        per,
        agg,
        None if weights is None else [float(x) for x in weights],
        "full" if sampler == "full" else f"mc:{int(sampler)}",
    )


def order_rates(
    g_truth: MixedGraph,
    h: MixedGraph,
    max_order: int,
    direction: str = "markov",
    weights: Sequence[float] | None = None,
    sampler: str | int = "full",
    seed: int = 0,
    *,
    threads: int | None = None,
    backend: str | None = None,
) -> OrderProfile:
    """Per-order error rates of ``h`` relative to ``g_truth``.

    ``direction="markov"``: share of statements connected in the truth that
    ``h`` declares separated. ``direction="faithfulness"``: share of
    statements separated in the truth that ``h`` declares connected. Orders
    whose reference set is empty are undefined and left out of the mean.
    """
    if direction not in ("markov", "faithfulness"):
        raise GraphError(f"direction must be 'markov' or 'faithfulness', got {direction!r}")
    w = _weights(weights, max_order)
    tabs = _tables(g_truth, h, max_order, sampler, seed, threads, backend)
    per = []
    for k, (tested, gc, gc_hs, gs_hc) in enumerate(tabs):
        if direction == "markov":
            ref, bad = gc, gc_hs
        else:
            ref, bad = tested - gc, gs_hc
        per.append(OrderRate(k, Fraction(bad, ref) if ref else None, ref, bad))
    agg = _aggregate([p.rate for p in per], w)
    return OrderProfile(
        direction,
        per,
        agg,
        None if weights is None else [float(x) for x in weights],
        "full" if sampler == "full" else f"mc:{int(sampler)}",
    )
