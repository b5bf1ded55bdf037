"""Separation strategies: one separator per ordered non-adjacent pair.

A strategy is evaluated on one graph (usually the estimate) through a
:class:`StrategyContext`, which caches per-node data such as parent sets and
Markov blankets so that separators for many pairs are cheap.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import (
    GraphError,
    MixedGraph,
    ancestors_inclusive,
    relatives,
    require_acyclic_mixed,
    validate,
)
from . import kernels, mec

__all__ = [
    "SepStrategy",
    "SeparatorChoice",
    "StrategyContext",
    "select_separator",
    "zl_separator",
    "all_separators",
]


class SepStrategy(str, enum.Enum):
    PARENT = "parent"
    ANCESTOR = "ancestor"
    POSSIBLE_PARENT = "pparent"
    ZL = "zl"
    MB_PARENT = "mb-parent"
    MB_ANCESTOR = "mb-ancestor"
    MB_POSSIBLE_PARENT = "mb-pparent"
    MB_ZL = "mb-zl"

    @property
    def is_mb(self) -> bool:
        return self.value.startswith("mb-")

    @property
    def base(self) -> "SepStrategy":
        """The strategy an MB-enhanced variant falls back to (itself otherwise)."""
        return SepStrategy(self.value[3:]) if self.is_mb else self

    @property
    def is_union(self) -> bool:
        """Separator of (x, y) is ``basis(x) | basis(y)`` minus the endpoints."""
        return self.base in (SepStrategy.PARENT, SepStrategy.ANCESTOR, SepStrategy.POSSIBLE_PARENT)

    def with_mb(self) -> "SepStrategy":
        return self if self.is_mb else SepStrategy("mb-" + self.value)


@dataclass(frozen=True)
class SeparatorChoice:
    """Separator picked for an ordered pair; ``separator`` is None if none exists."""

    pair: tuple[int, int]
    separator: frozenset[int] | None


# -- minimal nearest separator ----------------------------------------------


def _zl_many(g: MixedGraph, pairs, backend: str | None = None) -> list[frozenset[int] | None]:
    if not pairs:
        return []
    xs = np.fromiter((p[0] for p in pairs), dtype=np.int32, count=len(pairs))
    ys = np.fromiter((p[1] for p in pairs), dtype=np.int32, count=len(pairs))
    found, ip, ix = kernels.get(backend).zl_separators(g.csr, xs, ys, kernels.default_threads())
    ip = ip.tolist()
    ix = ix.tolist()
    return [frozenset(ix[ip[i]:ip[i + 1]]) if found[i] else None for i in range(len(pairs))]


def _zl(g: MixedGraph, x: int, y: int) -> frozenset[int] | None:
    return _zl_many(g, [(x, y)])[0]


def zl_separator(g: MixedGraph, x, y) -> SeparatorChoice:
    """The unique separator of ``x`` and ``y`` that is both minimal and nearest to ``x``.

    Works inside the ancestors of ``{x, y}``: the moral neighbours of ``x``
    there separate the pair, and pruning them to those reachable from ``y``
    gives the minimal one. CPDAGs are handled through a member DAG, which is
    valid because the result is the same for every Markov-equivalent graph.

    Returns a choice with ``separator=None`` when no separator exists, which
    happens for non-adjacent pairs joined by an inducing path.
    """
    xi, yi = g.index(x), g.index(y)
    if xi == yi:
        raise GraphError("x and y must differ")
    if g.adjacent(xi, yi):
        raise GraphError(f"{g.label(xi)} and {g.label(yi)} are adjacent")
    work = mec.cpdag_to_dag(g) if g.has_undirected else g
    require_acyclic_mixed(work, "minimal nearest separator")
    return SeparatorChoice((xi, yi), _zl(work, xi, yi))


# -- strategy evaluation -------------------------------------------------------


def _is_dag(g: MixedGraph) -> bool:
    return not g.has_bidirected and not g.has_undirected and not g.has_circle


class StrategyContext:
    """Strategy bound to one graph, with per-node caches.

    Parameters
    ----------
    h : MixedGraph
        Graph whose separators are wanted.
    strategy : SepStrategy or str
    strict : bool
        Reject strategy/class combinations that are not guaranteed to yield
        valid separators (parent and ancestor sets outside DAGs, possible
        parents on graphs with bidirected edges). With ``strict=False`` the
        sets are computed anyway, which is useful to exhibit failures.
    """

    def __init__(self, h: MixedGraph, strategy, strict: bool = True):
        self.graph = h
        self.strategy = SepStrategy(strategy)
        base = self.strategy.base
        if h.has_circle:
            raise GraphError("separation strategies do not support circle marks")
        cpdag = h.has_undirected
        if cpdag and h.has_bidirected:
            raise GraphError("graph mixes undirected and bidirected edges")
        problems = validate(h, "PDAG" if cpdag else "Generic")
        if problems:
            raise GraphError("; ".join(problems))

        if base in (SepStrategy.PARENT, SepStrategy.ANCESTOR):
            if strict and not _is_dag(h):
                raise GraphError(f"{base.value} separation is only valid on DAGs")
            self.basis_graph = h
        elif base is SepStrategy.POSSIBLE_PARENT:
            if strict and h.has_bidirected:
                raise GraphError("possible-parent separation needs a DAG or CPDAG")
            self.basis_graph = h if cpdag or h.has_bidirected else mec.dag_to_cpdag(h)
        else:
            self.basis_graph = None
        # graph used for m-separation style queries (ZL, Markov blankets)
        self.member = mec.cpdag_to_dag(h) if cpdag else h

        self._basis: list[frozenset[int]] | None = None
        self._mb: list[frozenset[int]] | None = None
        self._mb_packed = None
        self._zl_cache: dict[tuple[int, int], frozenset[int] | None] = {}

    # per-node data
    @property
    def basis(self) -> list[frozenset[int]]:
        if self._basis is None:
            if self.basis_graph is None:
                raise GraphError(f"{self.strategy.value} has no per-node basis")
            kind = {
                SepStrategy.PARENT: "parents",
                SepStrategy.ANCESTOR: "ancestors",
                SepStrategy.POSSIBLE_PARENT: "possible_parents",
            }[self.strategy.base]
            g = self.basis_graph
            self._basis = [relatives(g, v, kind) for v in g.nodes()]
        return self._basis

    @property
    def blankets(self) -> list[frozenset[int]]:
        if self._mb is None:
            ip, ix = self.packed_blankets()
            self._mb = [frozenset(ix[ip[v]:ip[v + 1]].tolist()) for v in range(len(ip) - 1)]
        return self._mb

    def base_separator(self, x: int, y: int) -> frozenset[int] | None:
        if self.strategy.is_union:
            b = self.basis
            return (b[x] | b[y]) - {x, y}
        key = (x, y)
        if key not in self._zl_cache:
            self._zl_cache[key] = _zl(self.member, x, y)
        return self._zl_cache[key]

    def base_pairs(self) -> list[tuple[int, int]]:
        """Non-adjacent ordered pairs whose separator comes from the base strategy."""
        h = self.graph
        n = h.n_nodes
        pairs = [(x, y) for x in range(n) for y in range(n) if x != y and not h.adjacent(x, y)]
        if self.strategy.is_mb:
            mb = self.blankets
            pairs = [(x, y) for x, y in pairs if y in mb[x]]
        return pairs

    def prefetch(self, pairs) -> None:
        """Compute base separators for many pairs in one kernel call (ZL only)."""
        if self.strategy.is_union:
            return
        todo = [p for p in pairs if p not in self._zl_cache]
        self._zl_cache.update(zip(todo, _zl_many(self.member, todo)))

    def separator(self, x: int, y: int) -> frozenset[int] | None:
        if self.strategy.is_mb:
            mb = self.blankets[x]
            if y not in mb:
                return mb
        return self.base_separator(x, y)

    def choice(self, x, y) -> SeparatorChoice:
        h = self.graph
        xi, yi = h.index(x), h.index(y)
        if xi == yi:
            raise GraphError("x and y must differ")
        if h.adjacent(xi, yi):
            raise GraphError(f"{h.label(xi)} and {h.label(yi)} are adjacent")
        return SeparatorChoice((xi, yi), self.separator(xi, yi))

    # compressed forms for the kernels
    @staticmethod
    def _pack(sets) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(len(sets) + 1, dtype=np.int32)
        np.cumsum([len(s) for s in sets], out=indptr[1:])
        idx = np.fromiter((v for s in sets for v in sorted(s)), dtype=np.int32, count=int(indptr[-1]))
        return indptr, idx

    def packed_basis(self):
        return self._pack(self.basis)

    def packed_blankets(self):
        if self._mb_packed is None:
            self._mb_packed = kernels.backend.collider_neighbors(self.member.csr, kernels.default_threads())
        return self._mb_packed

    def packed_adjacency(self):
        h = self.graph
        return self._pack([h.neighbors(v) for v in h.nodes()])


def select_separator(g: MixedGraph, x, y, strategy, strict: bool = True) -> SeparatorChoice:
    """Separator for the ordered pair ``(x, y)`` under ``strategy``.

    Parent: parents of both nodes. Ancestor: ancestors of both, minus the
    pair. Possible parent: parents plus undirected neighbours, read off the
    CPDAG (DAG inputs are converted first). ZL: :func:`zl_separator`. The
    MB-enhanced variants return the Markov blanket of ``x`` when it does not
    contain ``y`` and fall back to the base strategy otherwise.
    """
    return StrategyContext(g, strategy, strict=strict).choice(x, y)


def all_separators(g: MixedGraph, strategy, h: MixedGraph | None = None, strict: bool = True) -> list[SeparatorChoice]:
    """One choice per ordered non-adjacent pair of ``h``, in ascending pair order.

    Separators are computed on ``h`` (on ``g`` when ``h`` is omitted); ``g``
    is the graph they will later be checked against and must have the same
    node count.
    """
    target = g if h is None else h
    if target.n_nodes != g.n_nodes:
        raise GraphError("graphs have different node counts")
    ctx = StrategyContext(target, strategy, strict=strict)
    n = target.n_nodes
    ctx.prefetch(ctx.base_pairs())
    return [
        SeparatorChoice((x, y), ctx.separator(x, y))
        for x in range(n)
        for y in range(n)
        if x != y and not target.adjacent(x, y)
    ]
