"""m-separation oracles, single-source reachability and Markov blankets.

Three independent routes to the same answer:

* :func:`m_separated` restricts to the ancestors of ``{x, y} | s``,
  moralizes along collider paths and checks undirected connectivity.
* :func:`reach_given` runs a ball-passing traversal from ``x`` and returns
  every node m-connected to it. It is backed by the compiled kernels.
* :func:`separated_brute_force` enumerates simple paths. It is exponential
  and intended only as a test oracle.

For DAGs m-separation coincides with d-separation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from . import kernels
from .graph import (
    ARROW,
    GraphError,
    MixedGraph,
    _as_nodes,
    ancestors_inclusive,
    collider_reach,
    require_acyclic_mixed,
)

__all__ = [
    "SepStatement",
    "m_separated",
    "reach_given",
    "separated_brute_force",
    "markov_blanket",
    "markov_blankets",
]


@dataclass(frozen=True, order=True)
class SepStatement:
    """A separation query ``(x, y, s)``; stored canonically with ``x < y``."""

    x: int
    y: int
    s: tuple[int, ...]

    def __post_init__(self):
        if self.x == self.y:
            raise GraphError("separation statement needs two distinct nodes")
        s = tuple(sorted(set(self.s)))
        if self.x in s or self.y in s:
            raise GraphError("conditioning set must exclude both endpoints")
        x, y = sorted((self.x, self.y))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "s", s)


def _query(g: MixedGraph, x, y, s) -> tuple[int, int, set[int]]:
    xi = g.index(x)
    yi = g.index(y)
    si = set(_as_nodes(g, s))
    if xi == yi:
        raise GraphError("x and y must differ")
    if xi in si or yi in si:
        raise GraphError("conditioning set must exclude x and y")
    return xi, yi, si


def m_separated(g: MixedGraph, x, y, s: Iterable = ()) -> bool:
    """True iff ``s`` m-separates ``x`` and ``y`` in ``g``.

    Parameters
    ----------
    g : MixedGraph
        A DAG or an acyclic graph with directed and bidirected edges.
    x, y : int or str
        Distinct nodes.
    s : iterable
        Conditioning nodes, disjoint from ``{x, y}``.
    """
    require_acyclic_mixed(g, "m-separation")
    xi, yi, si = _query(g, x, y, s)
    keep = ancestors_inclusive(g, si | {xi, yi})
    # BFS over moral edges inside the ancestral set, never entering s
    seen = {xi}
    queue = deque([xi])
    while queue:
        v = queue.popleft()
        for w in collider_reach(g, v, keep):
            if w == yi:
                return False
            if w in seen or w in si:
                continue
            seen.add(w)
            queue.append(w)
    return True


def reach_given(g: MixedGraph, x, s: Iterable = ()) -> frozenset[int]:
    """Nodes m-connected to ``x`` given ``s`` (``x`` and ``s`` excluded).

    One traversal, linear in nodes plus edges.
    """
    require_acyclic_mixed(g, "reachability")
    xi = g.index(x)
    si = set(_as_nodes(g, s))
    if xi in si:
        raise GraphError("conditioning set must exclude x")
    mask = kernels.backend.reachable(g.csr, xi, sorted(si))
    return frozenset(int(v) for v in mask.nonzero()[0])


def m_connected_fast(g: MixedGraph, x: int, y: int, s: Iterable[int]) -> bool:
    """Kernel-backed single pair check with early exit; no validation."""
    return bool(kernels.backend.connected(g.csr, int(x), int(y), sorted(s)))


def separated_brute_force(g: MixedGraph, x, y, s: Iterable = ()) -> bool:
    """Enumerate every simple path between ``x`` and ``y`` and test blocking.

    A path is open when each non-collider is outside ``s`` and each collider
    is in ``s`` or has a descendant in ``s``. Exponential; keep N small.
    """
    require_acyclic_mixed(g, "m-separation")
    xi, yi, si = _query(g, x, y, s)
    desc_hits = {}
    for v in g.nodes():
        stack, seen = [v], {v}
        hit = v in si
        while stack and not hit:
            u = stack.pop()
            for c in g.children(u):
                if c not in seen:
                    if c in si:
                        hit = True
                        break
                    seen.add(c)
                    stack.append(c)
        desc_hits[v] = hit

    def open_path(path):
        for i in range(1, len(path) - 1):
            a, v, b = path[i - 1], path[i], path[i + 1]
            collider = g.marks(a, v)[1] == ARROW and g.marks(b, v)[1] == ARROW
            if collider:
                if not desc_hits[v]:
                    return False
            elif v in si:
                return False
        return True

    path = [xi]
    on_path = {xi}

    def dfs(v) -> bool:
        for w in g.neighbors(v):
            if w in on_path:
                continue
            path.append(w)
            if w == yi:
                if open_path(path):
                    return True
            else:
                on_path.add(w)
                if dfs(w):
                    return True
                on_path.discard(w)
            path.pop()
        return False

    return not dfs(xi)


def markov_blanket(g: MixedGraph, x) -> frozenset[int]:
    """Markov blanket of ``x``.

    Every node adjacent to ``x`` plus every node joined to it by a collider
    path. On a DAG this is parents, children and the children's other parents.
    """
    require_acyclic_mixed(g, "Markov blanket")
    return frozenset(collider_reach(g, g.index(x)))


def markov_blankets(g: MixedGraph) -> list[frozenset[int]]:
    """Markov blankets of all nodes, indexed by node."""
    require_acyclic_mixed(g, "Markov blanket")
    return [frozenset(collider_reach(g, v)) for v in g.nodes()]
