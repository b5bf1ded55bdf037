"""Seeded random graphs and perturbations.

All randomness comes from numpy's PCG64 generator. A graph is a pure
function of its :class:`GenSpec`; experiment runs derive per-run seeds as
``base_seed ^ run_index`` (see :func:`run_seed`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import ARROW, TAIL, GraphError, MixedGraph, find_directed_cycle, relatives
from .strategies import _zl

__all__ = [
    "GenSpec",
    "rng_for",
    "run_seed",
    "random_dag",
    "random_mixed",
    "random_mag",
    "PerturbResult",
    "perturb_delete_reverse",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class GenSpec:
    """Erdos-Renyi parameters.

    Attributes
    ----------
    n : int
        Number of nodes.
    p : float
        Probability that a node pair is joined.
    q : float or None
        For mixed graphs, probability that a drawn edge is directed rather
        than bidirected.
    seed : int
        Unsigned 64-bit seed.
    """

    n: int
    p: float
    q: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("node count must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"p must lie in [0, 1], got {self.p}")
        if self.q is not None and not 0.0 <= self.q <= 1.0:
            raise GraphError(f"q must lie in [0, 1], got {self.q}")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def run_seed(base: int, index: int) -> int:
    """Seed of the ``index``-th stream derived from ``base``."""
    return (int(base) ^ int(index)) & _MASK64


def _draw(spec: GenSpec) -> tuple[np.ndarray, list[tuple[int, int]], np.random.Generator]:
    rng = rng_for(spec.seed)
    n = spec.n
    order = rng.permutation(n)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < spec.p
    pairs = [(int(order[i]), int(order[j])) for i, j in zip(iu[keep], ju[keep])]
    return order, pairs, rng


def random_dag(spec: GenSpec) -> MixedGraph:
    """DAG whose pairs are joined independently with probability ``p``.

    Edges point along a uniformly random causal order, so the result is
    acyclic by construction.
    """
    _, pairs, _ = _draw(spec)
    return MixedGraph.from_edges(spec.n, directed=pairs)


def random_mixed(spec: GenSpec) -> MixedGraph:
    """Acyclic graph with directed and bidirected edges.

    Pairs are drawn as in :func:`random_dag`; each drawn edge is directed
    (along the causal order) with probability ``q`` and bidirected
    otherwise. No ancestrality or maximality repair is applied.
    """
    if spec.q is None:
        raise GraphError("random_mixed needs q")
    _, pairs, rng = _draw(spec)
    kinds = rng.random(len(pairs)) < spec.q
    directed = [e for e, d in zip(pairs, kinds) if d]
    bidirected = [e for e, d in zip(pairs, kinds) if not d]
    return MixedGraph.from_edges(spec.n, directed=directed, bidirected=bidirected)


def random_mag(spec: GenSpec) -> MixedGraph:
    """A MAG derived from :func:`random_mixed`.

    Bidirected edges between a node and its ancestor become directed until
    the graph is ancestral; then every non-adjacent pair that cannot be
    separated gets an edge, until the graph is maximal.
    """
    g = random_mixed(spec)
    changed = True
    while changed:
        changed = False
        for u, v, mu, mv in g.edges():
            if (mu, mv) != (ARROW, ARROW):
                continue
            if u in relatives(g, v, "ancestors"):
                a, b = u, v
            elif v in relatives(g, u, "ancestors"):
                a, b = v, u
            else:
                continue
            g = g.without_edges([(a, b)]).with_edges([(a, b, TAIL, ARROW)])
            changed = True
            break
    while True:
        add = None
        for x in range(g.n_nodes):
            for y in range(x + 1, g.n_nodes):
                if not g.adjacent(x, y) and _zl(g, x, y) is None:
                    add = (x, y)
                    break
            if add:
                break
        if add is None:
            return g
        x, y = add
        if x in relatives(g, y, "ancestors"):
            g = g.with_edges([(x, y, TAIL, ARROW)])
        elif y in relatives(g, x, "ancestors"):
            g = g.with_edges([(y, x, TAIL, ARROW)])
        else:
            g = g.with_edges([(x, y, ARROW, ARROW)])


@dataclass(frozen=True)
class PerturbResult:
    graph: MixedGraph
    deleted: tuple[int, int]
    reversed: tuple[int, int] | None

    @property
    def reversal_ok(self) -> bool:
        return self.reversed is not None


def _directed_edges(g: MixedGraph) -> list[tuple[int, int]]:
    out = []
    for u, v, mu, mv in g.edges():
        if (mu, mv) == (TAIL, ARROW):
            out.append((u, v))
        elif (mu, mv) == (ARROW, TAIL):
            out.append((v, u))
        else:
            raise GraphError("perturbation needs a DAG")
    return out


def perturb_delete_reverse(
    g: MixedGraph,
    seed: int,
    delete: tuple[int, int] | None = None,
    reverse: tuple[int, int] | None = None,
) -> PerturbResult:
    """Delete one edge at random and reverse another.

    Reversal targets are tried in a random order until one keeps the graph
    acyclic; if none does, only the deletion is applied and
    ``result.reversed`` is None. ``delete``/``reverse`` force the choices,
    given as directed edges ``(tail, head)``.
    """
    edges = _directed_edges(g)
    if len(edges) < 2:
        raise GraphError("perturbation needs at least two edges")
    rng = rng_for(seed)
    if delete is None:
        delete = edges[int(rng.integers(len(edges)))]
    elif tuple(delete) not in edges:
        raise GraphError(f"edge {delete} not in graph")
    delete = tuple(delete)
    g1 = g.without_edges([delete])
    rest = [e for e in edges if e != delete]
    if reverse is not None:
        if tuple(reverse) not in rest:
            raise GraphError(f"edge {reverse} not available for reversal")
        candidates = [tuple(reverse)]
    else:
        candidates = [rest[i] for i in rng.permutation(len(rest))]
    for a, b in candidates:
        g2 = g1.without_edges([(a, b)]).with_edges([(b, a, TAIL, ARROW)])
        if find_directed_cycle(g2) is None:
            return PerturbResult(g2, delete, (a, b))
    return PerturbResult(g1, delete, None)
