"""Markov equivalence: CPDAGs, orientation rules, extensions, equivalence tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .graph import (
    ARROW,
    TAIL,
    GraphError,
    MixedGraph,
    find_directed_cycle,
    validate,
)

__all__ = [
    "NoExtensionError",
    "MeekResult",
    "unshielded_triples",
    "unshielded_colliders",
    "meek_closure",
    "dag_to_cpdag",
    "cpdag_to_dag",
    "mec_members",
    "discriminating_paths",
    "markov_equivalent",
]


class NoExtensionError(GraphError):
    """A partially directed graph has no consistent DAG extension."""


def unshielded_triples(g: MixedGraph) -> list[tuple[int, int, int]]:
    """All ``(a, b, c)`` with ``a - b - c`` adjacent, ``a, c`` not, and ``a < c``."""
    out = []
    for b in g.nodes():
        nb = g.neighbors(b)
        for i, a in enumerate(nb):
            for c in nb[i + 1:]:
                if not g.adjacent(a, c):
                    out.append((a, b, c))
    out.sort()
    return out


def unshielded_colliders(g: MixedGraph) -> set[tuple[int, int, int]]:
    """Unshielded triples with arrowheads at the middle node on both edges."""
    return {
        (a, b, c)
        for a, b, c in unshielded_triples(g)
        if g.marks(a, b)[1] == ARROW and g.marks(c, b)[1] == ARROW
    }


# -- orientation rules -----------------------------------------------------


class _PDAG:
    """Mutable working copy: directed edges as child sets, undirected as neighbour sets."""

    def __init__(self, g: MixedGraph):
        n = g.n_nodes
        self.n = n
        self.ch = [set() for _ in range(n)]
        self.pa = [set() for _ in range(n)]
        self.und = [set() for _ in range(n)]
        for u, v, mu, mv in g.edges():
            if (mu, mv) == (TAIL, ARROW):
                self.orient(u, v, fresh=True)
            elif (mu, mv) == (ARROW, TAIL):
                self.orient(v, u, fresh=True)
            elif (mu, mv) == (TAIL, TAIL):
                self.und[u].add(v)
                self.und[v].add(u)
            else:
                raise GraphError("orientation rules apply to directed and undirected edges only")

    def adj(self, a: int, b: int) -> bool:
        return b in self.ch[a] or b in self.pa[a] or b in self.und[a]

    def orient(self, a: int, b: int, fresh: bool = False) -> None:
        if not fresh:
            self.und[a].discard(b)
            self.und[b].discard(a)
        self.ch[a].add(b)
        self.pa[b].add(a)

    def to_graph(self, labels) -> MixedGraph:
        directed = [(a, b) for a in range(self.n) for b in self.ch[a]]
        undirected = [(a, b) for a in range(self.n) for b in self.und[a] if a < b]
        return MixedGraph.from_edges(self.n, directed=directed, undirected=undirected, labels=labels)


def _proposals(p: _PDAG) -> set[tuple[int, int]]:
    """Every orientation some rule demands in the current state."""
    out: set[tuple[int, int]] = set()
    for a in range(p.n):
        for b in p.und[a]:
            # a -> b is forced if ...
            # R1: some c -> a with c, b non-adjacent
            if any(not p.adj(c, b) for c in p.pa[a] if c != b):
                out.add((a, b))
                continue
            # R2: a -> c -> b
            if p.ch[a] & p.pa[b]:
                out.add((a, b))
                continue
            # R3: a - c -> b and a - d -> b with c, d non-adjacent
            cands = sorted(p.und[a] & p.pa[b])
            if any(
                not p.adj(c, d) for i, c in enumerate(cands) for d in cands[i + 1:]
            ):
                out.add((a, b))
                continue
            # R4: d -> c -> b, a adjacent to c and d, b and d non-adjacent
            hit = False
            for c in p.pa[b]:
                if c == a or not p.adj(a, c):
                    continue
                for d in p.pa[c]:
                    if d != a and d != b and p.adj(a, d) and not p.adj(b, d):
                        hit = True
                        break
                if hit:
                    break
            if hit:
                out.add((a, b))
    return out


@dataclass
class MeekResult:
    """Fixpoint of the orientation rules plus any conflicts met on the way."""

    graph: MixedGraph
    conflicts: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conflicts


def meek_closure(g: MixedGraph) -> MeekResult:
    """Apply the four orientation rules until nothing changes.

    Rules fire in synchronous rounds, so the fixpoint does not depend on the
    order rules are tried. An edge demanded in both directions within a round
    is left undirected and reported. Orientations that create an unshielded
    collider absent from the input, or a directed cycle, are also reported.
    """
    p = _PDAG(g)
    before = unshielded_colliders(g)
    conflicts: list[str] = []
    blocked: set[tuple[int, int]] = set()
    while True:
        props = _proposals(p) - blocked
        if not props:
            break
        for a, b in sorted(props):
            if (b, a) in props:
                if a < b:
                    conflicts.append(
                        f"edge {g.label(a)}-{g.label(b)} is forced in both directions"
                    )
                blocked.add((a, b))
                blocked.add((b, a))
        todo = [(a, b) for a, b in sorted(props) if (a, b) not in blocked]
        if not todo:
            break
        for a, b in todo:
            p.orient(a, b)
    out = p.to_graph(g.labels)
    for a, b, c in sorted(unshielded_colliders(out) - before):
        conflicts.append(
            f"new unshielded collider {out.label(a)}->{out.label(b)}<-{out.label(c)}"
        )
    cyc = find_directed_cycle(out)
    if cyc is not None:
        conflicts.append("directed cycle " + " -> ".join(out.label(v) for v in cyc + cyc[:1]))
    return MeekResult(out, conflicts)


def _skeleton_with_colliders(g: MixedGraph, colliders) -> MixedGraph:
    heads = {}
    for a, b, c in colliders:
        heads[(a, b)] = True
        heads[(c, b)] = True
    directed, undirected = [], []
    for u, v, _, _ in g.edges():
        if (u, v) in heads and (v, u) in heads:
            raise GraphError(f"colliders orient {g.label(u)}-{g.label(v)} both ways")
        if (u, v) in heads:
            directed.append((u, v))
        elif (v, u) in heads:
            directed.append((v, u))
        else:
            undirected.append((u, v))
    return MixedGraph.from_edges(g.n_nodes, directed=directed, undirected=undirected, labels=g.labels)


def dag_to_cpdag(g: MixedGraph) -> MixedGraph:
    """CPDAG of a DAG: v-structures oriented, then closed under the rules."""
    problems = validate(g, "DAG")
    if problems:
        raise GraphError("not a DAG: " + "; ".join(problems))
    res = meek_closure(_skeleton_with_colliders(g, unshielded_colliders(g)))
    return res.graph


def cpdag_to_dag(g: MixedGraph) -> MixedGraph:
    """A deterministic member DAG of a CPDAG (or any extendable PDAG).

    Repeatedly removes a sink whose undirected neighbours are adjacent to all
    of its other neighbours, orienting those edges into it. The highest-index
    qualifying node is removed first, so low indices tend to come first in
    the resulting topological order.

    Raises
    ------
    NoExtensionError
        If at some step no node qualifies.
    """
    if g.has_circle or g.has_bidirected:
        raise GraphError("extension needs directed and undirected edges only")
    n = g.n_nodes
    ch = [set(g.children(v)) for v in range(n)]
    pa = [set(g.parents(v)) for v in range(n)]
    und = [set(g.undirected_neighbors(v)) for v in range(n)]
    alive = set(range(n))
    directed = [(u, v) for u, v, mu, mv in g.edges() if (mu, mv) == (TAIL, ARROW)]
    directed += [(v, u) for u, v, mu, mv in g.edges() if (mu, mv) == (ARROW, TAIL)]
    while alive:
        pick = None
        for v in sorted(alive, reverse=True):
            if ch[v]:
                continue
            nbrs = pa[v] | und[v]
            if all(all(w == u or w in pa[u] or w in ch[u] or w in und[u] for w in nbrs) for u in und[v]):
                pick = v
                break
        if pick is None:
            left = ", ".join(g.label(v) for v in sorted(alive))
            raise NoExtensionError(f"no consistent extension (stuck on nodes {left})")
        v = pick
        for u in und[v]:
            directed.append((u, v))
            und[u].discard(v)
        for u in pa[v]:
            ch[u].discard(v)
        alive.discard(v)
        und[v] = set()
        pa[v] = set()
    return MixedGraph.from_edges(n, directed=directed, labels=g.labels)


def mec_members(g: MixedGraph, limit: int | None = None) -> Iterator[MixedGraph]:
    """Enumerate every DAG in the class a CPDAG (or DAG) represents.

    Backtracks over undirected edges with rule closure for pruning. Meant for
    small graphs; ``limit`` stops after that many members.
    """
    if not g.has_undirected:
        cp = dag_to_cpdag(g) if not g.has_bidirected else None
        if cp is None:
            raise GraphError("class enumeration needs a DAG or CPDAG")
        g = cp
    target = unshielded_colliders(g)
    count = 0

    def rec(h: MixedGraph):
        nonlocal count
        if limit is not None and count >= limit:
            return
        und = [(u, v) for u, v, mu, mv in h.edges() if (mu, mv) == (TAIL, TAIL)]
        if not und:
            if unshielded_colliders(h) == target and find_directed_cycle(h) is None:
                count += 1
                yield h
            return
        u, v = und[0]
        for a, b in ((u, v), (v, u)):
            trial = h.without_edges([(a, b)]).with_edges([(a, b, TAIL, ARROW)])
            if not unshielded_colliders(trial) <= target:
                continue
            res = meek_closure(trial)
            if find_directed_cycle(res.graph) is not None:
                continue
            if not unshielded_colliders(res.graph) <= target:
                continue
            yield from rec(res.graph)

    yield from rec(g)


# -- equivalence -------------------------------------------------------------


def discriminating_paths(g: MixedGraph) -> list[tuple[int, ...]]:
    """Paths ``(x, q1, ..., qk, v, y)`` discriminating for ``v``.

    ``x`` and ``y`` are non-adjacent, ``k >= 1``, every ``qi`` is a collider
    on the path and a parent of ``y``, and ``v`` is adjacent to ``y``.
    """
    out = []
    for y in g.nodes():
        pay = set(g.parents(y))
        for v in g.neighbors(y):
            # walk backwards from v through collider parents of y
            for q in g.neighbors(v):
                if q == y or q not in pay or g.marks(v, q)[1] != ARROW:
                    continue
                stack = [(q, (v, q))]
                while stack:
                    head, path = stack.pop()
                    for p in g.neighbors(head):
                        if p in path or p == y:
                            continue
                        if g.marks(p, head)[1] != ARROW:
                            continue
                        if not g.adjacent(p, y):
                            out.append((p,) + tuple(reversed(path)) + (y,))
                        elif p in pay and g.marks(head, p)[1] == ARROW:
                            stack.append((p, path + (p,)))
    out.sort()
    return out


def _is_discriminating(g: MixedGraph, path: tuple[int, ...]) -> bool:
    x, *qs, v, y = path
    if g.adjacent(x, y) or not g.adjacent(v, y):
        return False
    seq = (x, *qs, v)
    for a, b in zip(seq, seq[1:]):
        if not g.adjacent(a, b):
            return False
    for i, q in enumerate(qs, start=1):
        if q not in g.parents(y):
            return False
        if g.marks(seq[i - 1], q)[1] != ARROW or g.marks(seq[i + 1], q)[1] != ARROW:
            return False
    return True


def _collider_at(g: MixedGraph, a: int, v: int, b: int) -> bool:
    return g.marks(a, v)[1] == ARROW and g.marks(b, v)[1] == ARROW


def markov_equivalent(g: MixedGraph, h: MixedGraph) -> bool:
    """Whether two DAGs, or two MAGs, are Markov equivalent."""
    if g.n_nodes != h.n_nodes:
        raise GraphError("graphs have different node counts")
    for x in (g, h):
        if x.has_circle or x.has_undirected:
            raise GraphError("equivalence test needs DAGs or MAGs")
    if {(u, v) for u, v, _, _ in g.edges()} != {(u, v) for u, v, _, _ in h.edges()}:
        return False
    if unshielded_colliders(g) != unshielded_colliders(h):
        return False
    if not (g.has_bidirected or h.has_bidirected):
        return True
    for path in discriminating_paths(g):
        if not _is_discriminating(h, path):
            continue
        a, v, b = path[-3], path[-2], path[-1]
        if _collider_at(g, a, v, b) != _collider_at(h, a, v, b):
            return False
    return True
