"""Mixed-graph representation and structural queries.

A single :class:`MixedGraph` type covers DAGs, CPDAGs, PDAGs and MAGs. Every
edge stores one mark per endpoint, so ``A -> B`` is ``(TAIL, ARROW)``,
``A <-> B`` is ``(ARROW, ARROW)`` and ``A -- B`` is ``(TAIL, TAIL)``.
Nodes are dense integers ``0..n-1``; labels are optional and only used for
I/O and display.
"""

from __future__ import annotations

import enum
from collections import deque
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs or queries that do not fit the graph class."""


class Mark(enum.IntEnum):
    TAIL = 0
    ARROW = 1
    CIRCLE = 2


class GraphClass(str, enum.Enum):
    DAG = "DAG"
    CPDAG = "CPDAG"
    MAG = "MAG"
    PDAG = "PDAG"
    GENERIC = "Generic"


TAIL, ARROW, CIRCLE = Mark.TAIL, Mark.ARROW, Mark.CIRCLE

RELATIVE_KINDS = (
    "parents",
    "children",
    "ancestors",
    "descendants",
    "siblings",
    "spouses",
    "possible_parents",
    "possible_ancestors",
)


class MixedGraph:
    """Immutable graph with per-endpoint edge marks.

    Parameters
    ----------
    n_nodes : int
        Number of nodes; nodes are ``0..n_nodes-1``.
    edges : iterable of (u, v, mark_u, mark_v)
        Each edge given once, with the mark at ``u`` and the mark at ``v``.
    labels : sequence of str, optional
        Display names, one per node.

    Use :meth:`from_edges` for the common directed/bidirected/undirected
    construction, and :meth:`with_edges` / :meth:`without_edges` to derive
    modified copies.
    """

    def __init__(
        self,
        n_nodes: int,
        edges: Iterable[tuple[int, int, int, int]] = (),
        labels: Sequence[str] | None = None,
    ):
        if n_nodes < 0:
            raise GraphError("n_nodes must be non-negative")
        self._n = int(n_nodes)
        if labels is not None:
            labels = tuple(str(lab) for lab in labels)
            if len(labels) != self._n:
                raise GraphError(f"expected {self._n} labels, got {len(labels)}")
            if len(set(labels)) != self._n:
                raise GraphError("node labels must be unique")
        self._labels = labels
        # _adj[u][v] = (mark at u, mark at v)
        adj: list[dict[int, tuple[Mark, Mark]]] = [dict() for _ in range(self._n)]
        for u, v, mu, mv in edges:
            u, v = int(u), int(v)
            self._check_node(u)
            self._check_node(v)
            if u == v:
                raise GraphError(f"self-loop at node {self.label(u)}")
            if v in adj[u]:
                raise GraphError(
                    f"duplicate edge between {self.label(u)} and {self.label(v)}"
                )
            mu, mv = Mark(mu), Mark(mv)
            adj[u][v] = (mu, mv)
            adj[v][u] = (mv, mu)
        self._adj = adj

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        directed: Iterable[tuple[int, int]] = (),
        bidirected: Iterable[tuple[int, int]] = (),
        undirected: Iterable[tuple[int, int]] = (),
        labels: Sequence[str] | None = None,
    ) -> "MixedGraph":
        edges = [(a, b, TAIL, ARROW) for a, b in directed]
        edges += [(a, b, ARROW, ARROW) for a, b in bidirected]
        edges += [(a, b, TAIL, TAIL) for a, b in undirected]
        return cls(n_nodes, edges, labels)

    @classmethod
    def from_labeled(
        cls,
        labels: Sequence[str],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ) -> "MixedGraph":
        idx = {lab: i for i, lab in enumerate(labels)}

        def conv(pairs):
            return [(idx[a], idx[b]) for a, b in pairs]

        return cls.from_edges(
            len(labels), conv(directed), conv(bidirected), conv(undirected), labels
        )

    def with_edges(self, edges: Iterable[tuple[int, int, int, int]]) -> "MixedGraph":
        """Copy with edges added or replaced (marks given as in the constructor)."""
        current = {(u, v): (mu, mv) for u, v, mu, mv in self.edges()}
        for u, v, mu, mv in edges:
            if u > v:
                u, v, mu, mv = v, u, mv, mu
            current[(u, v)] = (mu, mv)
        return MixedGraph(
            self._n, [(u, v, m[0], m[1]) for (u, v), m in current.items()], self._labels
        )

    def without_edges(self, pairs: Iterable[tuple[int, int]]) -> "MixedGraph":
        drop = {(min(a, b), max(a, b)) for a, b in pairs}
        return MixedGraph(
            self._n,
            [e for e in self.edges() if (e[0], e[1]) not in drop],
            self._labels,
        )

    def relabeled(self, labels: Sequence[str] | None) -> "MixedGraph":
        return MixedGraph(self._n, self.edges(), labels)

    # -- basic accessors --------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return self._n

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def label(self, v: int) -> str:
        if self._labels is None:
            return str(v)
        return self._labels[v]

    def index(self, label: str | int) -> int:
        if isinstance(label, (int, np.integer)):
            self._check_node(int(label))
            return int(label)
        if self._labels is not None and label in self._labels:
            return self._labels.index(label)
        raise GraphError(f"unknown node {label!r}")

    def nodes(self) -> range:
        return range(self._n)

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self._n:
            raise GraphError(f"unknown node {v!r} (graph has {self._n} nodes)")

    def marks(self, u: int, v: int) -> tuple[Mark, Mark] | None:
        """``(mark at u, mark at v)`` for the edge u-v, or None if non-adjacent."""
        return self._adj[u].get(v)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def neighbors(self, v: int) -> list[int]:
        return sorted(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def incident(self, v: int) -> dict[int, tuple[Mark, Mark]]:
        """Mapping neighbor -> (mark at v, mark at neighbor). Do not mutate."""
        return self._adj[v]

    def edges(self) -> list[tuple[int, int, Mark, Mark]]:
        """All edges as ``(u, v, mark_u, mark_v)`` with ``u < v``, sorted."""
        out = []
        for u in range(self._n):
            for v, (mu, mv) in self._adj[u].items():
                if u < v:
                    out.append((u, v, mu, mv))
        out.sort()
        return out

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def parents(self, v: int) -> list[int]:
        return sorted(w for w, (mv, mw) in self._adj[v].items() if mv == ARROW and mw == TAIL)

    def children(self, v: int) -> list[int]:
        return sorted(w for w, (mv, mw) in self._adj[v].items() if mv == TAIL and mw == ARROW)

    def siblings(self, v: int) -> list[int]:
        return sorted(w for w, (mv, mw) in self._adj[v].items() if mv == ARROW and mw == ARROW)

    def undirected_neighbors(self, v: int) -> list[int]:
        return sorted(w for w, (mv, mw) in self._adj[v].items() if mv == TAIL and mw == TAIL)

    def has_marks(self, *kinds: tuple[Mark, Mark]) -> bool:
        """True if some edge has one of the given (unordered) mark patterns."""
        wanted = set()
        for a, b in kinds:
            wanted.add((a, b))
            wanted.add((b, a))
        return any(m in wanted for a in self._adj for m in a.values())

    @property
    def has_circle(self) -> bool:
        return any(CIRCLE in m for a in self._adj for m in a.values())

    @property
    def has_undirected(self) -> bool:
        return self.has_marks((TAIL, TAIL))

    @property
    def has_bidirected(self) -> bool:
        return self.has_marks((ARROW, ARROW))

    # -- equality -----------------------------------------------------------

    def _key(self):
        return (self._n, tuple(self.edges()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        sym = {
            (TAIL, ARROW): "->",
            (ARROW, TAIL): "<-",
            (ARROW, ARROW): "<->",
            (TAIL, TAIL): "--",
        }
        parts = []
        for u, v, mu, mv in self.edges():
            s = sym.get((mu, mv), f"{mu.name.lower()}-{mv.name.lower()}")
            parts.append(f"{self.label(u)}{s}{self.label(v)}")
        return f"MixedGraph(n={self._n}, [{', '.join(parts)}])"

    # -- kernel view --------------------------------------------------------

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Compressed adjacency ``(indptr, nbr, mark_self, mark_nbr)`` for kernels."""
        indptr = np.zeros(self._n + 1, dtype=np.int32)
        for v in range(self._n):
            indptr[v + 1] = indptr[v] + len(self._adj[v])
        m2 = int(indptr[-1])
        nbr = np.empty(m2, dtype=np.int32)
        mself = np.empty(m2, dtype=np.int8)
        mnbr = np.empty(m2, dtype=np.int8)
        k = 0
        for v in range(self._n):
            for w in sorted(self._adj[v]):
                mv, mw = self._adj[v][w]
                nbr[k] = w
                mself[k] = mv
                mnbr[k] = mw
                k += 1
        return indptr, nbr, mself, mnbr


# -- relatives --------------------------------------------------------------


def _as_nodes(g: MixedGraph, x) -> list[int]:
    if isinstance(x, (int, np.integer, str)):
        return [g.index(x)]
    return [g.index(v) for v in x]


def _closure(g: MixedGraph, start: Iterable[int], step) -> set[int]:
    seen: set[int] = set()
    queue = deque()
    for s in start:
        for w in step(s):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    while queue:
        v = queue.popleft()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def relatives(g: MixedGraph, x, kind: str) -> frozenset[int]:
    """Relatives of a node (or the union over a collection of nodes).

    ``ancestors``/``descendants`` follow directed paths of length >= 1, so a
    node is never its own ancestor. ``possible_parents`` adds undirected
    neighbours to parents; ``possible_ancestors`` follows edges that are
    tail-marked at the predecessor (``->`` or ``--``). Both "possible" kinds
    are rejected on graphs containing circle marks.
    """
    if kind not in RELATIVE_KINDS:
        raise GraphError(f"invalid relative kind {kind!r}")
    xs = _as_nodes(g, x)
    if kind.startswith("possible") and g.has_circle:
        raise GraphError(f"{kind} is not supported on graphs with circle marks")
    if kind in ("parents", "children", "siblings"):
        fn = getattr(g, kind)
        return frozenset(w for v in xs for w in fn(v))
    if kind == "spouses":
        out = set()
        for v in xs:
            for c in g.children(v):
                out.update(g.parents(c))
        out.difference_update(xs)
        return frozenset(out)
    if kind == "possible_parents":
        return frozenset(w for v in xs for w in g.parents(v) + g.undirected_neighbors(v))
    if kind == "ancestors":
        return frozenset(_closure(g, xs, g.parents))
    if kind == "descendants":
        return frozenset(_closure(g, xs, g.children))
    # possible_ancestors; walking back over an undirected edge must not make a
    # node its own possible ancestor
    out = _closure(g, xs, lambda v: g.parents(v) + g.undirected_neighbors(v))
    return frozenset(out - set(xs))


def ancestors_inclusive(g: MixedGraph, nodes: Iterable[int]) -> set[int]:
    nodes = set(nodes)
    return nodes | _closure(g, nodes, g.parents)


# -- moralization -----------------------------------------------------------


def collider_reach(g: MixedGraph, a: int, within: set[int] | None = None) -> set[int]:
    """Nodes joined to ``a`` by an edge or by a path whose middle nodes are all colliders.

    Restricted to ``within`` when given (``a`` must belong to it).
    """
    out: set[int] = set()
    # nodes entered with an arrowhead, from which the collider path may continue
    frontier: deque[int] = deque()
    entered: set[int] = set()
    for b, (_, mb) in g.incident(a).items():
        if within is not None and b not in within:
            continue
        out.add(b)
        if mb == ARROW and b not in entered:
            entered.add(b)
            frontier.append(b)
    while frontier:
        b = frontier.popleft()
        for c, (mb, mc) in g.incident(b).items():
            if mb != ARROW or c == a:
                continue
            if within is not None and c not in within:
                continue
            out.add(c)
            if mc == ARROW and c not in entered:
                entered.add(c)
                frontier.append(c)
    out.discard(a)
    return out


def moralize(g: MixedGraph) -> MixedGraph:
    """Undirected graph joining every pair connected by a collider path.

    For DAGs this is the usual moral graph (adjacency or common child).
    """
    if g.has_circle:
        raise GraphError("cannot moralize a graph with circle marks")
    if g.has_undirected:
        raise GraphError("moralization requires a DAG or MAG (no undirected edges)")
    pairs = set()
    for a in g.nodes():
        for b in collider_reach(g, a):
            pairs.add((min(a, b), max(a, b)))
    return MixedGraph.from_edges(g.n_nodes, undirected=sorted(pairs), labels=g.labels)


def induced_subgraph(g: MixedGraph, t: Iterable) -> MixedGraph:
    """Subgraph over ``t``, re-indexed densely in ascending original order.

    The result's labels carry the original labels (or original indices when
    the input is unlabeled); ``result.origin`` maps new index to old index.
    """
    keep = sorted(set(_as_nodes(g, t)))
    new = {old: i for i, old in enumerate(keep)}
    edges = [
        (new[u], new[v], mu, mv)
        for u, v, mu, mv in g.edges()
        if u in new and v in new
    ]
    sub = MixedGraph(len(keep), edges, [g.label(v) for v in keep])
    sub.origin = tuple(keep)
    return sub


# -- validation ---------------------------------------------------------------


def topological_order(g: MixedGraph) -> list[int] | None:
    """Order of the directed part (ties by index), or None if it has a cycle."""
    import heapq

    indeg = [len(g.parents(v)) for v in g.nodes()]
    heap = [v for v in g.nodes() if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in g.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order if len(order) == g.n_nodes else None


def find_directed_cycle(g: MixedGraph) -> list[int] | None:
    color = [0] * g.n_nodes
    parent = [-1] * g.n_nodes
    for root in g.nodes():
        if color[root]:
            continue
        stack = [(root, iter(g.children(root)))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
                continue
            if color[nxt] == 1:
                cyc = [nxt]
                w = v
                while w != nxt:
                    cyc.append(w)
                    w = parent[w]
                return list(reversed(cyc))
            if color[nxt] == 0:
                color[nxt] = 1
                parent[nxt] = v
                stack.append((nxt, iter(g.children(nxt))))
    return None


def _fmt_cycle(g: MixedGraph, cyc: list[int]) -> str:
    return " -> ".join(g.label(v) for v in cyc + cyc[:1])


def validate(g: MixedGraph, cls: GraphClass | str) -> list[str]:
    """List class violations; empty iff ``g`` satisfies the class invariants.

    MAG maximality is deliberately not checked.
    """
    cls = GraphClass(cls)
    allowed = {
        GraphClass.DAG: {(TAIL, ARROW)},
        GraphClass.MAG: {(TAIL, ARROW), (ARROW, ARROW)},
        GraphClass.CPDAG: {(TAIL, ARROW), (TAIL, TAIL)},
        GraphClass.PDAG: {(TAIL, ARROW), (TAIL, TAIL)},
    }.get(cls)
    problems: list[str] = []
    if allowed is not None:
        sym = allowed | {(b, a) for a, b in allowed}
        for u, v, mu, mv in g.edges():
            if (mu, mv) not in sym:
                problems.append(
                    f"edge {g.label(u)}-{g.label(v)} has marks "
                    f"({mu.name.lower()}, {mv.name.lower()}) not allowed in a {cls.value}"
                )
    cyc = find_directed_cycle(g)
    if cyc is not None:
        problems.append(f"directed cycle {_fmt_cycle(g, cyc)}")
    if cls is GraphClass.MAG and cyc is None:
        for u, v, mu, mv in g.edges():
            if mu == ARROW and mv == ARROW:
                anc_v = relatives(g, v, "ancestors")
                anc_u = relatives(g, u, "ancestors")
                if u in anc_v or v in anc_u:
                    problems.append(
                        f"almost-directed cycle through {g.label(u)}<->{g.label(v)}"
                    )
    if cls is GraphClass.CPDAG and not problems:
        from . import mec

        try:
            ext = mec.cpdag_to_dag(g)
        except mec.NoExtensionError as exc:
            problems.append(f"no consistent DAG extension: {exc}")
        else:
            if mec.dag_to_cpdag(ext) != g:
                problems.append("graph is not the completed PDAG of its extensions")
    return problems


def infer_class(g: MixedGraph) -> GraphClass:
    """Best-fitting class from the edge marks (no maximality or CPDAG completeness check)."""
    if g.has_circle:
        return GraphClass.GENERIC
    if g.has_undirected:
        if g.has_bidirected:
            return GraphClass.GENERIC
        return GraphClass.CPDAG
    if g.has_bidirected:
        return GraphClass.MAG if not validate(g, GraphClass.MAG) else GraphClass.GENERIC
    return GraphClass.DAG


def require_acyclic_mixed(g: MixedGraph, what: str = "this operation") -> None:
    """Reject graphs that m-separation is not defined on here."""
    if g.has_circle:
        raise GraphError(f"{what} does not support circle marks")
    if g.has_undirected:
        raise GraphError(f"{what} requires a DAG or MAG; got undirected edges")
    if find_directed_cycle(g) is not None:
        raise GraphError(f"{what} requires an acyclic graph")


def nonadjacent_pairs(g: MixedGraph, ordered: bool = False) -> list[tuple[int, int]]:
    n = g.n_nodes
    if ordered:
        return [(x, y) for x in range(n) for y in range(n) if x != y and not g.adjacent(x, y)]
    return [(x, y) for x in range(n) for y in range(x + 1, n) if not g.adjacent(x, y)]


def skeleton_pairs(g: MixedGraph) -> set[tuple[int, int]]:
    return {(u, v) for u, v, _, _ in g.edges()}
