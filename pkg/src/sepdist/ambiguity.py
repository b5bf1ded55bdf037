"""Scoring estimated graphs whose unshielded triples are partly ambiguous.

Constraint-based discovery can leave some unshielded triples undecided. Each
subset ``B`` of the ambiguous triples is one resolution: the triples in
``colliders | B`` are oriented as colliders on the skeleton, the result is
closed under the orientation rules, and every valid outcome is scored
against the truth. The score reports the worst, mean and best distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from . import mec
from .graph import TAIL, ARROW, GraphError, MixedGraph, find_directed_cycle

__all__ = [
    "TriplePartition",
    "AmbiguityScore",
    "orient_colliders",
    "resolutions",
    "resolve_and_score",
    "DEFAULT_MAX_AMBIGUOUS",
]

DEFAULT_MAX_AMBIGUOUS = 20

Triple = tuple[int, int, int]


def _canon(t: Iterable[int]) -> Triple:
    a, b, c = (int(v) for v in t)
    return (a, b, c) if a < c else (c, b, a)


@dataclass(frozen=True)
class TriplePartition:
    """Split of a skeleton's unshielded triples ``(a, b, c)`` (middle ``b``, ``a < c``)."""

    colliders: frozenset[Triple]
    non_colliders: frozenset[Triple]
    ambiguous: frozenset[Triple]

    @classmethod
    def from_lists(cls, colliders=(), non_colliders=(), ambiguous=()) -> "TriplePartition":
        return cls(
            frozenset(_canon(t) for t in colliders),
            frozenset(_canon(t) for t in non_colliders),
            frozenset(_canon(t) for t in ambiguous),
        )

    def check(self, skeleton: MixedGraph) -> None:
        """Raise unless the three sets are disjoint and cover the skeleton's triples."""
        c, n, a = self.colliders, self.non_colliders, self.ambiguous
        if c & n or c & a or n & a:
            raise GraphError("triple sets overlap")
        want = set(mec.unshielded_triples(skeleton))
        have = c | n | a
        if have != want:
            extra = sorted(have - want)
            missing = sorted(want - have)
            raise GraphError(
                f"triples do not match the skeleton (not unshielded: {extra}, unlisted: {missing})"
            )


@dataclass(frozen=True)
class AmbiguityScore:
    max_dist: float
    mean_dist: float
    min_dist: float
    n_valid: int
    n_total: int

    @property
    def conflict_rate(self) -> float:
        return 1.0 - self.n_valid / self.n_total if self.n_total else 0.0


def orient_colliders(skeleton: MixedGraph, colliders: Iterable[Triple]) -> MixedGraph | None:
    """Orient each triple as ``a -> b <- c``; None if an edge gets both directions
    or the oriented edges form a directed cycle."""
    heads: set[tuple[int, int]] = set()
    for a, b, c in colliders:
        heads.add((a, b))
        heads.add((c, b))
    if any((b, a) in heads for a, b in heads):
        return None
    g = skeleton.with_edges([(a, b, TAIL, ARROW) for a, b in heads])
    if find_directed_cycle(g) is not None:
        return None
    return g


def _resolve(skeleton: MixedGraph, colliders: frozenset[Triple]) -> MixedGraph | None:
    pdag = orient_colliders(skeleton, colliders)
    if pdag is None:
        return None
    res = mec.meek_closure(pdag)
    if not res.ok:
        return None
    h = res.graph
    # the closure must be the CPDAG of a DAG with exactly these colliders
    try:
        ext = mec.cpdag_to_dag(h)
    except mec.NoExtensionError:
        return None
    if mec.unshielded_colliders(ext) != set(colliders):
        return None
    return h


def resolutions(skeleton: MixedGraph, partition: TriplePartition, max_ambiguous: int = DEFAULT_MAX_AMBIGUOUS):
    """Yield ``(B, cpdag_or_None)`` for every subset ``B`` of the ambiguous triples."""
    if skeleton.has_bidirected or any(
        (mu, mv) != (TAIL, TAIL) for _, _, mu, mv in skeleton.edges()
    ):
        raise GraphError("skeleton must be undirected")
    partition.check(skeleton)
    amb = sorted(partition.ambiguous)
    if len(amb) > max_ambiguous:
        raise GraphError(
            f"{len(amb)} ambiguous triples exceed the cap of {max_ambiguous}"
        )
    for mask in range(1 << len(amb)):
        b = frozenset(t for i, t in enumerate(amb) if mask >> i & 1)
        yield b, _resolve(skeleton, partition.colliders | b)


def _metric_fn(metric) -> Callable[[MixedGraph, MixedGraph], float]:
    if callable(metric):
        return metric
    from .experiments import distance

    return lambda g, h: distance(metric, g, h).value


def resolve_and_score(
    g_truth: MixedGraph,
    skeleton: MixedGraph,
    partition: TriplePartition,
    metric="pparent-sd",
    max_ambiguous: int = DEFAULT_MAX_AMBIGUOUS,
) -> AmbiguityScore:
    """Worst, mean and best distance over all valid resolutions.

    Parameters
    ----------
    metric : str or callable
        A metric name understood by :func:`sepdist.experiments.distance`
        (for example ``"pparent-sd"`` or ``"shd"``), or a function
        ``f(g_truth, h) -> float``.

    A resolution is invalid if the collider orientations clash or form a
    cycle, if the orientation rules report a conflict, or if the outcome
    has no DAG extension with exactly the chosen colliders. With no valid
    resolution all three distances are 1.
    """
    if g_truth.n_nodes != skeleton.n_nodes:
        raise GraphError("truth and skeleton have different node counts")
    fn = _metric_fn(metric)
    scores = []
    total = 0
    for _, h in resolutions(skeleton, partition, max_ambiguous):
        total += 1
        if h is not None:
            scores.append(float(fn(g_truth, h)))
    if not scores:
        return AmbiguityScore(1.0, 1.0, 1.0, 0, total)
    return AmbiguityScore(max(scores), sum(scores) / len(scores), min(scores), len(scores), total)
