"""Separation-based distances between causal graphs (DAGs, CPDAGs, MAGs)."""

from .graph import (
    ARROW,
    CIRCLE,
    TAIL,
    GraphClass,
    GraphError,
    Mark,
    MixedGraph,
    induced_subgraph,
    moralize,
    nonadjacent_pairs,
    relatives,
    validate,
)
from .separation import SepStatement, m_separated, markov_blanket, reach_given, separated_brute_force
from .mec import (
    NoExtensionError,
    cpdag_to_dag,
    dag_to_cpdag,
    markov_equivalent,
    meek_closure,
    unshielded_colliders,
)
from .strategies import SepStrategy, SeparatorChoice, all_separators, select_separator, zl_separator
from .metrics import (
    DistanceReport,
    OrderProfile,
    order_rates,
    sc_metric,
    sep_distance,
    sep_distance_fast_mb,
    shd,
)
from .ambiguity import AmbiguityScore, TriplePartition, resolve_and_score
from .gen import GenSpec, perturb_delete_reverse, random_dag, random_mag, random_mixed
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "ARROW",
    "CIRCLE",
    "TAIL",
    "BACKEND",
    "GraphClass",
    "GraphError",
    "Mark",
    "MixedGraph",
    "induced_subgraph",
    "moralize",
    "nonadjacent_pairs",
    "relatives",
    "validate",
    "SepStatement",
    "m_separated",
    "markov_blanket",
    "reach_given",
    "separated_brute_force",
    "NoExtensionError",
    "cpdag_to_dag",
    "dag_to_cpdag",
    "markov_equivalent",
    "meek_closure",
    "unshielded_colliders",
    "SepStrategy",
    "SeparatorChoice",
    "all_separators",
    "select_separator",
    "zl_separator",
    "DistanceReport",
    "OrderProfile",
    "order_rates",
    "sc_metric",
    "sep_distance",
    "sep_distance_fast_mb",
    "shd",
    "AmbiguityScore",
    "TriplePartition",
    "resolve_and_score",
    "GenSpec",
    "perturb_delete_reverse",
    "random_dag",
    "random_mag",
    "random_mixed",
]
