"""Metric registry and experiment protocols.

Every protocol returns an :class:`ExperimentResult` whose rows carry the
seeds needed to replay them. Per-run seeds are derived from the base seed
with :func:`sepdist.gen.run_seed`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gen import GenSpec, perturb_delete_reverse, random_dag, random_mixed, run_seed
from .graph import GraphError, MixedGraph
from .metrics import DistanceReport, n_triples, sc_metric, sep_distance, sep_distance_fast_mb, shd
from .strategies import SepStrategy

__all__ = [
    "METRICS",
    "distance",
    "pearson",
    "ExperimentResult",
    "correlations",
    "perturb",
    "mc_accuracy",
    "timing",
    "bench",
]

METRICS: tuple[str, ...] = ("shd", "shd-norm") + tuple(f"{s.value}-sd" for s in SepStrategy)


def distance(
    name: str,
    g: MixedGraph,
    h: MixedGraph,
    symmetric: bool = False,
    threads: int | None = None,
    strict: bool = True,
) -> DistanceReport:
    """Evaluate a metric by name (see :data:`METRICS`).

    MB-enhanced separation distances go through the single-traversal path.
    SHD is already symmetric, so ``symmetric`` does not change it.
    """
    if name == "shd":
        return shd(g, h)
    if name == "shd-norm":
        return shd(g, h, normalized=True)
    if not name.endswith("-sd"):
        raise GraphError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}")
    try:
        strat = SepStrategy(name[:-3])
    except ValueError:
        raise GraphError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}") from None
    if strat.is_mb:
        rep = sep_distance_fast_mb(g, h, strat.base, symmetric, threads=threads, strict=strict)
    else:
        rep = sep_distance(g, h, strat, symmetric, threads=threads, strict=strict)
    rep.metric = name + ("-sym" if symmetric else "")
    return rep


def pearson(a: Sequence[float], b: Sequence[float]) -> float | None:
    """Pearson correlation; None when either column is constant or too short."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size < 2 or x.size != y.size:
        return None
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(dx @ dy) / (sx * sy)


@dataclass
class ExperimentResult:
    kind: str
    columns: list[str]
    rows: list[dict]
    summary: dict = field(default_factory=dict)


def _check_grid(ps: Sequence[float], runs: int) -> None:
    if runs < 1:
        raise GraphError("runs must be at least 1")
    if not ps:
        raise GraphError("empty p grid")
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise GraphError(f"p must lie in [0, 1], got {p}")


def correlations(
    n: int,
    ps: Sequence[float],
    runs: int,
    seed: int = 0,
    metrics: Sequence[str] = ("parent-sd", "mb-parent-sd", "shd"),
    symmetric: bool = True,
    same_graphs: bool = False,
    q: float | None = None,
    threads: int | None = None,
) -> ExperimentResult:
    """Distances between independent random graph pairs, and their correlations.

    For each ``p`` and run, two graphs are drawn (DAGs, or mixed graphs when
    ``q`` is given) and every metric is evaluated. ``same_graphs`` draws both
    from one seed. The summary holds, per ``p``, the Pearson coefficient of
    every metric pair (None when undefined).
    """
    _check_grid(ps, runs)
    make = random_dag if q is None else random_mixed
    rows = []
    for i, p in enumerate(ps):
        for r in range(runs):
            k = i * runs + r
            sg = run_seed(seed, 2 * k)
            sh = sg if same_graphs else run_seed(seed, 2 * k + 1)
            g = make(GenSpec(n, p, q, sg))
            h = make(GenSpec(n, p, q, sh))
            row = {"p": p, "run": r, "seed_g": sg, "seed_h": sh}
            for m in metrics:
                row[m] = distance(m, g, h, symmetric, threads, strict=q is None).value
            rows.append(row)
    summary = {}
    for p in ps:
        sel = [row for row in rows if row["p"] == p]
        corr = {}
        for a_i, a in enumerate(metrics):
            for b in metrics[a_i + 1:]:
                corr[f"{a}|{b}"] = pearson([s[a] for s in sel], [s[b] for s in sel])
        summary[str(p)] = corr
    return ExperimentResult("correlations", ["p", "run", "seed_g", "seed_h", *metrics], rows, summary)


def perturb(
    n: int,
    ps: Sequence[float],
    runs: int,
    seed: int = 0,
    metrics: Sequence[str] = ("zl-sd", "parent-sd", "shd-norm"),
    threads: int | None = None,
) -> ExperimentResult:
    """Distance from a random DAG to a copy with one edge deleted and one reversed.

    Distances are one-sided, ``d(G, H)`` with ``H`` the perturbed graph.
    Graphs with fewer than two edges are redrawn with the next seed.
    """
    _check_grid(ps, runs)
    rows = []
    for i, p in enumerate(ps):
        for r in range(runs):
            k = i * runs + r
            sg = run_seed(seed, 2 * k)
            attempt = 0
            g = random_dag(GenSpec(n, p, None, sg))
            while g.n_edges < 2:
                attempt += 1
                if attempt > 1000:
                    raise GraphError(f"p={p} too small to draw a graph with two edges")
                sg = run_seed(seed, 2 * k + (attempt << 32))
                g = random_dag(GenSpec(n, p, None, sg))
            sp = run_seed(seed, 2 * k + 1)
            res = perturb_delete_reverse(g, sp)
            row = {
                "p": p,
                "run": r,
                "seed_g": sg,
                "seed_perturb": sp,
                "reversal_ok": int(res.reversal_ok),
            }
            for m in metrics:
                row[m] = distance(m, g, res.graph, False, threads).value
            rows.append(row)
    summary = {}
    for p in ps:
        sel = [row for row in rows if row["p"] == p]
        summary[str(p)] = {m: float(np.mean([s[m] for s in sel])) for m in metrics}
    cols = ["p", "run", "seed_g", "seed_perturb", "reversal_ok", *metrics]
    return ExperimentResult("perturb", cols, rows, summary)


def mc_accuracy(
    n: int,
    p: float,
    budgets: Sequence[int],
    pairs: int,
    seed: int = 0,
    max_order: int | None = None,
    threads: int | None = None,
) -> ExperimentResult:
    """Sampled s/c-metric against the exhaustive value on random DAG pairs.

    One row per (pair, budget) with the full value, the sampled value and
    their absolute difference. The summary gives the mean difference per
    budget. A budget of at least the largest order size reproduces the full
    value exactly.
    """
    _check_grid([p], pairs)
    if any(b < 1 for b in budgets):
        raise GraphError("budgets must be positive")
    k_max = n - 2 if max_order is None else max_order
    rows = []
    for r in range(pairs):
        sg = run_seed(seed, 2 * r)
        sh = run_seed(seed, 2 * r + 1)
        g = random_dag(GenSpec(n, p, None, sg))
        h = random_dag(GenSpec(n, p, None, sh))
        full = sc_metric(g, h, k_max, threads=threads).value
        for b in budgets:
            ss = run_seed(seed, (r << 20) + b)
            mc = sc_metric(g, h, k_max, sampler=int(b), seed=ss, threads=threads).value
            rows.append(
                {
                    "pair": r,
                    "L": int(b),
                    "seed_g": sg,
                    "seed_h": sh,
                    "seed_sample": ss,
                    "full": full,
                    "mc": mc,
                    "abs_diff": abs(mc - full),
                }
            )
    largest = max(n_triples(n, k) for k in range(k_max + 1))
    summary = {
        str(b): float(np.mean([row["abs_diff"] for row in rows if row["L"] == b])) for b in budgets
    }
    summary["largest_order_size"] = largest
    cols = ["pair", "L", "seed_g", "seed_h", "seed_sample", "full", "mc", "abs_diff"]
    return ExperimentResult("mc_accuracy", cols, rows, summary)


def timing(
    n: int,
    p: float,
    pairs: int,
    seed: int = 0,
    metrics: Sequence[str] = ("parent-sd", "mb-parent-sd"),
    threads: int | None = None,
) -> ExperimentResult:
    """Wall-clock seconds per distance call on random DAG pairs."""
    _check_grid([p], pairs)
    rows = []
    for r in range(pairs):
        sg = run_seed(seed, 2 * r)
        sh = run_seed(seed, 2 * r + 1)
        g = random_dag(GenSpec(n, p, None, sg))
        h = random_dag(GenSpec(n, p, None, sh))
        row = {"pair": r, "seed_g": sg, "seed_h": sh, "edges_g": g.n_edges, "edges_h": h.n_edges}
        for m in metrics:
            # graphs are fresh, so cached compressed forms are rebuilt inside the timing
            g2 = MixedGraph(g.n_nodes, g.edges())
            h2 = MixedGraph(h.n_nodes, h.edges())
            t0 = time.perf_counter()
            rep = distance(m, g2, h2, False, threads)
            row[m + "_seconds"] = time.perf_counter() - t0
            row[m] = rep.value
        rows.append(row)
    summary = {m: float(np.mean([row[m + "_seconds"] for row in rows])) for m in metrics}
    cols = ["pair", "seed_g", "seed_h", "edges_g", "edges_h"]
    for m in metrics:
        cols += [m, m + "_seconds"]
    return ExperimentResult("timing", cols, rows, summary)


def bench(
    n: int = 1000,
    pairs: int = 100,
    seed: int = 0,
    threads: int | None = None,
) -> ExperimentResult:
    """MB-enhanced against plain parent distance on sparse random DAGs.

    Edge probability ``20 / (n - 1)`` gives ``10 n`` expected edges.
    """
    if n < 2:
        raise GraphError("bench needs at least two nodes")
    res = timing(n, min(1.0, 20.0 / (n - 1)), pairs, seed, ("parent-sd", "mb-parent-sd"), threads)
    plain = res.summary["parent-sd"]
    fast = res.summary["mb-parent-sd"]
    res.kind = "bench"
    res.summary = {
        "n": n,
        "pairs": pairs,
        "mean_seconds_parent_sd": plain,
        "mean_seconds_mb_parent_sd": fast,
        "ratio": fast / plain if plain > 0 else None,
    }
    return res
