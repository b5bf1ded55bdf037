"""Time the compiled and pure-Python kernels on random DAG pairs.

    python benchmarks/bench_kernels.py --n 200 --pairs 5

Prints one CSV row per (backend, metric) with the mean seconds per call and
checks that both backends return the same numerators.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

from sepdist import kernels
from sepdist.gen import GenSpec, random_dag, run_seed
from sepdist.graph import MixedGraph
from sepdist.metrics import sep_distance, sep_distance_fast_mb


def _calls():
    return {
        "parent-sd": lambda g, h, b: sep_distance(g, h, "parent", backend=b),
        "zl-sd": lambda g, h, b: sep_distance(g, h, "zl", backend=b),
        "mb-parent-sd": lambda g, h, b: sep_distance_fast_mb(g, h, "parent", backend=b),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--pairs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--degree", type=float, default=20.0, help="expected degree; p = degree / (n - 1)")
    args = ap.parse_args(argv)

    backends = ["python"]
    try:
        kernels.get("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernels unavailable; timing the Python backend only", file=sys.stderr)

    p = min(1.0, args.degree / (args.n - 1))
    pairs = [
        (
            random_dag(GenSpec(args.n, p, None, run_seed(args.seed, 2 * i))),
            random_dag(GenSpec(args.n, p, None, run_seed(args.seed, 2 * i + 1))),
        )
        for i in range(args.pairs)
    ]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["backend", "metric", "n", "pairs", "mean_seconds"])
    numerators: dict[str, list[list[int]]] = {}
    for metric, fn in _calls().items():
        for b in backends:
            total = 0.0
            nums = []
            for g, h in pairs:
                # fresh copies so cached arrays are rebuilt inside the timing
                g2, h2 = MixedGraph(g.n_nodes, g.edges()), MixedGraph(h.n_nodes, h.edges())
                t0 = time.perf_counter()
                nums.append(fn(g2, h2, b).numerator)
                total += time.perf_counter() - t0
            numerators.setdefault(metric, []).append(nums)
            out.writerow([b, metric, args.n, args.pairs, f"{total / args.pairs:.6f}"])
    mismatched = [m for m, runs in numerators.items() if any(r != runs[0] for r in runs)]
    if mismatched:
        print(f"backends disagree on: {', '.join(mismatched)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
