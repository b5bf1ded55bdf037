"""Command-line interface.

Exit status is 0 on success, 1 on usage errors and 2 on data errors (bad
files, invalid graphs). Errors go to stderr as ``sepdist: <kind>-error:
<message>``. JSON output has a fixed key order and floats rounded to 12
significant digits, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__, experiments, kernels
from .ambiguity import DEFAULT_MAX_AMBIGUOUS, resolve_and_score
from .gen import GenSpec, random_dag, random_mag, random_mixed
from .graph import GraphClass, GraphError, MixedGraph, validate
from .io import load_graph, to_json, to_text
from .metrics import OrderProfile, order_rates, sc_metric

PROG = "sepdist"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _num(v):
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def _dump(obj, out) -> None:
    out.write(json.dumps(_num(obj), indent=2) + "\n")


def _fmt_cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


def _csv(columns, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt_cell(row.get(c, "")) for c in columns])


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of integers, got {text!r}") from None


_CLASSES = {"dag": GraphClass.DAG, "cpdag": GraphClass.CPDAG, "mag": GraphClass.MAG, "pdag": GraphClass.PDAG}


def _read(path: str, expect: str | None) -> MixedGraph:
    g = load_graph(path)
    cls = _CLASSES[expect] if expect else None
    if cls is None and g.has_undirected:
        cls = GraphClass.CPDAG
    if cls is not None:
        problems = validate(g, cls)
        if problems:
            raise GraphError(f"{path}: not a valid {cls.value}: " + "; ".join(problems))
    return g


def _profile_obj(p: OrderProfile, max_order: int) -> dict:
    return {
        "metric": p.metric,
        "sampler": p.sampler,
        "max_order": max_order,
        "weights": p.weights,
        "per_order": [
            {
                "order": r.order,
                "rate": None if r.rate is None else float(r.rate),
                "tested": r.tested,
                "disagreements": r.disagreements,
            }
            for r in p.per_order
        ],
        "aggregate": p.value,
    }


# -- subcommands -----------------------------------------------------------------


def cmd_dist(a, out) -> int:
    g = _read(a.g, a.expect)
    h = _read(a.h, a.expect)
    if a.failures and a.metric.startswith("mb-"):
        raise UsageError("--failures is not available for MB-enhanced metrics")
    if a.failures and a.metric.startswith("shd"):
        raise UsageError("--failures applies to separation distances only")
    if a.failures:
        from .metrics import sep_distance
        from .strategies import SepStrategy

        rep = sep_distance(g, h, SepStrategy(a.metric[:-3]), a.symmetric, threads=a.threads, collect=True)
        rep.metric = a.metric + ("-sym" if a.symmetric else "")
    else:
        rep = experiments.distance(a.metric, g, h, a.symmetric, a.threads)
    obj = {
        "metric": rep.metric,
        "value": rep.value,
        "numerator": rep.numerator,
        "denominator": rep.denominator,
        "skipped": rep.skipped,
    }
    if rep.failures is not None:
        obj["failures"] = [
            {
                "x": g.label(x),
                "y": g.label(y),
                "separator": None if s is None else [h.label(v) for v in sorted(s)],
            }
            for (x, y), s in rep.failures
        ]
    _dump(obj, out)
    return 0


def _sampler(a):
    if a.mc is None:
        return "full"
    if a.mc < 1:
        raise UsageError("--mc must be positive")
    return a.mc


def cmd_scmetric(a, out) -> int:
    g = _read(a.g, None)
    h = _read(a.h, None)
    w = _floats(a.weights) if a.weights else None
    p = sc_metric(g, h, a.max_order, w, _sampler(a), a.seed, threads=a.threads)
    _dump(_profile_obj(p, a.max_order), out)
    return 0


def cmd_rates(a, out) -> int:
    g = _read(a.g, None)
    h = _read(a.h, None)
    w = _floats(a.weights) if a.weights else None
    if a.roc:
        m = order_rates(g, h, a.max_order, "markov", w, _sampler(a), a.seed, threads=a.threads)
        f = order_rates(g, h, a.max_order, "faithfulness", w, _sampler(a), a.seed, threads=a.threads)
        rows = [
            {
                "order": rm.order,
                "markov_rate": "" if rm.rate is None else float(rm.rate),
                "faithfulness_rate": "" if rf.rate is None else float(rf.rate),
                "connected_in_truth": rm.tested,
                "separated_in_truth": rf.tested,
            }
            for rm, rf in zip(m.per_order, f.per_order)
        ]
        _csv(list(rows[0].keys()), rows, out)
        return 0
    p = order_rates(g, h, a.max_order, a.direction, w, _sampler(a), a.seed, threads=a.threads)
    _dump(_profile_obj(p, a.max_order), out)
    return 0


def cmd_ambiguity(a, out) -> int:
    truth = _read(a.truth, None)
    skel, part = load_graph(a.skeleton, with_triples=True)
    if a.triples:
        tg, part = load_graph(a.triples, with_triples=True)
        if part is None:
            raise GraphError(f"{a.triples}: no triples block")
        if tg.n_nodes != skel.n_nodes:
            raise GraphError("triples file and skeleton have different node counts")
    if part is None:
        raise GraphError("no triple partition given (use --triples or a skeleton JSON with triples)")
    score = resolve_and_score(truth, skel, part, a.metric, a.max_ambiguous)
    _dump(
        {
            "metric": a.metric,
            "max_dist": score.max_dist,
            "mean_dist": score.mean_dist,
            "min_dist": score.min_dist,
            "n_valid": score.n_valid,
            "n_total": score.n_total,
        },
        out,
    )
    return 0


def cmd_gen(a, out) -> int:
    spec = GenSpec(a.n, a.p, a.q, a.seed)
    if a.kind == "dag":
        g = random_dag(spec)
    else:
        if a.q is None:
            raise UsageError(f"--q is required for --kind {a.kind}")
        g = random_mixed(spec) if a.kind == "mixed" else random_mag(spec)
    out.write(to_json(g) if a.format == "json" else to_text(g))
    return 0


def _emit_experiment(res: experiments.ExperimentResult, a, out) -> int:
    if a.summary:
        with open(a.summary, "w") as fh:
            _dump({"kind": res.kind, "summary": res.summary}, fh)
    if a.format == "json":
        _dump({"kind": res.kind, "rows": res.rows, "summary": res.summary}, out)
    else:
        _csv(res.columns, res.rows, out)
    return 0


def cmd_experiment(a, out) -> int:
    kind = a.kind
    if kind == "correlations":
        metrics = a.metrics.split(",") if a.metrics else ["parent-sd", "mb-parent-sd", "shd"]
        res = experiments.correlations(
            a.n, _floats(a.p), a.runs, a.seed, metrics, not a.one_sided, a.same_graphs, a.q, a.threads
        )
    elif kind == "perturb":
        metrics = a.metrics.split(",") if a.metrics else ["zl-sd", "parent-sd", "shd-norm"]
        res = experiments.perturb(a.n, _floats(a.p), a.runs, a.seed, metrics, a.threads)
    elif kind == "mc_accuracy":
        ps = _floats(a.p)
        if len(ps) != 1:
            raise UsageError("mc_accuracy takes a single --p")
        res = experiments.mc_accuracy(a.n, ps[0], _ints(a.L), a.runs, a.seed, a.max_order, a.threads)
    else:
        ps = _floats(a.p)
        if len(ps) != 1:
            raise UsageError("timing takes a single --p")
        metrics = a.metrics.split(",") if a.metrics else ["parent-sd", "mb-parent-sd"]
        res = experiments.timing(a.n, ps[0], a.runs, a.seed, metrics, a.threads)
    return _emit_experiment(res, a, out)


def cmd_bench(a, out) -> int:
    res = experiments.bench(a.n, a.pairs, a.seed, a.threads)
    summary = dict(res.summary)
    summary["backend"] = kernels.BACKEND
    summary["threads"] = a.threads or kernels.default_threads()
    _dump(summary, out)
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Separation-based distances between causal graphs.")
    p.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for the compiled kernels (default: SEPDIST_THREADS or 1)",
    )
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    metric_help = "one of: " + ", ".join(experiments.METRICS)

    d = sub.add_parser("dist", parents=[common], help="distance between two graphs")
    d.add_argument("--metric", required=True, choices=experiments.METRICS, metavar="METRIC", help=metric_help)
    d.add_argument("--symmetric", action="store_true", help="average both directions")
    d.add_argument("--failures", action="store_true", help="list failing pairs and their separators")
    d.add_argument("--expect", choices=sorted(_CLASSES), help="validate both inputs against this class")
    d.add_argument("g", help="reference graph file")
    d.add_argument("h", help="graph whose separators are checked")
    d.set_defaults(func=cmd_dist)

    def order_opts(sp):
        sp.add_argument("--max-order", type=int, required=True, help="largest conditioning-set size")
        sp.add_argument("--mc", type=int, default=None, metavar="L", help="sample L statements per order")
        sp.add_argument("--seed", type=int, default=0, help="sampling seed")
        sp.add_argument("--weights", default=None, help="comma-separated weight per order")
        sp.add_argument("g")
        sp.add_argument("h")

    s = sub.add_parser("scmetric", parents=[common], help="separation/connection disagreement per order")
    order_opts(s)
    s.set_defaults(func=cmd_scmetric)

    r = sub.add_parser("rates", parents=[common], help="Markov (missed connections) or faithfulness (missed separations) rates")
    r.add_argument("--direction", choices=["markov", "faithfulness"], default="markov")
    r.add_argument("--roc", action="store_true", help="CSV with both rates per order")
    order_opts(r)
    r.set_defaults(func=cmd_rates)

    a = sub.add_parser("ambiguity", parents=[common], help="score all resolutions of ambiguous triples")
    a.add_argument("--truth", required=True)
    a.add_argument("--skeleton", required=True, help="undirected skeleton (JSON may carry the triples)")
    a.add_argument("--triples", default=None, help="JSON file with a triples block")
    a.add_argument("--metric", default="pparent-sd", choices=experiments.METRICS, metavar="METRIC", help=metric_help)
    a.add_argument("--max-ambiguous", type=int, default=DEFAULT_MAX_AMBIGUOUS)
    a.set_defaults(func=cmd_ambiguity)

    g = sub.add_parser("gen", parents=[common], help="draw a random graph")
    g.add_argument("--kind", choices=["dag", "mixed", "mag"], default="dag")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, default=None, help="probability a drawn edge is directed")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("experiment", parents=[common], help="run an experiment protocol")
    e.add_argument("kind", choices=["correlations", "perturb", "mc_accuracy", "timing"])
    e.add_argument("--n", type=int, default=25)
    e.add_argument("--p", default="0.1,0.3,0.5,0.7,0.9", help="comma-separated edge probabilities")
    e.add_argument("--q", type=float, default=None, help="use mixed graphs with this directed share")
    e.add_argument("--runs", type=int, default=10, help="runs per p (pairs for mc_accuracy/timing)")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--metrics", default=None, help="comma-separated metric names")
    e.add_argument("--L", default="100,200,300,400,500", help="sample budgets for mc_accuracy")
    e.add_argument("--max-order", type=int, default=None)
    e.add_argument("--one-sided", action="store_true", help="correlations: do not symmetrize")
    e.add_argument("--same-graphs", action="store_true", help="correlations: draw both graphs from one seed")
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--summary", default=None, help="also write the JSON summary to this file")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", parents=[common], help="MB-enhanced vs plain parent distance timing")
    b.add_argument("--n", type=int, default=1000)
    b.add_argument("--pairs", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be at least 1")
        buf = _io.StringIO()
        code = args.func(args, buf)
        out.write(buf.getvalue())
        return code
    except UsageError as exc:
        err.write(f"{PROG}: usage-error: {exc}\n")
        return 1
    except GraphError as exc:
        err.write(f"{PROG}: data-error: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"{PROG}: data-error: {exc}\n")
        return 2


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
