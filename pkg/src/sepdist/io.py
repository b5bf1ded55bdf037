"""Reading and writing graphs as edge text or JSON.

Edge text::

    # comment
    nodes: A B C
    A -> B
    B <-> C
    A -- C

The ``nodes:`` header is optional; without it nodes are numbered in order of
first appearance. JSON holds ``n_nodes``, ``labels`` and ``edges`` as
``[from, to, mark_from, mark_to]`` with marks ``"tail"``, ``"arrow"`` or
``"circle"``, plus an optional ``triples`` block with ``colliders``,
``non_colliders`` and ``ambiguous`` lists.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .ambiguity import TriplePartition
from .graph import ARROW, CIRCLE, TAIL, GraphError, Mark, MixedGraph

__all__ = [
    "ParseError",
    "parse_text",
    "parse_json",
    "load_graph",
    "to_text",
    "to_json",
    "save_graph",
]


class ParseError(GraphError):
    def __init__(self, msg: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {msg}" if where else msg)


_EDGE = re.compile(r"^([^\s<>]+?)\s*(<->|->|--)\s*([^\s<>]+)$")
_OPS = {"->": (TAIL, ARROW), "<->": (ARROW, ARROW), "--": (TAIL, TAIL)}
_MARK_NAMES = {"tail": TAIL, "arrow": ARROW, "circle": CIRCLE}


def parse_text(text: str, source: str | None = None) -> MixedGraph:
    labels: list[str] = []
    index: dict[str, int] = {}
    fixed = False
    edges = []
    seen_pairs: dict[tuple[int, int], int] = {}

    def node(name: str, lineno: int) -> int:
        if name not in index:
            if fixed:
                raise ParseError(f"unknown node {name!r} (not in nodes header)", lineno, source)
            index[name] = len(labels)
            labels.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("nodes:"):
            if fixed or edges:
                raise ParseError("nodes header must come first and only once", lineno, source)
            names = line[6:].split()
            if len(set(names)) != len(names):
                raise ParseError("duplicate name in nodes header", lineno, source)
            for name in names:
                node(name, lineno)
            fixed = True
            continue
        m = _EDGE.match(line)
        if not m:
            raise ParseError(f"cannot parse {line!r}; expected 'A -> B', 'A <-> B' or 'A -- B'", lineno, source)
        a, op, b = m.groups()
        u, v = node(a, lineno), node(b, lineno)
        if u == v:
            raise ParseError(f"self-loop at {a}", lineno, source)
        key = (min(u, v), max(u, v))
        if key in seen_pairs:
            raise ParseError(
                f"duplicate edge between {a} and {b} (first on line {seen_pairs[key]})", lineno, source
            )
        seen_pairs[key] = lineno
        mu, mv = _OPS[op]
        edges.append((u, v, mu, mv))
    return MixedGraph(len(labels), edges, labels)


def _mark(value, where: str) -> Mark:
    if isinstance(value, str) and value.lower() in _MARK_NAMES:
        return _MARK_NAMES[value.lower()]
    raise ParseError(f"{where}: unknown mark {value!r}")


def _load_json_obj(obj: dict, source: str | None = None) -> tuple[MixedGraph, TriplePartition | None]:
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object", source=source)
    labels = obj.get("labels")
    n = obj.get("n_nodes", len(labels) if labels is not None else None)
    if not isinstance(n, int) or n < 0:
        raise ParseError("n_nodes must be a non-negative integer", source=source)
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise ParseError("labels must be a list with n_nodes entries", source=source)
    index = {str(lab): i for i, lab in enumerate(labels)} if labels is not None else {}

    def node(v, where):
        if isinstance(v, bool):
            raise ParseError(f"{where}: bad node {v!r}", source=source)
        if isinstance(v, int):
            if not 0 <= v < n:
                raise ParseError(f"{where}: node index {v} out of range", source=source)
            return v
        if isinstance(v, str) and v in index:
            return index[v]
        raise ParseError(f"{where}: unknown node {v!r}", source=source)

    edges = []
    for i, e in enumerate(obj.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(e, list) or len(e) != 4:
            raise ParseError(f"{where}: expected [from, to, mark_from, mark_to]", source=source)
        edges.append((node(e[0], where), node(e[1], where), _mark(e[2], where), _mark(e[3], where)))
    try:
        g = MixedGraph(n, edges, labels)
    except GraphError as exc:
        raise ParseError(str(exc), source=source) from None
    part = None
    tri = obj.get("triples")
    if tri is not None:
        if not isinstance(tri, dict):
            raise ParseError("triples must be an object", source=source)
        sets = {}
        for key in ("colliders", "non_colliders", "ambiguous"):
            items = tri.get(key, [])
            conv = []
            for j, t in enumerate(items):
                where = f"triples.{key}[{j}]"
                if not isinstance(t, list) or len(t) != 3:
                    raise ParseError(f"{where}: expected [a, b, c]", source=source)
                conv.append(tuple(node(v, where) for v in t))
            sets[key] = conv
        part = TriplePartition.from_lists(sets["colliders"], sets["non_colliders"], sets["ambiguous"])
    return g, part


def parse_json(text: str, source: str | None = None) -> MixedGraph:
    return parse_json_with_triples(text, source)[0]


def parse_json_with_triples(text: str, source: str | None = None) -> tuple[MixedGraph, TriplePartition | None]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
    return _load_json_obj(obj, source)


def _is_json(path: Path, text: str) -> bool:
    if path.suffix.lower() == ".json":
        return True
    return text.lstrip().startswith("{")


def load_graph(path, with_triples: bool = False):
    """Read a graph file, choosing the format from the suffix or the content."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=str(p)) from None
    if _is_json(p, text):
        g, part = parse_json_with_triples(text, str(p))
    else:
        g, part = parse_text(text, str(p)), None
    return (g, part) if with_triples else g


def to_text(g: MixedGraph) -> str:
    ops = {(TAIL, ARROW): "->", (ARROW, ARROW): "<->", (TAIL, TAIL): "--"}
    lines = ["nodes: " + " ".join(g.label(v) for v in g.nodes())]
    for u, v, mu, mv in g.edges():
        if (mu, mv) == (ARROW, TAIL):
            u, v, mu, mv = v, u, mv, mu
        op = ops.get((mu, mv))
        if op is None:
            raise GraphError("edge text cannot express circle marks; use JSON")
        lines.append(f"{g.label(u)} {op} {g.label(v)}")
    return "\n".join(lines) + "\n"


def _graph_obj(g: MixedGraph) -> dict:
    labels = [g.label(v) for v in g.nodes()]
    return {
        "n_nodes": g.n_nodes,
        "labels": labels,
        "edges": [
            [labels[u], labels[v], Mark(mu).name.lower(), Mark(mv).name.lower()]
            for u, v, mu, mv in g.edges()
        ],
    }


def to_json(g: MixedGraph, triples: TriplePartition | None = None) -> str:
    obj = _graph_obj(g)
    if triples is not None:
        lab = g.label
        obj["triples"] = {
            key: [[lab(a), lab(b), lab(c)] for a, b, c in sorted(getattr(triples, key))]
            for key in ("colliders", "non_colliders", "ambiguous")
        }
    return json.dumps(obj, indent=2) + "\n"


def save_graph(g: MixedGraph, path, fmt: str | None = None) -> None:
    p = Path(path)
    fmt = fmt or ("json" if p.suffix.lower() == ".json" else "text")
    p.write_text(to_json(g) if fmt == "json" else to_text(g))
