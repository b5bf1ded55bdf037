import io
import json
import subprocess
import sys

import pytest
from hypothesis import given

from sepdist.ambiguity import TriplePartition
from sepdist.cli import run
from sepdist.graph import ARROW, CIRCLE, TAIL, GraphError, MixedGraph
from sepdist.io import ParseError, load_graph, parse_json, parse_json_with_triples, parse_text, save_graph, to_json, to_text

from conftest import mixed_graphs


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path, chain3, collider3, ancestral5):
    paths = {}
    for name, g in [("chain3", chain3), ("collider3", collider3), ("ancestral5", ancestral5)]:
        p = tmp_path / f"{name}.txt"
        p.write_text(to_text(g))
        paths[name] = str(p)
    return paths


# -- parsing ------------------------------------------------------------------


def test_parse_chain(chain3):
    g = parse_text("nodes: A B C\nA -> B\nB -> C\n")
    assert g == chain3 and g.labels == ("A", "B", "C")


def test_parse_all_edge_kinds_and_comments():
    g = parse_text("# mixed\nX <-> Y  # trailing\nY -- Z\nZ->W\n")
    assert g.labels == ("X", "Y", "Z", "W")
    assert g.marks(0, 1) == (ARROW, ARROW)
    assert g.marks(1, 2) == (TAIL, TAIL)
    assert g.marks(2, 3) == (TAIL, ARROW)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("A -> B\nA -> B\n", 2, "duplicate"),
        ("A -> B\nB -> A\n", 2, "duplicate"),
        ("A -> A\n", 1, "self-loop"),
        ("A -> B\nA => C\n", 2, ""),
        ("nodes: A B\nA -> C\n", 2, "unknown node"),
        ("A -> B\nnodes: A B\n", 2, "first"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_text(text, source="g.txt")
    assert info.value.line == line
    assert f"g.txt:{line}:" in str(info.value)
    assert fragment in str(info.value)


def test_json_round_trip_of_ancestral_example(ancestral5):
    assert parse_json(to_json(ancestral5)) == ancestral5
    assert parse_json(to_json(ancestral5)).labels == ancestral5.labels


def test_json_marks_and_triples():
    text = json.dumps(
        {
            "n_nodes": 3,
            "labels": ["a", "b", "c"],
            "edges": [["a", "b", "tail", "tail"], [1, 2, "circle", "arrow"]],
            "triples": {"colliders": [[0, 1, 2]], "non_colliders": [], "ambiguous": []},
        }
    )
    g, part = parse_json_with_triples(text)
    assert g.marks(1, 2) == (CIRCLE, ARROW)
    assert part == TriplePartition.from_lists(colliders=[(0, 1, 2)])
    again, part2 = parse_json_with_triples(to_json(g, part))
    assert again == g and part2 == part


@pytest.mark.parametrize(
    "obj",
    [
        {"n_nodes": 2, "edges": [[0, 1, "tail", "pointy"]]},
        {"n_nodes": 2, "edges": [[0, 5, "tail", "arrow"]]},
        {"n_nodes": 2, "edges": [[0, 0, "tail", "arrow"]]},
        {"edges": []},
    ],
)
def test_json_errors(obj):
    with pytest.raises(GraphError):
        parse_json(json.dumps(obj))
    with pytest.raises(GraphError):
        parse_json("{not json")


@given(mixed_graphs(n_max=9))
def test_text_and_json_round_trip(g):
    assert parse_text(to_text(g)) == g
    assert parse_json(to_json(g)) == g


def test_save_and_load(tmp_path, ancestral5):
    for name in ("g.json", "g.txt"):
        save_graph(ancestral5, tmp_path / name)
        assert load_graph(tmp_path / name) == ancestral5
    with pytest.raises(ParseError, match="cannot read"):
        load_graph(tmp_path / "missing.txt")


# -- command line -----------------------------------------------------------------


def test_dist_shd(files):
    code, out, _ = cli("dist", "--metric", "shd", files["chain3"], files["collider3"])
    assert code == 0
    assert json.loads(out)["value"] == 1


def test_scmetric_aggregate(files):
    code, out, _ = cli("scmetric", "--max-order", "1", files["chain3"], files["collider3"])
    assert code == 0
    obj = json.loads(out)
    assert obj["aggregate"] == pytest.approx(1 / 3, abs=1e-12)
    assert [r["tested"] for r in obj["per_order"]] == [3, 3]


def test_symmetric_self_distance(files):
    code, out, _ = cli("dist", "--metric", "parent-sd", "--symmetric", files["chain3"], files["chain3"])
    assert code == 0 and json.loads(out)["value"] == 0


def test_dist_failures_listed(tmp_path):
    g = tmp_path / "g.txt"
    h = tmp_path / "h.txt"
    g.write_text("1 -> 2\n2 -> 3\n3 -> 4\n")
    h.write_text("1 -> 2\n3 -> 2\n3 -> 4\n")
    code, out, _ = cli("dist", "--metric", "parent-sd", "--failures", str(g), str(h))
    obj = json.loads(out)
    assert code == 0 and (obj["numerator"], obj["denominator"]) == (2, 12)
    assert obj["failures"] == [
        {"x": "1", "y": "3", "separator": []},
        {"x": "3", "y": "1", "separator": []},
    ]


def test_rates_and_roc(files):
    code, out, _ = cli("rates", "--max-order", "1", files["collider3"], files["chain3"])
    assert code == 0 and json.loads(out)["aggregate"] == pytest.approx(1 / 6)
    code, out, _ = cli("rates", "--direction", "faithfulness", "--max-order", "1", files["collider3"], files["chain3"])
    obj = json.loads(out)
    assert [r["rate"] for r in obj["per_order"]] == [1.0, None]
    code, out, _ = cli("rates", "--roc", "--max-order", "1", files["collider3"], files["chain3"])
    lines = out.splitlines()
    assert lines[0] == "order,markov_rate,faithfulness_rate,connected_in_truth,separated_in_truth"
    assert lines[2] == "1,0.333333333333,,3,0"


def test_monte_carlo_flags(files):
    code, out, _ = cli("scmetric", "--max-order", "1", "--mc", "2", "--seed", "5", files["chain3"], files["collider3"])
    obj = json.loads(out)
    assert code == 0 and obj["sampler"] == "mc:2"
    assert [r["tested"] for r in obj["per_order"]] == [2, 2]
    code, _, err = cli("scmetric", "--max-order", "1", "--weights", "1", files["chain3"], files["collider3"])
    assert code == 2 and "weights" in err


def test_ambiguity_command(tmp_path, collider3):
    truth = tmp_path / "truth.txt"
    truth.write_text(to_text(collider3))
    skel = MixedGraph(3, [(0, 1, TAIL, TAIL), (1, 2, TAIL, TAIL)], labels=collider3.labels)
    sk = tmp_path / "skel.json"
    sk.write_text(to_json(skel, TriplePartition.from_lists(ambiguous=[(0, 1, 2)])))
    code, out, err = cli("ambiguity", "--truth", str(truth), "--skeleton", str(sk))
    obj = json.loads(out)
    assert code == 0, err
    assert obj["min_dist"] == 0 and obj["max_dist"] > 0 and obj["n_total"] == 2
    tri = tmp_path / "tri.json"
    tri.write_text(to_json(skel, TriplePartition.from_lists(colliders=[(0, 1, 2)])))
    code, out, _ = cli("ambiguity", "--truth", str(truth), "--skeleton", str(sk), "--triples", str(tri), "--metric", "shd")
    assert json.loads(out)["max_dist"] == 0


def test_gen_command_is_deterministic():
    a = cli("gen", "--n", "8", "--p", "0.4", "--seed", "3")
    b = cli("gen", "--n", "8", "--p", "0.4", "--seed", "3")
    assert a == b and a[0] == 0
    g = parse_text(a[1])
    assert g.n_nodes == 8
    code, out, _ = cli("gen", "--kind", "mag", "--n", "6", "--p", "0.5", "--q", "0.5", "--format", "json")
    assert code == 0 and parse_json(out).n_nodes == 6
    assert cli("gen", "--kind", "mixed", "--n", "6", "--p", "0.5")[0] == 1


def test_gen_keeps_isolated_nodes():
    code, out, _ = cli("gen", "--n", "5", "--p", "0")
    assert code == 0 and parse_text(out).n_nodes == 5


def test_experiment_command_csv_and_json(tmp_path):
    code, out, _ = cli("experiment", "perturb", "--n", "8", "--p", "0.4", "--runs", "2", "--metrics", "shd")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert {"seed_g", "seed_perturb", "shd"} <= set(header)
    summary = tmp_path / "s.json"
    code, out, _ = cli(
        "experiment", "correlations", "--n", "6", "--p", "0.3", "--runs", "3", "--format", "json",
        "--summary", str(summary),
    )
    assert code == 0 and json.loads(out)["kind"] == "correlations"
    assert json.loads(summary.read_text())["kind"] == "correlations"


def test_exit_codes(files, tmp_path):
    code, _, err = cli("dist", "--metric", "nonsense", files["chain3"], files["chain3"])
    assert code == 1 and err.startswith("sepdist: usage-error:")
    code, _, err = cli("dist", "--metric", "shd", files["chain3"], str(tmp_path / "nope.txt"))
    assert code == 2 and err.startswith("sepdist: data-error:")
    code, _, err = cli("dist", "--metric", "shd", "--expect", "dag", files["ancestral5"], files["ancestral5"])
    assert code == 2 and "not a valid DAG" in err
    code, _, err = cli("dist", "--metric", "parent-sd", files["ancestral5"], files["ancestral5"])
    assert code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("A -> B\nA ~> C\n")
    code, _, err = cli("dist", "--metric", "shd", str(bad), str(bad))
    assert code == 2 and ":2:" in err
    assert cli()[0] == 1
    assert cli("--threads", "0", "gen", "--n", "3", "--p", "0.1")[0] == 1


def test_threads_do_not_change_output(files):
    base = cli("dist", "--metric", "zl-sd", files["chain3"], files["collider3"])
    assert cli("--threads", "3", "dist", "--metric", "zl-sd", files["chain3"], files["collider3"]) == base
    assert cli("dist", "--threads", "2", "--metric", "zl-sd", files["chain3"], files["collider3"]) == base


def test_cpdag_input_detected(tmp_path):
    p = tmp_path / "cp.txt"
    p.write_text("1 -- 2\n2 -- 3\n")
    code, out, _ = cli("dist", "--metric", "pparent-sd", str(p), str(p))
    assert code == 0 and json.loads(out)["value"] == 0
    q = tmp_path / "badcp.txt"
    q.write_text("1 -- 2\n2 -- 3\n3 -- 4\n4 -- 1\n")
    assert cli("dist", "--metric", "pparent-sd", str(q), str(q))[0] == 2


def test_module_entry_point_byte_identical(files):
    cmd = [sys.executable, "-m", "sepdist.cli", "dist", "--metric", "mb-parent-sd", files["chain3"], files["collider3"]]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    assert json.loads(a)["value"] == pytest.approx(1 / 3)
