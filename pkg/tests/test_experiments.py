import math

import pytest

from sepdist.experiments import METRICS, correlations, distance, mc_accuracy, pearson, perturb, timing
from sepdist.gen import GenSpec, random_dag, run_seed
from sepdist.graph import GraphError


def test_metric_vocabulary():
    assert "shd" in METRICS and "zl-sd" in METRICS and "mb-pparent-sd" in METRICS
    with pytest.raises(GraphError):
        distance("sid", random_dag(GenSpec(3, 0.5)), random_dag(GenSpec(3, 0.5)))
    with pytest.raises(GraphError):
        distance("nearest-sd", random_dag(GenSpec(3, 0.5)), random_dag(GenSpec(3, 0.5)))


def test_pearson():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert pearson([1, 1, 1], [1, 2, 3]) is None
    assert pearson([1], [2]) is None


def test_identical_graphs_give_undefined_correlation():
    res = correlations(8, [0.3], runs=2, seed=4, same_graphs=True)
    assert all(row[m] == 0 for row in res.rows for m in ("parent-sd", "mb-parent-sd", "shd"))
    assert all(v is None for v in res.summary["0.3"].values())
    assert all(row["seed_g"] == row["seed_h"] for row in res.rows)


def test_correlation_rows_replay_from_seeds():
    res = correlations(10, [0.2, 0.4], runs=3, seed=123)
    assert len(res.rows) == 6
    row = res.rows[4]
    assert (row["seed_g"], row["seed_h"]) == (run_seed(123, 8), run_seed(123, 9))
    g = random_dag(GenSpec(10, 0.4, None, row["seed_g"]))
    h = random_dag(GenSpec(10, 0.4, None, row["seed_h"]))
    assert distance("parent-sd", g, h, symmetric=True).value == row["parent-sd"]
    assert res.rows == correlations(10, [0.2, 0.4], runs=3, seed=123).rows


def test_perturbation_shd_constant():
    res = perturb(25, [0.3], runs=20, seed=0)
    ok = [row for row in res.rows if row["reversal_ok"]]
    assert ok
    assert all(math.isclose(row["shd-norm"], 2 / 300) for row in ok)


def test_mc_exact_at_largest_budget():
    res = mc_accuracy(7, 0.4, budgets=[5, 1000], pairs=3, seed=2, max_order=3)
    assert res.summary["largest_order_size"] == 210
    exact = [row for row in res.rows if row["L"] == 1000]
    assert all(row["mc"] == row["full"] for row in exact)
    assert res.summary["1000"] == 0


def test_timing_columns():
    res = timing(30, 0.1, pairs=2, seed=0, metrics=["parent-sd"])
    assert res.columns == ["pair", "seed_g", "seed_h", "edges_g", "edges_h", "parent-sd", "parent-sd_seconds"]
    assert all(row["parent-sd_seconds"] >= 0 for row in res.rows)


@pytest.mark.parametrize("bad", [dict(ps=[], runs=2), dict(ps=[0.2], runs=0), dict(ps=[1.2], runs=1)])
def test_invalid_grid(bad):
    with pytest.raises(GraphError):
        correlations(5, bad["ps"], bad["runs"])
