from __future__ import annotations

import dataclasses
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assetowner.dataset import make_binary_problem, mccv_split
from assetowner.evaluation import (
    ADABOOST_DEPTH,
    ADABOOST_SHRINKAGE,
    CART_CP,
    CART_MAXDEPTH,
    CART_MINSPLIT,
    FOREST_MAXNODES,
    FOREST_MTRY,
    FOREST_NTREE,
    FOREST_NTREE_DESK,
    NB_LAPLACE,
    ConfusionMatrix,
    confusion,
    default_grid,
    desk_grid,
    error_summary,
    grid_search,
    metrics,
    nearest_rank_quantile,
    params_of,
    run_mccv,
)
from assetowner.models import FAMILIES
from assetowner.report import canonical_json, run_report_to_dict
from reference import count_metrics, nearest_rank

cm_strategy = st.tuples(
    st.integers(0, 200), st.integers(0, 200), st.integers(0, 200), st.integers(0, 200)
).filter(lambda t: sum(t) > 0)


# confusion

def test_confusion_examples():
    assert confusion([True] * 3, [True] * 3) == ConfusionMatrix(tp=3, fp=0, tn=0, fn=0)
    assert confusion([True], [False]) == ConfusionMatrix(tp=0, fp=1, tn=0, fn=0)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60))
def test_confusion_conserves_count(pairs):
    preds, actuals = zip(*pairs)
    cm = confusion(preds, actuals)
    assert cm.total == len(pairs)
    assert cm.tp + cm.fp + cm.tn + cm.fn == len(pairs)


def test_confusion_rejects_bad_input():
    with pytest.raises(ValueError):
        confusion([True], [True, False])
    with pytest.raises(ValueError):
        confusion([], [])


def test_confusion_addition():
    a = ConfusionMatrix(tp=1, fp=2, tn=3, fn=4)
    b = ConfusionMatrix(tp=10, fp=20, tn=30, fn=40)
    assert a + b == ConfusionMatrix(tp=11, fp=22, tn=33, fn=44)


# metrics

def test_metrics_worked_example():
    got = metrics(ConfusionMatrix(tp=50, fp=5, tn=35, fn=10))
    assert got["accuracy"] == pytest.approx(0.85, abs=5e-5)
    assert got["sensitivity"] == pytest.approx(0.8333, abs=5e-5)
    assert got["specificity"] == pytest.approx(0.875, abs=5e-5)
    assert got["precision"] == pytest.approx(0.9091, abs=5e-5)
    assert got["f1"] == pytest.approx(0.8696, abs=5e-5)


def test_metrics_zero_denominators_yield_none():
    got = metrics(ConfusionMatrix(tp=0, fp=0, tn=10, fn=0))
    assert got["accuracy"] == 1.0
    assert got["sensitivity"] is None
    assert got["precision"] is None
    assert got["f1"] is None
    assert got["specificity"] == 1.0


def test_metrics_perfect_predictions():
    got = metrics(ConfusionMatrix(tp=7, fp=0, tn=13, fn=0))
    assert got["error_rate"] == 0.0 and got["f1"] == 1.0


def test_metrics_empty_matrix_is_error():
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix(tp=0, fp=0, tn=0, fn=0))


@given(cm_strategy)
def test_metrics_match_counting_oracle(cells):
    tp, fp, tn, fn = cells
    got = metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
    want = count_metrics(tp, fp, tn, fn)
    for name in ("accuracy", "error_rate", "sensitivity", "specificity", "precision"):
        if want[name] is None:
            assert got[name] is None, name
        else:
            assert got[name] == float(want[name]), name
    if want["f1"] is None:
        assert got["f1"] is None
    else:
        # f1 composes the two already-rounded ratios, exactly as documented
        p, s = float(want["precision"]), float(want["sensitivity"])
        assert got["f1"] == 2.0 * p * s / (p + s)
    if got["accuracy"] is not None and got["error_rate"] is not None:
        assert got["accuracy"] + got["error_rate"] == pytest.approx(1.0, abs=1e-12)


# quantiles

@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=50),
       st.sampled_from([0.25, 0.5, 0.75, 1.0]))
def test_quantile_matches_nearest_rank_oracle(values, p):
    assert nearest_rank_quantile(values, p) == nearest_rank(values, p)


def test_error_summary_shape():
    errors = [0.5, 0.1, 0.4, 0.2, 0.3]
    got = error_summary(errors)
    assert got == {
        "min": 0.1,
        "q1": nearest_rank(errors, 0.25),
        "median": nearest_rank(errors, 0.5),
        "q3": nearest_rank(errors, 0.75),
        "max": 0.5,
    }


# grids

def test_default_grid_contents():
    grid = default_grid()
    assert ADABOOST_SHRINKAGE == (0.01, 0.05, 0.1)
    assert ADABOOST_DEPTH == (2, 4, 6, 8)
    assert NB_LAPLACE == (0, 1)
    assert CART_CP == (0.01, 0.05, 0.1)
    assert CART_MINSPLIT == (5, 10, 15, 20)
    assert CART_MAXDEPTH == (2, 5, 10, 20)
    assert FOREST_NTREE == (250, 500, 1000, 2000)
    assert FOREST_MTRY == (2, 3, 4, 5)
    assert FOREST_MAXNODES == (3, 5, 8, 10, 15)
    assert len(grid.adaboost) == 12
    assert grid.adaboost[0] == (0.01, 2)
    assert grid.adaboost[1] == (0.01, 4)  # depth varies fastest
    assert len(grid.cart) == 48
    assert grid.cart[0] == (0.01, 5, 2)
    assert len(grid.random_forest) == 80
    assert grid.random_forest[0] == (250, 2, 3)
    assert grid.naive_bayes == ((0,), (1,))
    assert grid.logistic == ()


def test_desk_grid_only_trims_forest_trees():
    full, desk = default_grid(), desk_grid()
    assert FOREST_NTREE_DESK == (100, 250)
    assert desk.adaboost == full.adaboost
    assert desk.cart == full.cart
    assert desk.naive_bayes == full.naive_bayes
    assert {t[0] for t in desk.random_forest} == {100, 250}
    assert len(desk.random_forest) == 40


def test_params_of_names():
    assert params_of("adaboost", (0.1, 4)) == {"shrinkage": 0.1, "max_depth": 4}
    assert params_of("naive_bayes", (1,)) == {"laplace": 1}
    assert params_of("cart", (0.01, 5, 10)) == {"cp": 0.01, "minsplit": 5, "max_depth": 10}
    assert params_of("random_forest", (250, 3, 8)) == {
        "ntree": 250, "mtry": 3, "maxnodes": 8,
    }
    assert params_of("logistic", ()) == {}


# grid_search

def small_problem(small_table, owner="team-platform"):
    return make_binary_problem(small_table, owner)


def test_grid_search_singleton(small_table):
    problem = small_problem(small_table)
    plan = mccv_split(len(problem.labels), 0, 1729, problem.labels)
    grid = dataclasses.replace(default_grid(), cart=((0.01, 5, 10),))
    chosen, cv_error = grid_search(problem, plan, "cart", grid, 1729)
    assert chosen == (0.01, 5, 10)
    assert 0.0 <= cv_error <= 1.0


def test_grid_search_tie_prefers_first(small_table):
    # both cp values admit the same splits on this data, so cv errors tie
    problem = small_problem(small_table)
    plan = mccv_split(len(problem.labels), 1, 1729, problem.labels)
    grid = dataclasses.replace(default_grid(), cart=((0.01, 5, 10), (0.011, 5, 10)))
    chosen, _ = grid_search(problem, plan, "cart", grid, 1729)
    a, ea = grid_search(problem, plan, "cart",
                        dataclasses.replace(grid, cart=((0.01, 5, 10),)), 1729)
    b, eb = grid_search(problem, plan, "cart",
                        dataclasses.replace(grid, cart=((0.011, 5, 10),)), 1729)
    assert ea == eb  # premise: a genuine tie
    assert chosen == (0.01, 5, 10)


def test_grid_search_logistic_has_fixed_configuration(small_table):
    problem = small_problem(small_table)
    plan = mccv_split(len(problem.labels), 0, 1729, problem.labels)
    chosen, cv_error = grid_search(problem, plan, "logistic", default_grid(), 1729)
    assert chosen == ()
    assert 0.0 <= cv_error <= 1.0


# run_mccv

@pytest.fixture(scope="module")
def small_report(small_table):
    problem = make_binary_problem(small_table, "team-platform")
    return run_mccv(problem, grid=desk_grid(), iterations=4, master_seed=1729,
                    n_rounds=25), problem


def test_each_family_has_every_iteration(small_report):
    report, _ = small_report
    assert report.iterations == 4
    assert report.families == FAMILIES
    for family in FAMILIES:
        result = report.per_family[family]
        assert len(result.per_iteration) == 4
        assert [r.iteration for r in result.per_iteration] == [0, 1, 2, 3]


def test_aggregated_matrix_is_entrywise_sum(small_report):
    report, _ = small_report
    for family in FAMILIES:
        result = report.per_family[family]
        total = ConfusionMatrix(tp=0, fp=0, tn=0, fn=0)
        for rec in result.per_iteration:
            total = total + rec.confusion
        assert result.aggregated_confusion == total


def test_iteration_error_is_one_minus_accuracy(small_report):
    report, _ = small_report
    for family in FAMILIES:
        for rec in report.per_family[family].per_iteration:
            cm = rec.confusion
            assert rec.error == (cm.fp + cm.fn) / cm.total


def test_error_summary_matches_oracle(small_report):
    report, _ = small_report
    for family in FAMILIES:
        result = report.per_family[family]
        errors = [r.error for r in result.per_iteration]
        assert result.error_summary == {
            "min": min(errors),
            "q1": nearest_rank(errors, 0.25),
            "median": nearest_rank(errors, 0.5),
            "q3": nearest_rank(errors, 0.75),
            "max": max(errors),
        }


def test_mean_metrics_skip_nulls(small_report):
    report, _ = small_report
    for family in FAMILIES:
        result = report.per_family[family]
        for name, entry in result.mean_metrics.items():
            values = [
                metrics(r.confusion)[name]
                for r in result.per_iteration
            ]
            kept = [v for v in values if v is not None]
            assert entry["skipped"] == len(values) - len(kept)
            if kept:
                assert entry["mean"] == pytest.approx(sum(kept) / len(kept))
            else:
                assert entry["mean"] is None


def test_importance_only_for_tree_families(small_report):
    report, _ = small_report
    for family in ("adaboost", "cart", "random_forest"):
        imp = report.per_family[family].mean_importance
        assert imp is not None
        assert sum(imp.values()) == pytest.approx(1.0, abs=1e-9)
    for family in ("logistic", "naive_bayes"):
        assert report.per_family[family].mean_importance is None


def test_predictions_table_is_consistent(small_report):
    report, problem = small_report
    table = report.predictions
    assert table.owner == report.owner == "team-platform"
    n = len(table.row_ids)
    assert np.asarray(table.row_codes).shape == (n, len(table.columns))
    assert len(table.actual) == n
    slots = set(range(n))  # rows reference slots in row_ids/row_codes
    for it in table.iterations:
        assert set(it.labels) == set(FAMILIES)
        for labels in it.labels.values():
            assert len(labels) == len(it.rows)
        assert set(it.rows) <= slots
    # actual labels agree with the problem labels
    pos = {idx: lab for idx, lab in zip(problem.indices, problem.labels)}
    for rid, actual in zip(table.row_ids, table.actual):
        assert actual == pos[rid]


def test_report_deterministic_and_parallel_invariant(small_table):
    problem = make_binary_problem(small_table, "team-database")
    kwargs = dict(grid=desk_grid(), iterations=3, master_seed=99, n_rounds=20)
    a = run_mccv(problem, **kwargs)
    b = run_mccv(problem, **kwargs)
    c = run_mccv(problem, jobs=3, **kwargs)
    blob_a = canonical_json(run_report_to_dict(a))
    assert blob_a == canonical_json(run_report_to_dict(b))
    assert blob_a == canonical_json(run_report_to_dict(c))


def test_report_invariant_under_family_permutation(small_table):
    problem = make_binary_problem(small_table, "team-database")
    kwargs = dict(grid=desk_grid(), iterations=2, master_seed=5, n_rounds=15)
    fwd = run_mccv(problem, families=("cart", "naive_bayes"), **kwargs)
    rev = run_mccv(problem, families=("naive_bayes", "cart"), **kwargs)
    assert canonical_json(run_report_to_dict(fwd)) == canonical_json(run_report_to_dict(rev))
    assert fwd.families == ("naive_bayes", "cart") or fwd.families == rev.families


def test_run_mccv_rejects_zero_iterations(small_table):
    problem = make_binary_problem(small_table, "team-platform")
    with pytest.raises(ValueError):
        run_mccv(problem, iterations=0)
