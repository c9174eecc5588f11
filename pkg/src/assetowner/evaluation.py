"""The repeated-split evaluation protocol.

Per owner problem: for each of the (default 100) iterations, split
80/10/10, pick each family's hyperparameters by cross-validation error,
refit the winner on the training slice alone, and score the held-out test
slice. Aggregation sums confusion matrices entrywise and summarizes error
distributions with nearest-rank quantiles.

Family evaluators exploit structure without changing results (each
equivalence is property-tested against the naive fit-per-tuple path):

- boosting scores are invariant to the shrinkage value, so one fit per
  depth covers the whole shrinkage row of the grid;
- a tree grown under loose gates, re-gated per combination, is the tree
  grown under those combinations directly (gates only accept or reject the
  same greedy splits);
- best-first forests grown once at the largest (ntree, maxnodes) serve
  every smaller ntree by slicing trees and every smaller maxnodes by
  truncating at the expansion budget.

Iterations are independent; randomness is keyed by (master seed,
iteration, family, tree index), so thread-parallel execution is
byte-identical to serial.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .dataset import MIN_POSITIVES, BinaryProblem, Columns, SplitPlan, mccv_split
from .models import (
    FAMILIES,
    IMPORTANCE_FAMILIES,
    adaboost as _ab,
    forest as _rf,
    logistic as _lg,
    naive_bayes as _nb,
    normalize_importance,
    trees as _tr,
)

DEFAULT_ITERATIONS = 100
DEFAULT_SEED = 1729

METRIC_NAMES = ("accuracy", "error_rate", "sensitivity", "specificity", "precision", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fp + other.fp,
            self.tn + other.tn, self.fn + other.fn,
        )

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(preds: Sequence[bool], actuals: Sequence[bool]) -> ConfusionMatrix:
    """2x2 contingency counts; positive means owned by the target owner."""
    p = np.asarray(preds, dtype=bool)
    a = np.asarray(actuals, dtype=bool)
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.shape[0]} predictions vs {a.shape[0]} actuals")
    if p.size == 0:
        raise ValueError("empty prediction vector")
    return ConfusionMatrix(
        tp=int(np.sum(p & a)),
        fp=int(np.sum(p & ~a)),
        tn=int(np.sum(~p & ~a)),
        fn=int(np.sum(~p & a)),
    )


def metrics(cm: ConfusionMatrix) -> dict:
    """MetricSet as a dict; zero-denominator entries are None, never 0."""
    total = cm.total
    if total <= 0:
        raise ValueError("metrics of an empty confusion matrix")

    def ratio(num: int, den: int):
        return num / den if den > 0 else None

    accuracy = (cm.tp + cm.tn) / total
    sensitivity = ratio(cm.tp, cm.tp + cm.fn)
    precision = ratio(cm.tp, cm.tp + cm.fp)
    if sensitivity is None or precision is None or (precision + sensitivity) == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * sensitivity / (precision + sensitivity)
    return {
        "accuracy": accuracy,
        "error_rate": (cm.fp + cm.fn) / total,
        "sensitivity": sensitivity,
        "specificity": ratio(cm.tn, cm.tn + cm.fp),
        "precision": precision,
        "f1": f1,
    }


def nearest_rank_quantile(values: Sequence[float], p: float) -> float:
    """Nearest-rank quantile: the ceil(p*n)-th smallest value (1-indexed)."""
    if not 0 < p <= 1:
        raise ValueError("quantile level must be in (0, 1]")
    ordered = sorted(values)
    if not ordered:
        raise ValueError("quantile of empty sequence")
    rank = max(1, math.ceil(p * len(ordered)))
    return ordered[rank - 1]


def error_summary(errors: Sequence[float]) -> dict:
    ordered = sorted(errors)
    return {
        "min": ordered[0],
        "q1": nearest_rank_quantile(ordered, 0.25),
        "median": nearest_rank_quantile(ordered, 0.50),
        "q3": nearest_rank_quantile(ordered, 0.75),
        "max": ordered[-1],
    }


# ---------------------------------------------------------------------------
# hyperparameter grids


@dataclass(frozen=True)
class HyperGrid:
    """Per-family hyperparameter tuples in their declared enumeration order
    (ties in grid search resolve to the earliest position)."""

    adaboost: tuple = ()
    naive_bayes: tuple = ()
    cart: tuple = ()
    random_forest: tuple = ()
    logistic: tuple = ()

    def for_family(self, family: str) -> tuple:
        if family not in FAMILIES:
            raise KeyError(f"unknown family: {family!r}")
        return getattr(self, family)


ADABOOST_SHRINKAGE = (0.01, 0.05, 0.1)
ADABOOST_DEPTH = (2, 4, 6, 8)
NB_LAPLACE = (0, 1)
CART_CP = (0.01, 0.05, 0.1)
CART_MINSPLIT = (5, 10, 15, 20)
CART_MAXDEPTH = (2, 5, 10, 20)
FOREST_NTREE = (250, 500, 1000, 2000)
FOREST_NTREE_DESK = (100, 250)
FOREST_MTRY = (2, 3, 4, 5)
FOREST_MAXNODES = (3, 5, 8, 10, 15)


def _product(*ranges):
    out = [()]
    for r in ranges:
        out = [t + (v,) for t in out for v in r]
    return tuple(out)


def default_grid() -> HyperGrid:
    return HyperGrid(
        adaboost=_product(ADABOOST_SHRINKAGE, ADABOOST_DEPTH),
        naive_bayes=_product(NB_LAPLACE),
        cart=_product(CART_CP, CART_MINSPLIT, CART_MAXDEPTH),
        random_forest=_product(FOREST_NTREE, FOREST_MTRY, FOREST_MAXNODES),
        logistic=(),
    )


def desk_grid() -> HyperGrid:
    """Budget profile: identical except ntree is trimmed to {100, 250}."""
    return replace(
        default_grid(),
        random_forest=_product(FOREST_NTREE_DESK, FOREST_MTRY, FOREST_MAXNODES),
    )


def params_of(family: str, chosen: tuple) -> dict:
    if family == "adaboost":
        return {"shrinkage": chosen[0], "max_depth": chosen[1]}
    if family == "naive_bayes":
        return {"laplace": chosen[0]}
    if family == "cart":
        return {"cp": chosen[0], "minsplit": chosen[1], "max_depth": chosen[2]}
    if family == "random_forest":
        return {"ntree": chosen[0], "mtry": chosen[1], "maxnodes": chosen[2]}
    if family == "logistic":
        return {}
    raise KeyError(f"unknown family: {family!r}")


# ---------------------------------------------------------------------------
# per-family iteration evaluators


@dataclass(eq=False)
class FamilyIteration:
    """One family's outcome for one split plan."""

    family: str
    chosen: tuple
    cv_errors: tuple
    cv_error: float
    confusion: ConfusionMatrix
    error: float
    test_labels: np.ndarray
    importance: np.ndarray | None


def _misclassification(labels: np.ndarray, truth: np.ndarray) -> float:
    return float(np.mean(labels != truth))


def _argmin_first(errors: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(errors)):
        if errors[i] < errors[best]:
            best = i
    return best


def _eval_adaboost(
    columns: Columns, codes: np.ndarray, y: np.ndarray,
    train: np.ndarray, cv: np.ndarray, test: np.ndarray,
    grid: tuple, n_rounds: int,
) -> FamilyIteration:
    codes_train = codes[train]
    y_train = y[train].astype(np.uint8)
    depths = []
    for _, d in grid:
        if d not in depths:
            depths.append(d)
    fits = {
        d: _ab.fit_adaboost(
            columns, codes_train, y_train,
            shrinkage=grid[0][0], max_depth=d, n_rounds=n_rounds,
        )
        for d in depths
    }
    cv_codes = codes[cv]
    y_cv = y[cv]
    cv_err_by_depth = {}
    for d, model in fits.items():
        labels, _ = _ab.boost_predict(model, cv_codes)
        cv_err_by_depth[d] = _misclassification(labels, y_cv)
    # scores are shrinkage-invariant, so every shrinkage shares its depth's error
    cv_errors = tuple(cv_err_by_depth[d] for _, d in grid)
    best = _argmin_first(cv_errors)
    chosen = grid[best]
    model = replace(fits[chosen[1]], shrinkage=chosen[0])
    test_labels, _ = _ab.boost_predict(model, codes[test])
    cm = confusion(test_labels, y[test])
    return FamilyIteration(
        family="adaboost", chosen=chosen, cv_errors=cv_errors,
        cv_error=cv_errors[best], confusion=cm,
        error=_misclassification(test_labels, y[test]),
        test_labels=test_labels,
        importance=normalize_importance(model.importance_raw),
    )


def _eval_logistic(
    columns: Columns, codes: np.ndarray, y: np.ndarray,
    train: np.ndarray, cv: np.ndarray, test: np.ndarray,
) -> FamilyIteration:
    model = _lg.fit_logistic(columns, codes[train], y[train].astype(np.uint8))
    cv_labels, _ = _lg.logistic_predict(model, codes[cv])
    test_labels, _ = _lg.logistic_predict(model, codes[test])
    cm = confusion(test_labels, y[test])
    return FamilyIteration(
        family="logistic", chosen=(), cv_errors=(),
        cv_error=_misclassification(cv_labels, y[cv]),
        confusion=cm, error=_misclassification(test_labels, y[test]),
        test_labels=test_labels, importance=None,
    )


def _eval_naive_bayes(
    columns: Columns, codes: np.ndarray, y: np.ndarray,
    train: np.ndarray, cv: np.ndarray, test: np.ndarray,
    grid: tuple,
) -> FamilyIteration:
    codes_train = codes[train]
    y_train = y[train].astype(np.uint8)
    fits = {t: _nb.fit_naive_bayes(columns, codes_train, y_train, alpha=t[0]) for t in grid}
    cv_codes = codes[cv]
    y_cv = y[cv]
    cv_errors = []
    for t in grid:
        labels, _ = _nb.nb_predict(fits[t], cv_codes)
        cv_errors.append(_misclassification(labels, y_cv))
    best = _argmin_first(cv_errors)
    chosen = grid[best]
    test_labels, _ = _nb.nb_predict(fits[chosen], codes[test])
    cm = confusion(test_labels, y[test])
    return FamilyIteration(
        family="naive_bayes", chosen=chosen, cv_errors=tuple(cv_errors),
        cv_error=cv_errors[best], confusion=cm,
        error=_misclassification(test_labels, y[test]),
        test_labels=test_labels, importance=None,
    )


def _eval_cart(
    columns: Columns, codes: np.ndarray, y: np.ndarray,
    train: np.ndarray, cv: np.ndarray, test: np.ndarray,
    grid: tuple,
) -> FamilyIteration:
    loose_cp = min(t[0] for t in grid)
    loose_ms = min(t[1] for t in grid)
    loose_md = max(t[2] for t in grid)
    model = _tr.fit_cart(
        columns, codes[train], y[train].astype(np.uint8),
        cp=loose_cp, minsplit=loose_ms, max_depth=loose_md,
    )
    vocab_sizes = _tr.vocab_sizes_of(columns)
    cv_codes = codes[cv]
    y_cv = y[cv]
    masks = {}
    cv_errors = []
    for t in grid:
        cp, ms, md = t
        mask = _tr.prune_mask(model.pool, model.root_gini, cp=cp, minsplit=ms, max_depth=md)
        masks[t] = mask
        labels, _ = _tr.route_pruned(model.pool, vocab_sizes, mask, cv_codes)
        cv_errors.append(_misclassification(labels.astype(bool), y_cv))
    best = _argmin_first(cv_errors)
    chosen = grid[best]
    mask = masks[chosen]
    test_labels, _ = _tr.route_pruned(model.pool, vocab_sizes, mask, codes[test])
    test_labels = test_labels.astype(bool)
    cm = confusion(test_labels, y[test])
    # importance counts only splits reachable under the chosen gates
    reach = _tr.reachable_mask(model.pool, mask)
    imp = np.zeros(len(columns), dtype=np.float64)
    nn = int(model.pool.n_nodes[0])
    for node in range(nn):
        if reach[node]:
            imp[int(model.pool.feature[node])] += float(model.pool.decrease[node])
    return FamilyIteration(
        family="cart", chosen=chosen, cv_errors=tuple(cv_errors),
        cv_error=cv_errors[best], confusion=cm,
        error=_misclassification(test_labels, y[test]),
        test_labels=test_labels, importance=normalize_importance(imp),
    )


def _eval_random_forest(
    columns: Columns, codes: np.ndarray, y: np.ndarray,
    train: np.ndarray, cv: np.ndarray, test: np.ndarray,
    grid: tuple, seed_key: tuple,
) -> FamilyIteration:
    codes_train = codes[train]
    y_train = y[train].astype(np.uint8)
    vocab_sizes = _tr.vocab_sizes_of(columns)
    cv_codes = codes[cv]
    y_cv = y[cv]

    ntrees = sorted({t[0] for t in grid})
    budgets = sorted({t[2] for t in grid})
    mtrys = []
    for _, m, _ in grid:
        if m not in mtrys:
            mtrys.append(m)
    max_ntree = ntrees[-1]
    max_budget = budgets[-1]
    tree_seeds = _rf.tree_seeds_for(seed_key, max_ntree)

    err_by_combo: dict[tuple, float] = {}
    pools: dict[int, object] = {}
    for m in mtrys:
        pool = _rf.grow_ensemble(
            columns, codes_train, y_train,
            ntree=max_ntree, mtry=m, maxnodes=max_budget, tree_seeds=tree_seeds,
        )
        pools[m] = pool
        votes = np.zeros((cv_codes.shape[0], len(budgets)), dtype=np.int32)
        t_prev = 0
        for cut in ntrees:
            _rf.forest_votes(pool, vocab_sizes, cv_codes, budgets, t_prev, cut, votes)
            t_prev = cut
            for bi, b in enumerate(budgets):
                labels = votes[:, bi].astype(np.float64) / cut >= 0.5
                err_by_combo[(cut, m, b)] = _misclassification(labels, y_cv)

    cv_errors = tuple(err_by_combo[t] for t in grid)
    best = _argmin_first(cv_errors)
    chosen = grid[best]
    ntree_c, mtry_c, budget_c = chosen
    pool = pools[mtry_c]
    votes_test = _rf.forest_votes(pool, vocab_sizes, codes[test], [budget_c], 0, ntree_c)
    scores = votes_test[:, 0].astype(np.float64) / ntree_c
    test_labels = scores >= 0.5
    cm = confusion(test_labels, y[test])
    imp = _rf.forest_importance_grid(pool, len(columns), [budget_c], 0, ntree_c)[0]
    return FamilyIteration(
        family="random_forest", chosen=chosen, cv_errors=cv_errors,
        cv_error=cv_errors[best], confusion=cm,
        error=_misclassification(test_labels, y[test]),
        test_labels=test_labels, importance=normalize_importance(imp),
    )


def _evaluate_family(
    family: str, columns: Columns, codes: np.ndarray, y: np.ndarray,
    plan: SplitPlan, grid: HyperGrid, master_seed: int, n_rounds: int,
) -> FamilyIteration:
    train = np.asarray(plan.train, dtype=np.int64)
    cv = np.asarray(plan.cv, dtype=np.int64)
    test = np.asarray(plan.test, dtype=np.int64)
    if family == "adaboost":
        return _eval_adaboost(columns, codes, y, train, cv, test, grid.adaboost, n_rounds)
    if family == "logistic":
        return _eval_logistic(columns, codes, y, train, cv, test)
    if family == "naive_bayes":
        return _eval_naive_bayes(columns, codes, y, train, cv, test, grid.naive_bayes)
    if family == "cart":
        return _eval_cart(columns, codes, y, train, cv, test, grid.cart)
    if family == "random_forest":
        seed_key = (master_seed, plan.iteration, "random_forest")
        return _eval_random_forest(
            columns, codes, y, train, cv, test, grid.random_forest, seed_key
        )
    raise KeyError(f"unknown family: {family!r}")


def grid_search(
    problem: BinaryProblem,
    plan: SplitPlan,
    family: str,
    grid: HyperGrid,
    seed: int,
) -> tuple[tuple, float]:
    """Fit every grid tuple on the plan's train slice, score CV
    misclassification, return (winning tuple, its cv error); ties go to the
    earliest tuple in enumeration order. Logistic has no grid and returns
    its fixed configuration ()."""
    if family != "logistic" and not grid.for_family(family):
        raise ValueError(f"empty grid for family {family!r}")
    codes = problem.table.codes[np.asarray(problem.indices, dtype=np.int64)]
    y = np.asarray(problem.labels, dtype=bool)
    _check_slices(plan, y)
    outcome = _evaluate_family(
        family, problem.table.columns, codes, y, plan, grid, seed, _ab.N_ROUNDS
    )
    return outcome.chosen, outcome.cv_error


def _check_slices(plan: SplitPlan, y: np.ndarray) -> None:
    for name, part in (("train", plan.train), ("cv", plan.cv), ("test", plan.test)):
        part_y = y[np.asarray(part, dtype=np.int64)]
        if part_y.all() or not part_y.any():
            raise RuntimeError(
                f"iteration {plan.iteration}: {name} slice is single-class "
                f"({int(part_y.sum())} of {len(part_y)} positive); "
                "stratification could not balance this split"
            )


# ---------------------------------------------------------------------------
# the full protocol


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    chosen: dict
    confusion: ConfusionMatrix
    error: float


@dataclass(frozen=True)
class FamilyResult:
    per_iteration: tuple
    aggregated_confusion: ConfusionMatrix
    aggregated_metrics: dict
    mean_metrics: dict
    error_summary: dict
    mean_importance: dict | None


@dataclass(frozen=True)
class PredictionIteration:
    iteration: int
    rows: tuple
    labels: Mapping[str, tuple]


@dataclass(frozen=True)
class PredictionsTable:
    """Columnar per-iteration test predictions, self-contained for the
    dashboard: row features ride along as vocabulary codes."""

    owner: str
    columns: Columns
    row_ids: tuple
    row_codes: tuple
    actual: tuple
    iterations: tuple


@dataclass(frozen=True)
class RunReport:
    owner: str
    master_seed: int
    iterations: int
    families: tuple
    config: dict
    n_rows: int
    n_positive: int
    per_family: Mapping[str, FamilyResult]
    predictions: PredictionsTable


def _grid_to_config(grid: HyperGrid) -> dict:
    return {
        family: [list(t) for t in grid.for_family(family)]
        for family in FAMILIES
    }


def run_mccv(
    problem: BinaryProblem,
    families: Sequence[str] = FAMILIES,
    grid: HyperGrid | None = None,
    iterations: int = DEFAULT_ITERATIONS,
    master_seed: int = DEFAULT_SEED,
    *,
    n_rounds: int = _ab.N_ROUNDS,
    jobs: int = 1,
) -> RunReport:
    """Run the whole protocol for one owner problem.

    Deterministic in (problem, families set, grid, iterations, master_seed);
    jobs only changes wall time. Aborts with a diagnostic if any slice of
    any iteration ends up single-class.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    for family in families:
        if family not in FAMILIES:
            raise KeyError(f"unknown family: {family!r}")
    # canonical order: the report must not depend on how the caller listed
    # the families
    wanted = set(families)
    families = tuple(f for f in FAMILIES if f in wanted)
    if grid is None:
        grid = default_grid()
    for family in families:
        if family != "logistic" and not grid.for_family(family):
            raise ValueError(f"empty grid for family {family!r}")

    columns = problem.table.columns
    indices = np.asarray(problem.indices, dtype=np.int64)
    codes = np.ascontiguousarray(problem.table.codes[indices])
    y = np.asarray(problem.labels, dtype=bool)
    labels_list = [bool(v) for v in y]

    def one_iteration(it: int) -> dict[str, FamilyIteration]:
        plan = mccv_split(problem.n, it, master_seed, labels_list)
        _check_slices(plan, y)
        return {
            "plan": plan,
            **{
                family: _evaluate_family(
                    family, columns, codes, y, plan, grid, master_seed, n_rounds
                )
                for family in families
            },
        }

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one_iteration, range(iterations)))
    else:
        outcomes = [one_iteration(it) for it in range(iterations)]

    per_family = {}
    for family in families:
        records = []
        importances = []
        iteration_metrics = []
        agg = ConfusionMatrix(0, 0, 0, 0)
        for it, outcome in enumerate(outcomes):
            fi: FamilyIteration = outcome[family]
            records.append(
                IterationRecord(
                    iteration=it,
                    chosen=params_of(family, fi.chosen),
                    confusion=fi.confusion,
                    error=fi.error,
                )
            )
            agg = agg + fi.confusion
            iteration_metrics.append(metrics(fi.confusion))
            if fi.importance is not None:
                importances.append(fi.importance)
        mean_metrics = {}
        for name in METRIC_NAMES:
            values = [m[name] for m in iteration_metrics if m[name] is not None]
            skipped = len(iteration_metrics) - len(values)
            mean_metrics[name] = {
                "mean": (sum(values) / len(values)) if values else None,
                "skipped": skipped,
            }
        mean_importance = None
        if importances:
            stacked = np.mean(np.stack(importances), axis=0)
            mean_importance = {
                name: float(v) for (name, _), v in zip(columns, stacked)
            }
        per_family[family] = FamilyResult(
            per_iteration=tuple(records),
            aggregated_confusion=agg,
            aggregated_metrics=metrics(agg),
            mean_metrics=mean_metrics,
            error_summary=error_summary([r.error for r in records]),
            mean_importance=mean_importance,
        )

    # columnar predictions: global row ids, static actual labels, and
    # per-iteration per-family predicted labels over each test slice
    seen: set[int] = set()
    for outcome in outcomes:
        seen.update(outcome["plan"].test)
    positions = sorted(seen)
    pos_to_slot = {p: i for i, p in enumerate(positions)}
    row_ids = tuple(int(indices[p]) for p in positions)
    row_codes = tuple(tuple(int(v) for v in codes[p]) for p in positions)
    actual = tuple(int(y[p]) for p in positions)
    pred_iters = []
    for it, outcome in enumerate(outcomes):
        plan: SplitPlan = outcome["plan"]
        rows = tuple(pos_to_slot[p] for p in plan.test)
        labels = {
            family: tuple(int(v) for v in outcome[family].test_labels)
            for family in families
        }
        pred_iters.append(PredictionIteration(iteration=it, rows=rows, labels=labels))

    predictions = PredictionsTable(
        owner=problem.target_owner,
        columns=columns,
        row_ids=row_ids,
        row_codes=row_codes,
        actual=actual,
        iterations=tuple(pred_iters),
    )

    config = {
        "grid": _grid_to_config(grid),
        "n_rounds": n_rounds,
        "min_positives": MIN_POSITIVES,
    }

    return RunReport(
        owner=problem.target_owner,
        master_seed=master_seed,
        iterations=iterations,
        families=families,
        config=config,
        n_rows=problem.n,
        n_positive=int(y.sum()),
        per_family=per_family,
        predictions=predictions,
    )
