"""Bootstrap ensemble of best-first weighted trees with per-node feature
sampling. Prediction is majority vote; the score is the positive-vote
fraction. Importance is the total Gini decrease per feature over all trees.

Trees grow best-first with node ids in creation order, so one ensemble
grown at the largest leaf budget answers queries for every smaller budget
(truncate by expansion index) and every smaller tree count (slice the tree
axis). fit_random_forest grows exactly to the requested budget; the
evaluation layer exploits the prefix property separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from .trees import TreePool, alloc_pool, lut_capacity, vocab_sizes_of
from ..dataset import Columns, encode_against
from ..seeding import splitmix64, u64_from


@dataclass(eq=False)
class ForestModel:
    columns: Columns
    ntree: int
    mtry: int
    maxnodes: int
    seed_key: tuple
    tree_seeds: np.ndarray
    pool: TreePool

    @property
    def family(self) -> str:
        return "random_forest"

    def hyperparameters(self) -> dict:
        return {"ntree": self.ntree, "mtry": self.mtry, "maxnodes": self.maxnodes}


def tree_seeds_for(seed_key: tuple, ntree: int) -> np.ndarray:
    """Per-tree uint64 streams: one hash for the ensemble, one splitmix64
    step per tree. Tree t's stream never depends on ntree, so a longer
    ensemble extends a shorter one."""
    state = u64_from(*seed_key)
    seeds = np.empty(ntree, dtype=np.uint64)
    for t in range(ntree):
        state, z = splitmix64(state)
        seeds[t] = np.uint64(z)
    return seeds


def grow_ensemble(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    ntree: int,
    mtry: int,
    maxnodes: int,
    tree_seeds: np.ndarray,
) -> TreePool:
    if mtry > len(columns):
        raise ValueError(
            f"mtry={mtry} exceeds the {len(columns)} available features"
        )
    vocab_sizes = vocab_sizes_of(columns)
    max_expansions = max(maxnodes - 1, 1)
    cap_nodes = 2 * max_expansions + 1
    cap_lut = lut_capacity(vocab_sizes, max_expansions)
    pool = alloc_pool(ntree, cap_nodes, cap_lut)
    lut_used = np.zeros(ntree, dtype=np.int64)
    _kernel.grow_forest(
        codes, y, vocab_sizes,
        ntree, mtry, max_expansions, tree_seeds,
        pool.feature, pool.split_at, pool.left_child, pool.right_child,
        pool.parent, pool.depth, pool.pred, pool.frac, pool.node_w,
        pool.node_count, pool.decrease, pool.lut_offset, pool.lut_pool,
        pool.n_nodes, lut_used,
        cap_nodes, cap_lut,
    )
    return pool


def fit_random_forest(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    ntree: int,
    mtry: int,
    maxnodes: int,
    seed_key: tuple,
) -> ForestModel:
    tree_seeds = tree_seeds_for(seed_key, ntree)
    pool = grow_ensemble(
        columns, codes, y,
        ntree=ntree, mtry=mtry, maxnodes=maxnodes, tree_seeds=tree_seeds,
    )
    return ForestModel(
        columns=columns, ntree=ntree, mtry=mtry, maxnodes=maxnodes,
        seed_key=seed_key, tree_seeds=tree_seeds, pool=pool,
    )


def forest_votes(
    pool: TreePool,
    vocab_sizes: np.ndarray,
    codes_q: np.ndarray,
    budgets: Sequence[int],
    t0: int = 0,
    t1: int | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Positive votes per (row, budget) over trees [t0, t1); budgets must be
    ascending maxnodes values. Accumulates into out when given."""
    budgets_arr = np.asarray(budgets, dtype=np.int64)
    if t1 is None:
        t1 = pool.n_trees
    if out is None:
        out = np.zeros((codes_q.shape[0], len(budgets_arr)), dtype=np.int32)
    _kernel.forest_votes(
        codes_q, t0, t1, budgets_arr,
        pool.feature, pool.split_at, pool.left_child, pool.right_child,
        pool.lut_offset, pool.lut_pool, vocab_sizes, pool.pred,
        pool.cap_nodes, pool.cap_lut,
        out,
    )
    return out


def forest_importance_grid(
    pool: TreePool,
    n_features: int,
    budgets: Sequence[int],
    t0: int = 0,
    t1: int | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Raw decrease sums per (budget, feature) over trees [t0, t1)."""
    budgets_arr = np.asarray(budgets, dtype=np.int64)
    if t1 is None:
        t1 = pool.n_trees
    if out is None:
        out = np.zeros((len(budgets_arr), n_features), dtype=np.float64)
    _kernel.forest_importance(
        t0, t1, budgets_arr,
        pool.feature, pool.split_at, pool.decrease, pool.n_nodes,
        pool.cap_nodes,
        out,
    )
    return out


def forest_predict(model: ForestModel, codes_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vocab_sizes = vocab_sizes_of(model.columns)
    votes = forest_votes(model.pool, vocab_sizes, codes_q, [model.maxnodes])
    scores = votes[:, 0].astype(np.float64) / model.ntree
    return scores >= 0.5, scores


def forest_predict_rows(model: ForestModel, rows: Sequence) -> tuple[np.ndarray, np.ndarray]:
    return forest_predict(model, encode_against(model.columns, rows))


def forest_importance(model: ForestModel) -> np.ndarray:
    imp = forest_importance_grid(model.pool, len(model.columns), [model.maxnodes])
    return imp[0]
