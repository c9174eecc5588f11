"""Discrete reweighting boosting over depth-bounded weighted trees.

Round m earns coefficient alpha_m = shrinkage * ln((1 - eps_m)/eps_m) and
misclassified rows are reweighted by exp(alpha_m/shrinkage), which equals
(1 - eps_m)/eps_m. The shrinkage therefore cancels out of the weight
trajectory and out of the normalized margin sum(alpha h)/sum(alpha): models
fit at different shrinkage values share trees, errors, and scores bit for
bit. Scores are sigma(2 * margin).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from .trees import TreePool, alloc_pool, lut_capacity, vocab_sizes_of
from ..dataset import Columns, encode_against

N_ROUNDS = 100

STOP_REASONS = {
    0: "rounds_exhausted",
    1: "zero_training_error",
    2: "error_at_half",
    3: "degenerate_first_round",
}


@dataclass(eq=False)
class BoostModel:
    columns: Columns
    shrinkage: float
    max_depth: int
    n_rounds: int
    rounds: int
    stop_reason: str
    raw_alpha: np.ndarray
    eps: np.ndarray
    pool: TreePool
    importance_raw: np.ndarray

    @property
    def family(self) -> str:
        return "adaboost"

    @property
    def alpha(self) -> np.ndarray:
        return self.shrinkage * self.raw_alpha

    def hyperparameters(self) -> dict:
        return {
            "shrinkage": self.shrinkage,
            "max_depth": self.max_depth,
            "n_rounds": self.n_rounds,
        }


def fit_adaboost(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    shrinkage: float,
    max_depth: int,
    n_rounds: int = N_ROUNDS,
) -> BoostModel:
    y = np.asarray(y)
    if y.min() == y.max():
        raise ValueError("boosting needs both classes in the training data")
    vocab_sizes = vocab_sizes_of(columns)
    cap_nodes = 2 ** (max_depth + 1) - 1
    cap_lut = lut_capacity(vocab_sizes, 2 ** max_depth - 1)
    pool = alloc_pool(n_rounds, cap_nodes, cap_lut)
    raw_alpha = np.zeros(n_rounds, dtype=np.float64)
    eps = np.zeros(n_rounds, dtype=np.float64)
    imp = np.zeros(len(columns), dtype=np.float64)
    rounds, stop = _kernel.fit_boost(
        codes, y, vocab_sizes, max_depth, n_rounds,
        pool.feature, pool.split_at, pool.left_child, pool.right_child,
        pool.parent, pool.depth, pool.pred, pool.frac, pool.node_w,
        pool.node_count, pool.decrease, pool.lut_offset, pool.lut_pool,
        cap_nodes, cap_lut,
        pool.n_nodes, raw_alpha, eps, imp,
    )
    rounds = int(rounds)
    kept = TreePool(
        n_trees=rounds,
        cap_nodes=cap_nodes,
        cap_lut=cap_lut,
        n_nodes=pool.n_nodes[:rounds].copy(),
        lut_pool=pool.lut_pool[: rounds * cap_lut].copy(),
        **{
            name: getattr(pool, name)[: rounds * cap_nodes].copy()
            for name in (
                "feature", "split_at", "left_child", "right_child", "parent",
                "depth", "pred", "frac", "node_w", "node_count", "decrease",
                "lut_offset",
            )
        },
    )
    return BoostModel(
        columns=columns,
        shrinkage=shrinkage,
        max_depth=max_depth,
        n_rounds=n_rounds,
        rounds=rounds,
        stop_reason=STOP_REASONS[int(stop)],
        raw_alpha=raw_alpha[:rounds].copy(),
        eps=eps[:rounds].copy(),
        pool=kept,
        importance_raw=imp,
    )


def boost_margins(model: BoostModel, codes_q: np.ndarray) -> np.ndarray:
    """Normalized margin in [-1, 1] per query row."""
    margins = np.zeros(codes_q.shape[0], dtype=np.float64)
    if model.rounds == 0:
        return margins
    _kernel.boost_margins(
        codes_q, model.rounds, model.raw_alpha,
        model.pool.feature, model.pool.split_at, model.pool.left_child,
        model.pool.right_child, model.pool.lut_offset, model.pool.lut_pool,
        vocab_sizes_of(model.columns), model.pool.pred,
        model.pool.cap_nodes, model.pool.cap_lut,
        margins,
    )
    return margins


def boost_predict(model: BoostModel, codes_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    margins = boost_margins(model, codes_q)
    scores = 1.0 / (1.0 + np.exp(-2.0 * margins))
    return scores >= 0.5, scores


def boost_predict_rows(model: BoostModel, rows: Sequence) -> tuple[np.ndarray, np.ndarray]:
    return boost_predict(model, encode_against(model.columns, rows))


def boost_importance(model: BoostModel) -> np.ndarray:
    """Raw Gini decrease per feature, summed over every kept round's tree."""
    return model.importance_raw.copy()
