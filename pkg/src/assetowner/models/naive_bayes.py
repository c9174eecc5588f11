"""Categorical conditional-independence classifier.

Priors are unsmoothed class fractions. Per-feature likelihoods use
(count + alpha) / (class_count + alpha * vocab_size). A category with zero
count in BOTH classes contributes nothing to either class (neutral skip,
applied at any alpha); unseen codes (-1) are skipped the same way. With
alpha = 0 a single-class zero zeroes that class's posterior; if both
posteriors vanish through different features, the prior majority decides
and the score falls back to the positive prior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dataset import Columns, encode_against


@dataclass(eq=False)
class NaiveBayesModel:
    columns: Columns
    alpha: float
    n_neg: int
    n_pos: int
    counts: tuple[np.ndarray, ...]

    @property
    def family(self) -> str:
        return "naive_bayes"

    @property
    def n(self) -> int:
        return self.n_neg + self.n_pos

    def hyperparameters(self) -> dict:
        return {"laplace": self.alpha}


def fit_naive_bayes(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    alpha: float,
) -> NaiveBayesModel:
    if alpha < 0:
        raise ValueError("laplace smoothing must be >= 0")
    y_bool = np.asarray(y).astype(bool)
    n_pos = int(y_bool.sum())
    n_neg = int(len(y_bool) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("training rows must contain both classes")
    counts = []
    for j, (_, vocab) in enumerate(columns):
        k = len(vocab)
        mat = np.zeros((2, k), dtype=np.int64)
        mat[0] = np.bincount(codes[~y_bool, j], minlength=k)
        mat[1] = np.bincount(codes[y_bool, j], minlength=k)
        counts.append(mat)
    return NaiveBayesModel(
        columns=columns, alpha=float(alpha), n_neg=n_neg, n_pos=n_pos,
        counts=tuple(counts),
    )


def nb_scores(model: NaiveBayesModel, codes_q: np.ndarray) -> np.ndarray:
    q = codes_q.shape[0]
    n = model.n
    lp_neg = np.full(q, np.log(model.n_neg / n))
    lp_pos = np.full(q, np.log(model.n_pos / n))
    for j, (_, vocab) in enumerate(model.columns):
        k = len(vocab)
        code = codes_q[:, j]
        valid = (code >= 0) & (code < k)
        safe = np.where(valid, code, 0)
        cn = model.counts[j][0][safe]
        cp = model.counts[j][1][safe]
        active = valid & ~((cn == 0) & (cp == 0))
        with np.errstate(divide="ignore"):
            ln = np.log((cn + model.alpha) / (model.n_neg + model.alpha * k))
            lp = np.log((cp + model.alpha) / (model.n_pos + model.alpha * k))
        lp_neg += np.where(active, ln, 0.0)
        lp_pos += np.where(active, lp, 0.0)
    both_dead = np.isneginf(lp_neg) & np.isneginf(lp_pos)
    with np.errstate(invalid="ignore"):
        scores = np.exp(lp_pos - np.logaddexp(lp_neg, lp_pos))
    return np.where(both_dead, model.n_pos / n, scores)


def nb_predict(model: NaiveBayesModel, codes_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = nb_scores(model, codes_q)
    return scores >= 0.5, scores


def nb_predict_rows(model: NaiveBayesModel, rows: Sequence) -> tuple[np.ndarray, np.ndarray]:
    return nb_predict(model, encode_against(model.columns, rows))
