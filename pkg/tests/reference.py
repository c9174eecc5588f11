"""Independent reference implementations used as test oracles.

Everything in this module is written for clarity, not speed: exhaustive
search instead of the positive-rate ordering trick, exact rationals
instead of floats, counting instead of vectorized math.  Test files
compare the package's fast implementations against these.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

# Release-gate lines collected by tests/test_acceptance.py; a terminal
# summary hook in conftest.py prints them after the run so they stay
# visible under output capture.
GATE_LINES: list[str] = []

# Published splitmix64 stream for seed 0 (Vigna's reference C code).
SPLITMIX64_SEED0 = (
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
    0xF88BB8A8724C81EC,
    0x1B39896A51A8749B,
)


def gini_sum(w_pos: float, w_all: float) -> float:
    if w_all <= 0.0:
        return 0.0
    return 2.0 * w_pos * (w_all - w_pos) / w_all


def brute_stump(codes: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Exhaustive best binary split over all (feature, category subset) pairs.

    Returns (decrease, feature, left_subset) for the best proper split of
    the categories present in the data, or (0.0, None, None) when no split
    helps.  Subsets are enumerated exhaustively, 2^(p-1) per feature, so
    keep the inputs small.
    """
    w = np.asarray(w, dtype=float)
    total = float(w.sum())
    pos = float(w[y == 1].sum())
    root = gini_sum(pos, total)
    best_dec = 0.0
    best = (0.0, None, None)
    for f in range(codes.shape[1]):
        present = sorted(set(int(c) for c in codes[:, f]))
        for r in range(1, len(present)):
            for subset in itertools.combinations(present, r):
                mask = np.isin(codes[:, f], subset)
                wl = float(w[mask].sum())
                wr = total - wl
                if wl <= 0.0 or wr <= 0.0:
                    continue
                pl = float(w[mask & (y == 1)].sum())
                pr = pos - pl
                dec = root - gini_sum(pl, wl) - gini_sum(pr, wr)
                if dec > best_dec:
                    best_dec = dec
                    best = (dec, f, frozenset(subset))
    return best


def nb_posterior_exact(
    train_codes: np.ndarray,
    labels: np.ndarray,
    vocab_sizes: list[int],
    alpha: int,
    query: list[int],
) -> Fraction:
    """Exact-rational naive Bayes positive posterior for one query row.

    Mirrors the documented prediction rule: unsmoothed priors, additive
    smoothing with the column vocabulary size, a factor skipped entirely
    when the value was seen in neither class (or is out of vocabulary),
    and a fall-back to the positive prior when both class posteriors
    vanish.
    """
    n = len(labels)
    n_pos = int(labels.sum())
    n_neg = n - n_pos
    post_pos = Fraction(n_pos, n)
    post_neg = Fraction(n_neg, n)
    for j, v in enumerate(query):
        k = vocab_sizes[j]
        if v < 0 or v >= k:
            continue
        col = train_codes[:, j]
        cnt_pos = int(((col == v) & (labels == 1)).sum())
        cnt_neg = int(((col == v) & (labels == 0)).sum())
        if cnt_pos == 0 and cnt_neg == 0:
            continue
        post_pos *= Fraction(cnt_pos + alpha, n_pos + alpha * k)
        post_neg *= Fraction(cnt_neg + alpha, n_neg + alpha * k)
    if post_pos == 0 and post_neg == 0:
        return Fraction(n_pos, n)
    return post_pos / (post_pos + post_neg)


def count_metrics(tp: int, fp: int, tn: int, fn: int) -> dict:
    """Metric set from plain counting with exact rationals; None marks 0/0."""
    total = tp + fp + tn + fn

    def ratio(num, den):
        return None if den == 0 else Fraction(num, den)

    acc = ratio(tp + tn, total)
    sens = ratio(tp, tp + fn)
    spec = ratio(tn, tn + fp)
    prec = ratio(tp, tp + fp)
    if prec is None or sens is None or prec + sens == 0:
        f1 = None
    else:
        f1 = 2 * prec * sens / (prec + sens)
    return {
        "accuracy": acc,
        "error_rate": None if acc is None else 1 - acc,
        "sensitivity": sens,
        "specificity": spec,
        "precision": prec,
        "f1": f1,
    }


def nearest_rank(values, p: float) -> float:
    """ceil(p*n)-th smallest value, 1-indexed; p=0 maps to the minimum."""
    ordered = sorted(values)
    if p <= 0.0:
        return ordered[0]
    rank = math.ceil(p * len(ordered))
    return ordered[rank - 1]


def central_difference_grad(fn, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function, one coordinate at a time."""
    out = np.empty_like(x, dtype=float)
    for i in range(x.size):
        step = np.zeros_like(x, dtype=float)
        step[i] = h
        out[i] = (fn(x + step) - fn(x - step)) / (2.0 * h)
    return out


def random_categorical_problem(rng: np.random.Generator, n_rows: int,
                               vocab_sizes: list[int], signal: float = 0.6):
    """Small synthetic categorical problem with a noisy signal on feature 0.

    Returns (columns, codes, y).  Both classes are guaranteed present.
    """
    n_feat = len(vocab_sizes)
    codes = np.empty((n_rows, n_feat), dtype=np.int32)
    for j, k in enumerate(vocab_sizes):
        codes[:, j] = rng.integers(0, k, size=n_rows)
    cut = vocab_sizes[0] // 2
    p_pos = np.where(codes[:, 0] < max(cut, 1), signal, 1.0 - signal)
    y = (rng.random(n_rows) < p_pos).astype(np.uint8)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    columns = tuple(
        (f"f{j}", tuple(f"c{v}" for v in range(k)))
        for j, k in enumerate(vocab_sizes)
    )
    return columns, codes, y
