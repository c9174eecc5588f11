"""The five classifier families and their shared prediction surface.

Every fit function takes (columns, codes, y): the table's column
vocabularies, the int32 code matrix restricted to training rows, and a
uint8/bool label vector. Every model predicts through predict(), scores in
[0, 1], label = score >= 0.5. Models round-trip through to_json/from_json
with bit-identical predictions.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from ..dataset import Columns, encode_against
from ..features import FEATURES
from .adaboost import (
    N_ROUNDS,
    BoostModel,
    boost_importance,
    boost_margins,
    boost_predict,
    fit_adaboost,
)
from .forest import (
    ForestModel,
    fit_random_forest,
    forest_importance,
    forest_predict,
    grow_ensemble,
    tree_seeds_for,
)
from .logistic import (
    GRAD_TOL,
    LAMBDA,
    MAX_ITER,
    LogisticModel,
    design_matrix,
    fit_logistic,
    logistic_predict,
    logistic_scores,
    penalized_nll_grad,
)
from .naive_bayes import NaiveBayesModel, fit_naive_bayes, nb_predict, nb_scores
from .trees import (
    CartModel,
    cart_importance,
    cart_predict,
    fit_cart,
    pool_from_dict,
    pool_to_dict,
    prune_mask,
    reachable_mask,
    route_pruned,
    vocab_sizes_of,
)

FittedModel = Union[BoostModel, LogisticModel, NaiveBayesModel, CartModel, ForestModel]

#: Canonical family order used everywhere results are reported.
FAMILIES = ("adaboost", "logistic", "naive_bayes", "cart", "random_forest")

#: Families whose importances are defined (total split Gini decrease).
IMPORTANCE_FAMILIES = ("adaboost", "cart", "random_forest")


class ImportanceUnavailableError(ValueError):
    """Raised when feature_importance is asked of a family without one."""


def predict(model: FittedModel, data) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) for a code matrix or a sequence of feature rows."""
    if isinstance(data, np.ndarray):
        codes_q = data
    else:
        codes_q = encode_against(model.columns, data)
    if isinstance(model, BoostModel):
        return boost_predict(model, codes_q)
    if isinstance(model, LogisticModel):
        return logistic_predict(model, codes_q)
    if isinstance(model, NaiveBayesModel):
        return nb_predict(model, codes_q)
    if isinstance(model, CartModel):
        return cart_predict(model, codes_q)
    if isinstance(model, ForestModel):
        return forest_predict(model, codes_q)
    raise TypeError(f"not a fitted model: {type(model).__name__}")


def normalize_importance(raw: np.ndarray) -> np.ndarray:
    total = float(raw.sum())
    if total <= 0.0:
        return np.zeros_like(raw)
    return raw / total


def feature_importance(model: FittedModel) -> dict[str, float]:
    """Normalized per-feature importance (sums to 1 unless every split had
    zero decrease). Only tree-based families define one."""
    if isinstance(model, BoostModel):
        raw = boost_importance(model)
    elif isinstance(model, CartModel):
        raw = cart_importance(model)
    elif isinstance(model, ForestModel):
        raw = forest_importance(model)
    else:
        raise ImportanceUnavailableError(
            f"feature importance is undefined for family {model.family!r}"
        )
    norm = normalize_importance(raw)
    names = [name for name, _ in model.columns]
    return {name: float(v) for name, v in zip(names, norm)}


def _columns_to_json(columns: Columns) -> list:
    return [[name, list(vocab)] for name, vocab in columns]


def _columns_from_json(data: list) -> Columns:
    return tuple((name, tuple(vocab)) for name, vocab in data)


def to_json(model: FittedModel) -> dict:
    """JSON-safe dict; floats keep full precision via repr round-trip."""
    out = {
        "schema_version": 1,
        "family": model.family,
        "columns": _columns_to_json(model.columns),
        "hyperparameters": model.hyperparameters(),
    }
    if isinstance(model, BoostModel):
        out["rounds"] = model.rounds
        out["stop_reason"] = model.stop_reason
        out["raw_alpha"] = model.raw_alpha.tolist()
        out["eps"] = model.eps.tolist()
        out["importance_raw"] = model.importance_raw.tolist()
        out["pool"] = pool_to_dict(model.pool)
    elif isinstance(model, LogisticModel):
        out["intercept"] = model.intercept
        out["weights"] = model.weights.tolist()
        out["converged"] = model.converged
        out["n_iter"] = model.n_iter
    elif isinstance(model, NaiveBayesModel):
        out["n_neg"] = model.n_neg
        out["n_pos"] = model.n_pos
        out["counts"] = [mat.tolist() for mat in model.counts]
    elif isinstance(model, CartModel):
        out["root_gini"] = model.root_gini
        out["pool"] = pool_to_dict(model.pool)
    elif isinstance(model, ForestModel):
        out["seed_key"] = list(model.seed_key)
        out["tree_seeds"] = [int(s) for s in model.tree_seeds]
        out["pool"] = pool_to_dict(model.pool)
    else:
        raise TypeError(f"not a fitted model: {type(model).__name__}")
    return out


def from_json(data: dict) -> FittedModel:
    if data.get("schema_version") != 1:
        raise ValueError(f"unsupported model schema: {data.get('schema_version')!r}")
    family = data["family"]
    columns = _columns_from_json(data["columns"])
    hp = data["hyperparameters"]
    if family == "adaboost":
        return BoostModel(
            columns=columns,
            shrinkage=float(hp["shrinkage"]),
            max_depth=int(hp["max_depth"]),
            n_rounds=int(hp["n_rounds"]),
            rounds=int(data["rounds"]),
            stop_reason=data["stop_reason"],
            raw_alpha=np.array(data["raw_alpha"], dtype=np.float64),
            eps=np.array(data["eps"], dtype=np.float64),
            pool=pool_from_dict(data["pool"]),
            importance_raw=np.array(data["importance_raw"], dtype=np.float64),
        )
    if family == "logistic":
        from .logistic import category_offsets

        return LogisticModel(
            columns=columns,
            lam=float(hp["lambda"]),
            intercept=float(data["intercept"]),
            weights=np.array(data["weights"], dtype=np.float64),
            offsets=category_offsets(columns),
            converged=bool(data["converged"]),
            n_iter=int(data["n_iter"]),
        )
    if family == "naive_bayes":
        return NaiveBayesModel(
            columns=columns,
            alpha=float(hp["laplace"]),
            n_neg=int(data["n_neg"]),
            n_pos=int(data["n_pos"]),
            counts=tuple(np.array(mat, dtype=np.int64) for mat in data["counts"]),
        )
    if family == "cart":
        return CartModel(
            columns=columns,
            cp=float(hp["cp"]),
            minsplit=int(hp["minsplit"]),
            max_depth=int(hp["max_depth"]),
            pool=pool_from_dict(data["pool"]),
            root_gini=float(data["root_gini"]),
        )
    if family == "random_forest":
        return ForestModel(
            columns=columns,
            ntree=int(hp["ntree"]),
            mtry=int(hp["mtry"]),
            maxnodes=int(hp["maxnodes"]),
            seed_key=tuple(data["seed_key"]),
            tree_seeds=np.array(data["tree_seeds"], dtype=np.uint64),
            pool=pool_from_dict(data["pool"]),
        )
    raise ValueError(f"unknown model family: {family!r}")
