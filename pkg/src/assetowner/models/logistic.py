"""One-hot logistic regression, Newton iterations with step halving.

The design matrix one-hot encodes every (feature, category) pair of the
training vocabulary; a small ridge penalty (unpenalized intercept) keeps
the Hessian invertible and the separable case bounded. Convergence is a
max-norm gradient test on the penalized objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dataset import Columns, encode_against

LAMBDA = 1e-4
GRAD_TOL = 1e-6
MAX_ITER = 500


@dataclass(eq=False)
class LogisticModel:
    columns: Columns
    lam: float
    intercept: float
    weights: np.ndarray
    offsets: np.ndarray
    converged: bool
    n_iter: int

    @property
    def family(self) -> str:
        return "logistic"

    def hyperparameters(self) -> dict:
        return {"lambda": self.lam}


def category_offsets(columns: Columns) -> np.ndarray:
    """Prefix offsets of each feature's block in the flat weight vector."""
    sizes = [len(vocab) for _, vocab in columns]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def design_matrix(columns: Columns, codes: np.ndarray) -> np.ndarray:
    """Dense one-hot matrix (rows, total categories). Unseen codes (-1)
    leave their feature's block all zero."""
    offsets = category_offsets(columns)
    n, f = codes.shape
    x = np.zeros((n, int(offsets[-1])), dtype=np.float64)
    rows = np.arange(n)
    for j in range(f):
        valid = codes[:, j] >= 0
        x[rows[valid], offsets[j] + codes[valid, j]] = 1.0
    return x


def penalized_nll_grad(
    x: np.ndarray, y: np.ndarray, lam: float, intercept: float, weights: np.ndarray
) -> tuple[float, float, np.ndarray]:
    """Objective and analytic gradient.

    nll = sum(log(1 + exp(eta)) - y*eta) + lam/2 * |w|^2, eta = b + x.w.
    Returns (nll, d/db, d/dw).
    """
    yf = y.astype(np.float64)
    eta = intercept + x @ weights
    nll = float(np.logaddexp(0.0, eta).sum() - (yf * eta).sum())
    nll += 0.5 * lam * float(weights @ weights)
    p = 1.0 / (1.0 + np.exp(-eta))
    resid = p - yf
    grad_b = float(resid.sum())
    grad_w = x.T @ resid + lam * weights
    return nll, grad_b, grad_w


def fit_logistic(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    lam: float = LAMBDA,
    tol: float = GRAD_TOL,
    max_iter: int = MAX_ITER,
) -> LogisticModel:
    y = np.asarray(y)
    if y.min() == y.max():
        raise ValueError("logistic fit needs both classes in the training data")
    x = design_matrix(columns, codes)
    yf = y.astype(np.float64)
    d = x.shape[1]
    intercept = 0.0
    weights = np.zeros(d, dtype=np.float64)

    converged = False
    it = 0
    nll, gb, gw = penalized_nll_grad(x, yf, lam, intercept, weights)
    for it in range(1, max_iter + 1):
        if max(abs(gb), float(np.abs(gw).max()) if d else 0.0) <= tol:
            converged = True
            break
        eta = intercept + x @ weights
        p = 1.0 / (1.0 + np.exp(-eta))
        s = p * (1.0 - p)
        xb = np.hstack([np.ones((x.shape[0], 1)), x])
        h = xb.T @ (xb * s[:, None])
        h[1:, 1:] += lam * np.eye(d)
        g = np.concatenate([[gb], gw])
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        improved = False
        for _ in range(50):
            nb = intercept - scale * step[0]
            nw = weights - scale * step[1:]
            new_nll, new_gb, new_gw = penalized_nll_grad(x, yf, lam, nb, nw)
            if new_nll <= nll:
                intercept, weights = nb, nw
                nll, gb, gw = new_nll, new_gb, new_gw
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    else:
        it = max_iter
    # re-test after the loop so a final in-tolerance step counts
    if not converged and max(abs(gb), float(np.abs(gw).max()) if d else 0.0) <= tol:
        converged = True

    return LogisticModel(
        columns=columns, lam=lam, intercept=float(intercept), weights=weights,
        offsets=category_offsets(columns), converged=converged, n_iter=it,
    )


def logistic_scores(model: LogisticModel, codes_q: np.ndarray) -> np.ndarray:
    q, f = codes_q.shape
    eta = np.full(q, model.intercept, dtype=np.float64)
    for j in range(f):
        k = int(model.offsets[j + 1] - model.offsets[j])
        code = codes_q[:, j]
        valid = (code >= 0) & (code < k)
        safe = np.where(valid, code, 0)
        contrib = model.weights[model.offsets[j] + safe]
        eta += np.where(valid, contrib, 0.0)
    return 1.0 / (1.0 + np.exp(-eta))


def logistic_predict(model: LogisticModel, codes_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = logistic_scores(model, codes_q)
    return scores >= 0.5, scores


def logistic_predict_rows(model: LogisticModel, rows: Sequence) -> tuple[np.ndarray, np.ndarray]:
    return logistic_predict(model, encode_against(model.columns, rows))
