"""L2-regularized multinomial logistic regression (maximum entropy).

Loss over weights W (classes x features) and binary design matrix X:

    sum_i -log softmax(X_i W^T)[y_i] + (l2 / 2) * ||W||_F^2

minimized with L-BFGS-B; gradient is (P - Y)^T X + l2 * W.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.special import logsumexp

logger = logging.getLogger(__name__)

GRAD_TOL = 1e-6


class FeatureTable:
    """Interned feature names, sorted so column order is input-order independent."""

    def __init__(self, names: Sequence[str]):
        self.names: Tuple[str, ...] = tuple(sorted(set(names)))
        self.index: Dict[str, int] = {n: i for i, n in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Mapping[str, float]]) -> "FeatureTable":
        return cls([name for v in vectors for name in v])

    def matrix(self, vectors: Sequence[Mapping[str, float]]) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for i, v in enumerate(vectors):
            for name in sorted(v):
                j = self.index.get(name)
                if j is not None:  # unseen features never fire
                    rows.append(i)
                    cols.append(j)
                    vals.append(v[name])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(len(vectors), len(self)), dtype=np.float64)


def objective(w_flat: np.ndarray, X: sparse.spmatrix, y: np.ndarray, n_classes: int,
              l2: float) -> Tuple[float, np.ndarray]:
    """Regularized negative log-likelihood and its gradient (flattened)."""
    n_features = X.shape[1]
    W = w_flat.reshape(n_classes, n_features)
    scores = np.asarray(X @ W.T)
    log_norm = logsumexp(scores, axis=1)
    rows = np.arange(X.shape[0])
    nll = float(np.sum(log_norm - scores[rows, y]))
    P = np.exp(scores - log_norm[:, None])
    P[rows, y] -= 1.0
    grad = np.asarray((X.T @ P).T) + l2 * W
    loss = nll + 0.5 * l2 * float(np.sum(W * W))
    return loss, grad.ravel()


def softmax_rows(scores: np.ndarray) -> np.ndarray:
    return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))


@dataclass
class FitResult:
    weights: np.ndarray
    loss: float
    iterations: int
    converged: bool


def fit(X: sparse.spmatrix, y: np.ndarray, n_classes: int, l2: float = 1.0,
        max_iter: int = 200, tol: float = GRAD_TOL) -> FitResult:
    """Deterministic L-BFGS-B fit from zero weights."""
    w0 = np.zeros(n_classes * X.shape[1])
    _, g0 = objective(w0, X, y, n_classes, l2)
    gtol = tol * max(1.0, float(np.max(np.abs(g0))) if g0.size else 1.0)
    res = minimize(
        objective, w0, args=(X, y, n_classes, l2), jac=True, method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": gtol, "ftol": 0.0},
    )
    if not res.success:
        logger.debug("L-BFGS-B stopped without convergence: %s", res.message)
    return FitResult(res.x.reshape(n_classes, X.shape[1]), float(res.fun), int(res.nit), bool(res.success))


def predict_proba(weights: np.ndarray, X: sparse.spmatrix) -> np.ndarray:
    return softmax_rows(np.asarray(X @ weights.T))
