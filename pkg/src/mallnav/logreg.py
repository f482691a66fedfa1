"""Deterministic full-batch gradient-descent logistic regression.

Shared by the detection-reliability classifier and the per-brand
one-vs-rest classifiers.  Training standardizes features internally and
folds the scaling back into the returned weights, so callers always see
weights over raw features.  The step size is capped at 1/L where L is the
smoothness constant of the regularized loss, computed from the data; this
keeps the loss non-increasing for every iteration regardless of feature
scale (a fixed step on raw pixel-geometry features diverges).
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateTrainingSetError, FeatureDimensionMismatchError

DEFAULT_STEP = 0.1
DEFAULT_REG = 1e-4
DEFAULT_ITERS = 500


def sigmoid(z):
    # expit without pulling in scipy.special for a one-liner
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _lipschitz_bound(X: np.ndarray, reg: float) -> float:
    """Smoothness constant of the mean cross-entropy + L2 objective.

    L = lambda_max(X^T X) / (4 n) + reg.  The spectral term comes from the
    smaller Gram matrix, so dimension never exceeds min(n, d).
    """
    n, d = X.shape
    if n <= d:
        gram = X @ X.T
    else:
        gram = X.T @ X
    lam = float(np.linalg.eigvalsh(gram)[-1])
    return max(lam, 0.0) / (4.0 * n) + reg


def fit_logistic(
    X: np.ndarray,
    Y: np.ndarray,
    reg: float = DEFAULT_REG,
    iters: int = DEFAULT_ITERS,
    step: float = DEFAULT_STEP,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Fit one sigmoid unit per column of Y with zero initialization.

    X: (n, d) raw features.  Y: (n, c) targets in {0, 1}.
    Returns (weights (c, d), bias (c,), loss history) where weights apply
    to raw, unstandardized features.  Bit-identical for identical inputs.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise FeatureDimensionMismatchError(
            f"feature matrix {X.shape} incompatible with targets {Y.shape}"
        )
    n, d = X.shape
    c = Y.shape[1]
    if n < 2:
        raise DegenerateTrainingSetError("need at least 2 samples")
    for j in range(c):
        col = Y[:, j]
        if col.min() == col.max():
            raise DegenerateTrainingSetError(
                f"target column {j} contains a single class"
            )

    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    Xs = (X - mu) / sd

    lip = _lipschitz_bound(Xs, reg)
    eff_step = min(step, 1.0 / lip) if lip > 0 else step

    W = np.zeros((c, d), dtype=np.float64)
    b = np.zeros(c, dtype=np.float64)
    losses: list[float] = []
    for _ in range(iters):
        Z = Xs @ W.T + b
        P = sigmoid(Z)
        # mean binary cross-entropy per class, summed over classes
        eps = 1e-12
        ce = -(Y * np.log(P + eps) + (1.0 - Y) * np.log(1.0 - P + eps))
        loss = float(ce.mean(axis=0).sum()) + 0.5 * reg * float((W * W).sum())
        losses.append(loss)
        G = P - Y
        grad_w = (G.T @ Xs) / n + reg * W
        grad_b = G.mean(axis=0)
        W -= eff_step * grad_w
        b -= eff_step * grad_b

    # fold standardization into raw-feature weights
    W_raw = W / sd
    b_raw = b - W_raw @ mu
    return W_raw, b_raw, losses
