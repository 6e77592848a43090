"""Weighted soft-margin linear SVM trained by dual coordinate descent.

The trainer handles per-sample slack costs; with a uniform cost vector it
is the standard C-SVM. An optional bias is realized by augmenting samples
with a constant-1 coordinate whose weight is regularized like any other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np

from ._dualcd import PERMUTATION_SEED, run_dual_cd


@dataclass(frozen=True)
class LinearModel:
    """Decision hyperplane: score(x) = <w, x> + b."""

    w: np.ndarray
    b: float = 0.0
    meta: Optional[Mapping[str, Any]] = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).ravel()
        if not np.all(np.isfinite(w)) or not np.isfinite(self.b):
            raise ValueError("model weights must be finite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    use_bias: bool = True
    tol: float = 1e-6
    max_epochs: int = 10000
    # Optional scale-relative gap stop, gap <= rel_tol * max(1, |primal|).
    # 0 keeps the absolute certificate only. Large-C grid cells converge
    # impractically slowly under a purely absolute gap.
    rel_tol: float = 0.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be non-negative")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")


def _check_training_inputs(x, y, cost):
    x = np.ascontiguousarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    cost = np.asarray(cost, dtype=float).ravel()
    if x.ndim != 2:
        raise ValueError("x must be a 2-d matrix")
    n = x.shape[0]
    if y.shape[0] != n or cost.shape[0] != n:
        raise ValueError("x, y and cost must agree in length")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite entries")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not np.all(np.isfinite(cost)) or np.any(cost <= 0):
        raise ValueError("costs must be finite and strictly positive")
    return x, y, cost


def train_weighted_svm(x, y, cost, config: SvmConfig = SvmConfig()) -> LinearModel:
    """Minimize 0.5||w||^2 + sum_i cost_i * hinge(y_i score_i).

    Returns the model with a duality-gap certificate in meta; when
    max_epochs is exhausted first, the best iterate is returned with
    meta["converged"] = False and its achieved gap.
    """
    x, y, cost = _check_training_inputs(x, y, cost)
    features = x
    if config.use_bias:
        features = np.ascontiguousarray(
            np.hstack([x, np.ones((x.shape[0], 1))]))
    history = np.empty(config.max_epochs)
    w, _, epochs, gap, viol, converged = run_dual_cd(
        features, y, cost, config.tol, config.rel_tol, config.max_epochs,
        PERMUTATION_SEED, history)
    if config.use_bias:
        w, b = w[:-1], float(w[-1])
    else:
        b = 0.0
    meta = {"use_bias": config.use_bias, "gap": float(gap),
            "epochs": int(epochs), "pg_violation": float(viol),
            "converged": bool(converged)}
    return LinearModel(w=w, b=b, meta=meta)


def train_svm(x, y, config: SvmConfig = SvmConfig()) -> LinearModel:
    """Plain soft-margin SVM: uniform slack cost config.c on every sample."""
    n = np.asarray(x).shape[0]
    model = train_weighted_svm(x, y, np.full(n, config.c), config)
    meta = dict(model.meta)
    meta["c"] = config.c
    return LinearModel(w=model.w, b=model.b, meta=meta)


def primal_objective(model: LinearModel, x, y, cost) -> float:
    """0.5||w||^2 (+bias weight when trained with one) + weighted hinge loss.

    The bias contribution is part of the regularizer because the bias is an
    augmented, regularized coordinate.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    cost = np.asarray(cost, dtype=float).ravel()
    scores = predict(model, x)
    hinge = np.maximum(0.0, 1.0 - y * scores)
    reg = 0.5 * (model.w @ model.w)
    if model.meta is not None and model.meta.get("use_bias"):
        reg += 0.5 * model.b * model.b
    return float(reg + cost @ hinge)


def predict(model: LinearModel, x) -> np.ndarray:
    """Raw decision values <w, x_i> + b per row."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.w.shape[0]:
        raise ValueError(
            f"expected {model.w.shape[0]} feature columns, got {x.shape}")
    return x @ model.w + model.b


def predict_labels(model: LinearModel, x) -> np.ndarray:
    """Class labels in {-1, +1}; sign(0) is +1 by convention."""
    scores = predict(model, x)
    return np.where(scores >= 0.0, 1, -1).astype(np.int64)


def decision_margins(model: LinearModel, x, y) -> np.ndarray:
    """Signed margins y_i * (<w, x_i> + b); negative means misclassified."""
    y = np.asarray(y, dtype=float).ravel()
    scores = predict(model, x)
    if y.shape[0] != scores.shape[0]:
        raise ValueError("y length must match the number of rows")
    return y * scores


def model_to_dict(model: LinearModel) -> dict:
    return {"w": model.w.tolist(), "b": model.b,
            "meta": dict(model.meta) if model.meta is not None else {}}


def model_from_dict(doc: Mapping[str, Any]) -> LinearModel:
    return LinearModel(w=np.asarray(doc["w"], dtype=float),
                       b=float(doc.get("b", 0.0)),
                       meta=dict(doc.get("meta", {})))
