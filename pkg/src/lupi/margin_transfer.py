"""Two-stage trainer that transfers per-sample margins between spaces.

Stage 1 trains an ordinary SVM in the privileged space (the teacher) and
reads off each training sample's signed margin. Stage 2 trains the
deployable original-space model against those data-dependent target
margins instead of the constant margin 1: divide each sample by its
target margin and give its slack the weight c * rho_i, which turns the
problem into a per-sample-weighted standard SVM.

Samples the teacher gets wrong keep only the floor margin epsilon, so
their influence on the student is deliberately small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .data import Dataset
from .errors import DataError
from .svm import LinearModel, SvmConfig, predict, train_svm, train_weighted_svm


@dataclass(frozen=True)
class MarginVector:
    """Per-sample target margins with the threshold that produced them."""

    rho: np.ndarray
    epsilon: float

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float).ravel()
        if not np.all(np.isfinite(rho)):
            raise ValueError("margins must be finite")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if np.any(rho < self.epsilon):
            raise ValueError("every margin must be at least epsilon")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "epsilon", float(self.epsilon))


@dataclass(frozen=True)
class MarginTransferConfig:
    c_priv: float = 1.0
    c_orig: float = 1.0
    epsilon: float = 0.1
    tol: float = 1e-6
    rel_tol: float = 0.0
    max_epochs: int = 10000
    # Eq-as-printed has no student bias; flag exists for ablation.
    student_bias: bool = False

    def __post_init__(self):
        if self.c_priv <= 0 or self.c_orig <= 0:
            raise ValueError("stage costs must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


class MarginTransferResult(NamedTuple):
    student: LinearModel
    margins: MarginVector
    teacher: LinearModel


def compute_transfer_margins(teacher: LinearModel, x_star, y,
                             epsilon: float) -> MarginVector:
    """rho_i = max(y_i * teacher_score(x_star_i), epsilon).

    Large rho marks easy samples; the epsilon floor absorbs samples the
    teacher misclassifies.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    y = np.asarray(y, dtype=float).ravel()
    scores = predict(teacher, x_star)
    if y.shape[0] != scores.shape[0]:
        raise ValueError("y length must match the number of rows")
    rho = np.maximum(y * scores, epsilon)
    return MarginVector(rho=rho, epsilon=epsilon)


def threshold_margins(margins: MarginVector, epsilon: float) -> MarginVector:
    """Floor every margin at epsilon (> 0), e.g. to make human-score
    margins usable as training targets."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return MarginVector(rho=np.maximum(margins.rho, epsilon), epsilon=epsilon)


def train_with_margins(x, y, margins: MarginVector, c: float,
                       tol: float = 1e-6, rel_tol: float = 0.0,
                       max_epochs: int = 10000,
                       use_bias: bool = False) -> LinearModel:
    """Train against per-sample target margins via the reparameterization
    x_i -> x_i / rho_i with slack weight c * rho_i and unit margin."""
    if margins.epsilon <= 0 or np.any(margins.rho <= 0):
        raise ValueError("margins must be strictly positive; threshold first")
    x = np.asarray(x, dtype=float)
    if x.shape[0] != margins.rho.shape[0]:
        raise ValueError("margin count must match the number of samples")
    x_hat = x / margins.rho[:, None]
    cost = c * margins.rho
    config = SvmConfig(c=c, use_bias=use_bias, tol=tol, rel_tol=rel_tol,
                       max_epochs=max_epochs)
    model = train_weighted_svm(x_hat, y, cost, config)
    meta = dict(model.meta)
    meta["c"] = c
    return LinearModel(w=model.w, b=model.b, meta=meta)


def train_margin_transfer(data: Dataset,
                          config: MarginTransferConfig = MarginTransferConfig()
                          ) -> MarginTransferResult:
    """Run both stages on a binary dataset with a privileged block."""
    if data.x_star is None:
        raise DataError("margin transfer needs a privileged block")
    if not data.is_binary:
        raise DataError("margin transfer trains on binary labels")
    teacher = train_svm(
        data.x_star, data.y,
        SvmConfig(c=config.c_priv, use_bias=True, tol=config.tol,
                  rel_tol=config.rel_tol, max_epochs=config.max_epochs))
    margins = compute_transfer_margins(teacher, data.x_star, data.y,
                                       config.epsilon)
    try:
        student = train_with_margins(
            data.x, data.y, margins, config.c_orig, tol=config.tol,
            rel_tol=config.rel_tol, max_epochs=config.max_epochs,
            use_bias=config.student_bias)
    except ValueError as exc:
        raise ValueError(
            f"stage 2 failed with margins min={margins.rho.min():.6g} "
            f"max={margins.rho.max():.6g}: {exc}") from exc
    return MarginTransferResult(student=student, margins=margins,
                                teacher=teacher)


def bundle_to_dict(result: MarginTransferResult) -> dict:
    from .svm import model_to_dict
    return {"student": model_to_dict(result.student),
            "teacher": model_to_dict(result.teacher),
            "margins": {"rho": result.margins.rho.tolist(),
                        "epsilon": result.margins.epsilon}}


def bundle_from_dict(doc) -> MarginTransferResult:
    from .svm import model_from_dict
    margins = MarginVector(rho=np.asarray(doc["margins"]["rho"], dtype=float),
                           epsilon=float(doc["margins"]["epsilon"]))
    return MarginTransferResult(student=model_from_dict(doc["student"]),
                                margins=margins,
                                teacher=model_from_dict(doc["teacher"]))
