"""One-versus-rest reduction: one binary classifier per class, shared
hyperparameters, argmax prediction with lowest-index tie-break."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DataError
from .data import Dataset
from .methods import (BinaryClassifier, MethodSettings, check_method,
                      fit_binary, needs_privileged)
from .svm import LinearModel


@dataclass(frozen=True)
class OvrModel:
    class_ids: Tuple[int, ...]
    classifiers: Tuple[BinaryClassifier, ...]
    method: str

    def __post_init__(self):
        if len(self.class_ids) < 2:
            raise ValueError("need at least two classes")
        if len(self.classifiers) != len(self.class_ids):
            raise ValueError("one classifier per class required")

    @property
    def models(self) -> Tuple[LinearModel, ...]:
        return tuple(c.model for c in self.classifiers)


def _class_ids(y: np.ndarray) -> np.ndarray:
    ids = np.unique(y)
    if ids.size < 2:
        raise DataError("multiclass training needs at least two classes")
    binary_style = np.array_equal(ids, (-1, 1))
    if not binary_style and not np.array_equal(ids, np.arange(ids.size)):
        missing = sorted(set(range(int(ids.max()) + 1)) - set(ids.tolist()))
        raise DataError(f"empty class(es) {missing}: labels must cover "
                        "0..K-1")
    return ids


def train_ovr(data: Dataset, method: str, params,
              settings: MethodSettings = MethodSettings()) -> OvrModel:
    """Train K class-vs-rest classifiers with one shared parameter setting."""
    check_method(method)
    if needs_privileged(method) and data.x_star is None:
        raise DataError(f"method {method} requires privileged features")
    ids = _class_ids(data.y)
    classifiers = []
    for cls in ids:
        y_bin = np.where(data.y == cls, 1.0, -1.0)
        classifiers.append(fit_binary(method, data.x, data.x_star, y_bin,
                                      params, settings))
    return OvrModel(class_ids=tuple(int(c) for c in ids),
                    classifiers=tuple(classifiers), method=method)


def ovr_scores(model: OvrModel, x, x_star=None) -> np.ndarray:
    """Per-class decision values, one column per class in class_ids order."""
    return np.column_stack([clf.scores(x, x_star)
                            for clf in model.classifiers])


def predict_ovr(model: OvrModel, x, x_star=None) -> np.ndarray:
    """Argmax over class scores; exact ties go to the lowest class index."""
    scores = ovr_scores(model, x, x_star)
    winners = np.argmax(scores, axis=1)  # first maximum = lowest index
    ids = np.asarray(model.class_ids)
    return ids[winners]


def ovr_to_dict(model: OvrModel) -> dict:
    from .svm import model_to_dict
    return {"method": model.method,
            "class_ids": list(model.class_ids),
            "models": [model_to_dict(m) for m in model.models]}
