"""Uniform fit/score interface over the four binary training methods.

Used by cross-validation, the one-versus-rest reduction and the
experiment driver so they stay agnostic of which method is running.
Parameter tuples are ordered (original-space value[, privileged-space
value]): margin transfer takes (c_orig, c_priv), SVM+ takes (c, gamma).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError
from .margin_transfer import (MarginTransferConfig, MarginVector,
                              train_margin_transfer)
from .svm import LinearModel, SvmConfig, predict, train_svm
from .svm_plus import SlackModel, SvmPlusConfig, train_svm_plus

SVM = "svm"
MARGIN_TRANSFER = "margin_transfer"
SVM_PLUS = "svm_plus"
REFERENCE = "reference_svm_on_privileged"
METHODS = (SVM, MARGIN_TRANSFER, SVM_PLUS, REFERENCE)

ORIGINAL_SPACE = "original"
PRIVILEGED_SPACE = "privileged"


@dataclass(frozen=True)
class MethodSettings:
    """Solver knobs shared across a model-selection run.

    The defaults trade certificate tightness for protocol throughput:
    grid search visits costs up to 1e3, where an absolute duality gap is
    unreachable in any sensible epoch budget, so CV-trained models stop
    at a 1e-3 scale-relative gap (still far tighter than stock liblinear
    settings). Tighten tol / rel_tol / max_epochs for final models when
    certificates matter.
    """

    epsilon: float = 0.1
    tol: float = 1e-6
    rel_tol: float = 1e-3
    max_epochs: int = 2000
    qp_tol: float = 1e-8
    qp_max_iter: int = 100


@dataclass(frozen=True)
class BinaryClassifier:
    """A trained binary decision function plus per-method artifacts."""

    method: str
    model: LinearModel
    space: str
    teacher: Optional[LinearModel] = None
    margins: Optional[MarginVector] = None
    slack: Optional[SlackModel] = None

    def scores(self, x, x_star=None) -> np.ndarray:
        block = x if self.space == ORIGINAL_SPACE else x_star
        if block is None:
            raise DataError(f"method {self.method} scores in the "
                            f"{self.space} space but no such block given")
        return predict(self.model, block)


def check_method(method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def needs_privileged(method: str) -> bool:
    return check_method(method) != SVM


def param_count(method: str) -> int:
    return 2 if check_method(method) in (MARGIN_TRANSFER, SVM_PLUS) else 1


def fit_binary(method: str, x, x_star, y, params,
               settings: MethodSettings = MethodSettings()) -> BinaryClassifier:
    check_method(method)
    params = tuple(float(v) for v in np.atleast_1d(params))
    if len(params) != param_count(method):
        raise ValueError(f"{method} takes {param_count(method)} parameter(s), "
                         f"got {len(params)}")
    if needs_privileged(method) and x_star is None:
        raise DataError(f"method {method} requires privileged features")

    if method == SVM:
        model = train_svm(x, y, SvmConfig(c=params[0], tol=settings.tol,
                                          rel_tol=settings.rel_tol,
                                          max_epochs=settings.max_epochs))
        return BinaryClassifier(method=method, model=model,
                                space=ORIGINAL_SPACE)
    if method == REFERENCE:
        model = train_svm(x_star, y, SvmConfig(c=params[0], tol=settings.tol,
                                               rel_tol=settings.rel_tol,
                                               max_epochs=settings.max_epochs))
        return BinaryClassifier(method=method, model=model,
                                space=PRIVILEGED_SPACE)
    if method == MARGIN_TRANSFER:
        from .data import Dataset
        result = train_margin_transfer(
            Dataset(x=x, y=np.asarray(y, dtype=np.int64), x_star=x_star),
            MarginTransferConfig(c_orig=params[0], c_priv=params[1],
                                 epsilon=settings.epsilon, tol=settings.tol,
                                 rel_tol=settings.rel_tol,
                                 max_epochs=settings.max_epochs))
        return BinaryClassifier(method=method, model=result.student,
                                space=ORIGINAL_SPACE, teacher=result.teacher,
                                margins=result.margins)
    model, slack, _ = train_svm_plus(
        x, x_star, y, SvmPlusConfig(c=params[0], gamma=params[1],
                                    tol=settings.qp_tol,
                                    max_iter=settings.qp_max_iter))
    return BinaryClassifier(method=method, model=model, space=ORIGINAL_SPACE,
                            slack=slack)
