"""Joint cross-validation grid search over the regularization parameters.

Binary tasks use repeated stratified CV (5 independent partitions of 5
folds each); multiclass tasks use a single 5-fold partition scored by
multiclass accuracy. LUPI methods search the full Cartesian product of
the original- and privileged-space grids. Fold partitions derive from the
plan seed alone so results do not depend on grid evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .data import Dataset
from .errors import DataError
from .methods import (MethodSettings, check_method, fit_binary,
                      needs_privileged, param_count)
from .multiclass import predict_ovr, train_ovr

GRID_SEVEN = (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3)
GRID_L1_ORIGINAL = (1.0, 1e1, 1e2, 1e3, 1e4, 1e5)


def grid_for(normalization: str, space: str) -> Tuple[float, ...]:
    """The regularization grids of the evaluation protocol.

    Privileged space (any normalization) and L2-normalized original
    space: seven values 1e-3..1e3. L1-normalized original space: six
    values 1..1e5.
    """
    normalization = normalization.lower()
    if normalization not in ("l1", "l2"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if space not in ("original", "privileged"):
        raise ValueError(f"unknown space {space!r}")
    if space == "original" and normalization == "l1":
        return GRID_L1_ORIGINAL
    return GRID_SEVEN


@dataclass(frozen=True)
class CvGrid:
    orig_values: Tuple[float, ...]
    priv_values: Tuple[float, ...] = ()

    def __post_init__(self):
        orig = tuple(float(v) for v in self.orig_values)
        priv = tuple(float(v) for v in self.priv_values)
        if not orig:
            raise ValueError("orig_values must be non-empty")
        for values in (orig, priv):
            if any(v <= 0 for v in values):
                raise ValueError("grid values must be positive")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError("grid values must be strictly increasing")
        object.__setattr__(self, "orig_values", orig)
        object.__setattr__(self, "priv_values", priv)

    def points(self) -> Tuple[Tuple[float, ...], ...]:
        if not self.priv_values:
            return tuple((o,) for o in self.orig_values)
        return tuple((o, p) for o in self.orig_values
                     for p in self.priv_values)


@dataclass(frozen=True)
class CvPlan:
    outer_repeats: int = 5
    folds: int = 5
    seed: int = 0
    scoring: str = "accuracy"

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be at least 2")
        if self.outer_repeats < 1:
            raise ValueError("outer_repeats must be at least 1")
        if self.scoring != "accuracy":
            raise ValueError("scoring is fixed to accuracy")


@dataclass(frozen=True)
class CvTable:
    """Validation accuracies per grid point, repeat and fold."""

    params: Tuple[Tuple[float, ...], ...]
    scores: np.ndarray  # (n_points, outer_repeats, folds)

    def mean_scores(self) -> np.ndarray:
        return self.scores.reshape(len(self.params), -1).mean(axis=1)

    def rows(self):
        """(orig, priv-or-None, repeat, fold, accuracy) tuples for export."""
        for i, point in enumerate(self.params):
            priv = point[1] if len(point) > 1 else None
            for r in range(self.scores.shape[1]):
                for f in range(self.scores.shape[2]):
                    yield (point[0], priv, r, f, float(self.scores[i, r, f]))


def stratified_folds(y: np.ndarray, folds: int, rng) -> list[np.ndarray]:
    """Partition indices into folds preserving class proportions."""
    assignments = [[] for _ in range(folds)]
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        if members.size < folds:
            raise DataError(f"class {cls} has {members.size} samples; "
                            f"cannot build {folds} folds")
        perm = rng.permutation(members)
        for pos, idx in enumerate(perm):
            assignments[pos % folds].append(idx)
    return [np.sort(np.asarray(chunk, dtype=np.int64))
            for chunk in assignments]


def _subset(data: Dataset, idx: np.ndarray) -> Dataset:
    x_star = None if data.x_star is None else data.x_star[idx]
    return Dataset(x=data.x[idx], y=data.y[idx], x_star=x_star)


def _evaluate_point(data: Dataset, method: str, point, train_idx, val_idx,
                    settings: MethodSettings) -> float:
    fit = _subset(data, train_idx)
    val = _subset(data, val_idx)
    if data.is_binary:
        clf = fit_binary(method, fit.x, fit.x_star,
                         fit.y.astype(float), point, settings)
        scores = clf.scores(val.x, val.x_star)
        predicted = np.where(scores >= 0.0, 1, -1)
    else:
        ovr = train_ovr(fit, method, point, settings)
        predicted = predict_ovr(ovr, val.x, val.x_star)
    return float(np.mean(predicted == val.y))


def cross_validate(train: Dataset, method: str, grid: CvGrid, plan: CvPlan,
                   settings: MethodSettings = MethodSettings()):
    """Grid search by mean validation accuracy.

    Returns (best_params, CvTable). Ties break toward the smallest
    original-space value, then the smallest privileged-space value.
    """
    check_method(method)
    if needs_privileged(method) and train.x_star is None:
        raise DataError(f"method {method} requires privileged features")
    expected = param_count(method)
    observed = 2 if grid.priv_values else 1
    if expected != observed:
        raise ValueError(f"{method} needs {expected} grid dimension(s), "
                         f"grid has {observed}")

    rng = np.random.default_rng(plan.seed)
    partitions = [stratified_folds(train.y, plan.folds, rng)
                  for _ in range(plan.outer_repeats)]
    all_idx = np.arange(train.n)

    points = grid.points()
    scores = np.zeros((len(points), plan.outer_repeats, plan.folds))
    for r, folds in enumerate(partitions):
        for f, val_idx in enumerate(folds):
            mask = np.ones(train.n, dtype=bool)
            mask[val_idx] = False
            train_idx = all_idx[mask]
            for i, point in enumerate(points):
                scores[i, r, f] = _evaluate_point(
                    train, method, point, train_idx, val_idx, settings)

    table = CvTable(params=points, scores=scores)
    means = table.mean_scores()
    best = 0
    for i in range(1, len(points)):
        if means[i] > means[best]:
            best = i
    return points[best], table
