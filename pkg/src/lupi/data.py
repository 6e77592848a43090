"""Datasets with an optional privileged feature block.

Covers CSV ingestion, per-sample normalization, stratified splitting, a
synthetic generator with controllable per-sample easiness, and conversion
of human easy-hard scores into target margins.

All operations are pure functions of their inputs (seeds included);
Dataset arrays are frozen after construction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Original features x, optional privileged block x_star, labels y.

    Binary tasks use labels {-1, +1}; multiclass tasks use 0..K-1.
    """

    x: np.ndarray
    y: np.ndarray
    x_star: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim != 2 or x.shape[0] < 1:
            raise DataError("x must be a matrix with at least one row")
        if not np.all(np.isfinite(x)):
            raise DataError("x contains non-finite entries")
        if np.any(y != np.floor(y)):
            raise DataError("labels must be integers")
        y = y.astype(np.int64).ravel()
        if y.shape[0] != x.shape[0]:
            raise DataError("label count does not match row count")
        values = np.unique(y)
        binary = np.all(np.isin(values, (-1, 1)))
        if not binary and values.min() < 0:
            raise DataError(
                "labels must be -1/+1 (binary) or 0..K-1 (multiclass)")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))
        if self.x_star is not None:
            xs = np.asarray(self.x_star, dtype=float)
            if xs.ndim != 2 or xs.shape[0] != x.shape[0]:
                raise DataError("privileged block must align row-for-row "
                                f"with x ({xs.shape[0]} vs {x.shape[0]} rows)")
            if not np.all(np.isfinite(xs)):
                raise DataError("x_star contains non-finite entries")
            object.__setattr__(self, "x_star", _frozen(xs))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def d_star(self) -> Optional[int]:
        return None if self.x_star is None else self.x_star.shape[1]

    @property
    def is_binary(self) -> bool:
        return bool(np.all(np.isin(self.y, (-1, 1))))

    @property
    def class_ids(self) -> np.ndarray:
        return np.unique(self.y)


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator knobs: one discriminative direction per space, isotropic
    Gaussian noise, per-sample easiness shared across both spaces."""

    n: int = 200
    d: int = 10
    d_star: int = 2
    noise_orig: float = 1.0
    noise_priv: float = 0.05
    easiness_lo: float = 0.2
    easiness_hi: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise DataError("n must be even (balanced classes) and >= 2")
        if self.d < 1 or self.d_star < 1:
            raise DataError("dimensions must be at least 1")
        if self.noise_orig < 0 or self.noise_priv < 0:
            raise DataError("noise levels must be non-negative")
        if not (0 < self.easiness_lo <= self.easiness_hi):
            raise DataError("easiness range needs 0 < lo <= hi")


@dataclass(frozen=True)
class HumanScores:
    """Aggregated easy-hard scores, 1 (hardest) .. 16 (easiest)."""

    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float).ravel()
        if scores.size == 0 or not np.all(np.isfinite(scores)):
            raise DataError("scores must be a non-empty finite vector")
        if np.any(scores < 1.0) or np.any(scores > 16.0):
            raise DataError("scores must lie in [1, 16]")
        object.__setattr__(self, "scores", _frozen(scores))


def _read_csv_matrix(path) -> list[list[float]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                if line_no == 1:
                    continue  # header row
                bad = next(c for c in row if not _is_number(c))
                raise DataError(
                    f"{path}:{line_no}: non-numeric cell {bad!r}") from None
            rows.append((line_no, values))
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0][1])
    for line_no, values in rows:
        if len(values) != width:
            raise DataError(f"{path}:{line_no}: expected {width} columns, "
                            f"got {len(values)}")
    return [values for _, values in rows]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _parse_labels(values, path):
    labels = []
    for line_no, value in enumerate(values, start=1):
        if not float(value).is_integer():
            raise DataError(f"{path}:{line_no}: invalid label value {value!r}")
        labels.append(int(value))
    return np.asarray(labels, dtype=np.int64)


def load_dataset(path_features, path_privileged=None,
                 path_labels=None) -> Dataset:
    """Read a dataset from CSV files.

    Labels come from path_labels (single column) when given, otherwise
    from the last column of the feature file. The privileged file, when
    present, must align row-for-row with the features.
    """
    feature_rows = _read_csv_matrix(path_features)
    if path_labels is None or path_labels == "last":
        if len(feature_rows[0]) < 2:
            raise DataError(f"{path_features}: need at least one feature "
                            "column besides the label column")
        labels = _parse_labels([row[-1] for row in feature_rows],
                               path_features)
        x = np.asarray([row[:-1] for row in feature_rows], dtype=float)
    else:
        label_rows = _read_csv_matrix(path_labels)
        if any(len(row) != 1 for row in label_rows):
            raise DataError(f"{path_labels}: labels must be a single column")
        if len(label_rows) != len(feature_rows):
            raise DataError(
                f"row-count mismatch: {path_features} has "
                f"{len(feature_rows)} rows, {path_labels} has {len(label_rows)}")
        labels = _parse_labels([row[0] for row in label_rows], path_labels)
        x = np.asarray(feature_rows, dtype=float)
    x_star = None
    if path_privileged is not None:
        priv_rows = _read_csv_matrix(path_privileged)
        if len(priv_rows) != x.shape[0]:
            raise DataError(
                f"row-count mismatch: {path_features} has {x.shape[0]} rows, "
                f"{path_privileged} has {len(priv_rows)}")
        x_star = np.asarray(priv_rows, dtype=float)
    return Dataset(x=x, y=labels, x_star=x_star)


def normalize(data: Dataset, scheme: str, space: str = "original") -> Dataset:
    """Scale each sample vector to unit L1 or L2 length.

    All-zero rows pass through unchanged (empty histograms are legal).
    """
    scheme = scheme.lower()
    if scheme not in ("l1", "l2"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if space not in ("original", "privileged"):
        raise ValueError(f"unknown space {space!r}")
    if space == "privileged" and data.x_star is None:
        raise DataError("dataset has no privileged block to normalize")
    block = data.x if space == "original" else data.x_star
    if scheme == "l1":
        norms = np.sum(np.abs(block), axis=1)
    else:
        norms = np.sqrt(np.sum(block * block, axis=1))
    scaled = np.where(norms[:, None] > 0.0, block / np.where(
        norms[:, None] > 0.0, norms[:, None], 1.0), block)
    if space == "original":
        return Dataset(x=scaled, y=data.y, x_star=data.x_star)
    return Dataset(x=data.x, y=data.y, x_star=scaled)


def split(data: Dataset, n_train_per_class: int, seed: int):
    """Per-class stratified split: exactly n_train_per_class samples of
    every class go to train, the rest to test. Deterministic in seed."""
    if n_train_per_class < 1:
        raise DataError("n_train_per_class must be at least 1")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for cls in np.unique(data.y):
        members = np.flatnonzero(data.y == cls)
        if members.size < n_train_per_class + 1:
            raise DataError(
                f"class {cls} has {members.size} samples; need at least "
                f"{n_train_per_class + 1}")
        perm = rng.permutation(members)
        train_idx.append(perm[:n_train_per_class])
        test_idx.append(perm[n_train_per_class:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return _take(data, train_idx), _take(data, test_idx)


def _take(data: Dataset, idx: np.ndarray) -> Dataset:
    x_star = None if data.x_star is None else data.x_star[idx]
    return Dataset(x=data.x[idx], y=data.y[idx], x_star=x_star)


def make_synthetic_lupi(spec: SyntheticSpec) -> Dataset:
    """Generate a paired-space binary dataset with shared easiness.

    Draw order (fixed): labels are +1 for the first n/2 rows and -1 for
    the rest; easiness e_i ~ U[lo, hi]; privileged noise; original noise.
    Sample i is y_i * e_i along the first canonical basis vector of each
    space plus isotropic Gaussian noise, so the same samples are easy or
    hard in both spaces.
    """
    rng = np.random.default_rng(spec.seed)
    half = spec.n // 2
    y = np.concatenate([np.ones(half, dtype=np.int64),
                        -np.ones(half, dtype=np.int64)])
    easiness = rng.uniform(spec.easiness_lo, spec.easiness_hi, size=spec.n)
    signal = y.astype(float) * easiness
    x_star = np.zeros((spec.n, spec.d_star))
    x_star[:, 0] = signal
    x_star += rng.normal(0.0, spec.noise_priv, size=(spec.n, spec.d_star))
    x = np.zeros((spec.n, spec.d))
    x[:, 0] = signal
    x += rng.normal(0.0, spec.noise_orig, size=(spec.n, spec.d))
    return Dataset(x=x, y=y, x_star=x_star)


def score_to_margin(scores: HumanScores, y):
    """Map scores in [1, 16] affinely onto margins in [0, 2].

    Values in [0, 1] mark hard samples, values above 1 easy ones. Margins
    of 0 are possible; feed the result through the margin-transfer
    threshold before training with it.
    """
    y = np.asarray(y).ravel()
    if y.shape[0] != scores.scores.shape[0]:
        raise DataError("scores and labels must have equal length")
    from .margin_transfer import MarginVector
    rho = 2.0 * (scores.scores - 1.0) / 15.0
    return MarginVector(rho=rho, epsilon=0.0)


def write_dataset_csv(data: Dataset, features_path, labels_path,
                      privileged_path=None) -> None:
    """Write the generator's CSV layout: one sample per row, no header."""
    _write_matrix(features_path, data.x)
    with open(labels_path, "w", newline="") as fh:
        for label in data.y:
            fh.write(f"{int(label)}\n")
    if privileged_path is not None:
        if data.x_star is None:
            raise DataError("dataset has no privileged block to write")
        _write_matrix(privileged_path, data.x_star)


def _write_matrix(path, matrix) -> None:
    with open(path, "w", newline="") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
