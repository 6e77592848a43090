"""End-to-end method comparison: repeated seeded splits, joint
cross-validation per method, retraining with the winning parameters, and
a significance-tested report.

Repeats are independent and may run in worker processes; results are
assembled in repeat order, so the report is identical for any job count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .data import Dataset, split
from .methods import (MethodSettings, REFERENCE, check_method, fit_binary,
                      param_count)
from .model_selection import CvGrid, CvPlan, cross_validate, grid_for
from .multiclass import predict_ovr, train_ovr
from .stats import ExperimentReport, build_report, report_to_dict


@dataclass(frozen=True)
class ExperimentConfig:
    methods: Tuple[str, ...] = ("svm", "margin_transfer", "svm_plus",
                                "reference_svm_on_privileged")
    repeats: int = 20
    n_train_per_class: int = 100
    folds: int = 5
    cv_repeats: int = 5
    seed: int = 0
    epsilon: float = 0.1
    normalization: Optional[str] = None
    c_grid: Optional[Tuple[float, ...]] = None
    gamma_grid: Optional[Tuple[float, ...]] = None
    jobs: int = 1
    task_name: str = "task"
    settings: MethodSettings = field(default_factory=MethodSettings)

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method required")
        for method in self.methods:
            check_method(method)
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.normalization is not None \
                and self.normalization.lower() not in ("l1", "l2"):
            raise ValueError("normalization must be l1, l2 or None")
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.c_grid is not None:
            object.__setattr__(self, "c_grid", tuple(self.c_grid))
        if self.gamma_grid is not None:
            object.__setattr__(self, "gamma_grid", tuple(self.gamma_grid))
        object.__setattr__(self, "settings", MethodSettings(
            epsilon=self.epsilon, tol=self.settings.tol,
            rel_tol=self.settings.rel_tol,
            max_epochs=self.settings.max_epochs,
            qp_tol=self.settings.qp_tol,
            qp_max_iter=self.settings.qp_max_iter))


def method_grid(method: str, config: ExperimentConfig) -> CvGrid:
    """The search grid a method gets under this configuration.

    Unnormalized data uses the 7-value grid (same as L2). The reference
    baseline's single dimension is its privileged-space cost.
    """
    norm = (config.normalization or "l2").lower()
    orig = config.c_grid or grid_for(norm, "original")
    priv = config.gamma_grid or grid_for(norm, "privileged")
    if method == REFERENCE:
        return CvGrid(orig_values=priv)
    if param_count(method) == 1:
        return CvGrid(orig_values=orig)
    return CvGrid(orig_values=orig, priv_values=priv)


def _repeat_seeds(seed: int, repeat: int) -> Tuple[int, int]:
    state = np.random.SeedSequence([seed, repeat]).generate_state(2)
    return int(state[0]), int(state[1])


def run_repeat(config: ExperimentConfig, data: Dataset, repeat: int):
    """One repeat: split, per-method CV, retrain, test accuracy.

    Returns (accuracies per method, selected parameters per method).
    """
    split_seed, cv_seed = _repeat_seeds(config.seed, repeat)
    train, test = split(data, config.n_train_per_class, seed=split_seed)
    cv_repeats = config.cv_repeats if data.is_binary else 1
    plan = CvPlan(outer_repeats=cv_repeats, folds=config.folds, seed=cv_seed)

    accuracies = []
    selected = {}
    for method in config.methods:
        grid = method_grid(method, config)
        best, _ = cross_validate(train, method, grid, plan, config.settings)
        selected[method] = list(best)
        if data.is_binary:
            clf = fit_binary(method, train.x, train.x_star,
                             train.y.astype(float), best, config.settings)
            scores = clf.scores(test.x, test.x_star)
            predicted = np.where(scores >= 0.0, 1, -1)
        else:
            ovr = train_ovr(train, method, best, config.settings)
            predicted = predict_ovr(ovr, test.x, test.x_star)
        accuracies.append(float(np.mean(predicted == test.y)))
    return accuracies, selected


def _worker(payload):
    config, x, y, x_star, repeat = payload
    data = Dataset(x=x, y=y, x_star=x_star)
    return repeat, run_repeat(config, data, repeat)


def run_experiment(config: ExperimentConfig, data: Dataset):
    """Returns (ExperimentReport, per-repeat selected parameters)."""
    payloads = [(config, np.asarray(data.x), np.asarray(data.y),
                 None if data.x_star is None else np.asarray(data.x_star), r)
                for r in range(config.repeats)]
    if config.jobs > 1 and config.repeats > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_worker, payloads))
    else:
        results = [_worker(p) for p in payloads]
    results.sort(key=lambda item: item[0])
    accuracies = np.array([acc for _, (acc, _) in results])
    selected = [sel for _, (_, sel) in results]
    report = build_report(config.methods, accuracies)
    return report, selected


def config_to_dict(config: ExperimentConfig) -> dict:
    """Every result-affecting knob, defaults expanded, for provenance.

    The jobs count is deliberately absent: it cannot change the results,
    and reports must be byte-identical across job counts.
    """
    return {
        "methods": list(config.methods),
        "repeats": config.repeats,
        "n_train_per_class": config.n_train_per_class,
        "folds": config.folds,
        "cv_repeats": config.cv_repeats,
        "seed": config.seed,
        "epsilon": config.epsilon,
        "normalization": config.normalization,
        "c_grid": None if config.c_grid is None else list(config.c_grid),
        "gamma_grid": (None if config.gamma_grid is None
                       else list(config.gamma_grid)),
        "task_name": config.task_name,
        "solver": {"tol": config.settings.tol,
                   "rel_tol": config.settings.rel_tol,
                   "max_epochs": config.settings.max_epochs,
                   "qp_tol": config.settings.qp_tol,
                   "qp_max_iter": config.settings.qp_max_iter},
    }


def experiment_document(config: ExperimentConfig, report: ExperimentReport,
                        selected) -> dict:
    return {"config": config_to_dict(config),
            "report": report_to_dict(report),
            "selected_params": selected}


def document_to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
