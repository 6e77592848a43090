"""Max-margin classifiers that learn from privileged training-time
features, with the model-selection and statistical-evaluation protocol
to compare them."""

from .data import (Dataset, HumanScores, SyntheticSpec, load_dataset,
                   make_synthetic_lupi, normalize, score_to_margin, split)
from .errors import (DataError, DegenerateRanksError, LupiError,
                     SolverFailure)
from .experiment import ExperimentConfig, run_experiment
from .margin_transfer import (MarginTransferConfig, MarginVector,
                              compute_transfer_margins, threshold_margins,
                              train_margin_transfer, train_with_margins)
from .model_selection import CvGrid, CvPlan, cross_validate, grid_for
from .multiclass import OvrModel, predict_ovr, train_ovr
from .qp import QpProblem, QpSolution, solve_qp
from .stats import (ExperimentReport, accuracy, build_report,
                    easiness_correlation, kendall_tau, mean_stderr,
                    wilcoxon_signed_rank)
from .svm import (LinearModel, SvmConfig, decision_margins, predict,
                  predict_labels, train_svm, train_weighted_svm)
from .svm_plus import (SlackModel, SvmPlusConfig, slack_values,
                       train_svm_plus)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "HumanScores", "SyntheticSpec", "load_dataset",
    "make_synthetic_lupi", "normalize", "score_to_margin", "split",
    "DataError", "DegenerateRanksError", "LupiError", "SolverFailure",
    "ExperimentConfig", "run_experiment",
    "MarginTransferConfig", "MarginVector", "compute_transfer_margins",
    "threshold_margins", "train_margin_transfer", "train_with_margins",
    "CvGrid", "CvPlan", "cross_validate", "grid_for",
    "OvrModel", "predict_ovr", "train_ovr",
    "QpProblem", "QpSolution", "solve_qp",
    "ExperimentReport", "accuracy", "build_report", "easiness_correlation",
    "kendall_tau", "mean_stderr", "wilcoxon_signed_rank",
    "LinearModel", "SvmConfig", "decision_margins", "predict",
    "predict_labels", "train_svm", "train_weighted_svm",
    "SlackModel", "SvmPlusConfig", "slack_values", "train_svm_plus",
]
