"""SVM+ trainer: slack variables parameterized in the privileged space.

Instead of one free slack per sample, each sample's slack is the value of
a learned linear function of its privileged features,
slack_i = <w_star, x_star_i> + b_star, required to be non-negative. The
joint convex program over (w, b, w_star, b_star) is assembled in the
primal (dimension d + d_star + 2, independent of N in the quadratic
block) and handed to the interior-point QP solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, NamedTuple, Optional

import numpy as np

from .errors import SolverFailure
from .qp import INFEASIBLE, OPTIMAL, QpProblem, solve_qp
from .svm import LinearModel


@dataclass(frozen=True)
class SlackModel:
    """Learned slack function: slack(x_star) = <w_star, x_star> + b_star."""

    w_star: np.ndarray
    b_star: float

    def __post_init__(self):
        w = np.asarray(self.w_star, dtype=float).ravel()
        if not np.all(np.isfinite(w)) or not np.isfinite(self.b_star):
            raise ValueError("slack model parameters must be finite")
        object.__setattr__(self, "w_star", w)
        object.__setattr__(self, "b_star", float(self.b_star))


@dataclass(frozen=True)
class SvmPlusConfig:
    c: float = 1.0
    gamma: float = 1.0
    tol: float = 1e-8
    max_iter: int = 100

    def __post_init__(self):
        if self.c <= 0 or self.gamma <= 0 or self.tol <= 0:
            raise ValueError("c, gamma and tol must be positive")


class SvmPlusDiagnostics(NamedTuple):
    objective: float
    kkt_residual: float
    slack_values: np.ndarray
    status: str
    iterations: int
    worst_block: Optional[str]


def slack_values(slack: SlackModel, x_star) -> np.ndarray:
    """Slack function on each row; large values mark hard samples,
    near-zero values easy ones."""
    x_star = np.asarray(x_star, dtype=float)
    if x_star.ndim != 2 or x_star.shape[1] != slack.w_star.shape[0]:
        raise ValueError(
            f"expected {slack.w_star.shape[0]} privileged columns, "
            f"got {x_star.shape}")
    return x_star @ slack.w_star + slack.b_star


def _assemble_qp(x, x_star, y, config: SvmPlusConfig) -> QpProblem:
    n, d = x.shape
    d_star = x_star.shape[1]
    dim = d + 1 + d_star + 1
    sl = slice(d + 1, d + 1 + d_star)  # w_star block

    p_matrix = np.zeros((dim, dim))
    p_matrix[:d, :d] = np.eye(d)
    p_matrix[sl, sl] = config.gamma * np.eye(d_star)

    q = np.zeros(dim)
    q[sl] = config.c * x_star.sum(axis=0)
    q[-1] = config.c * n

    # Rows 0..n-1: margin constraints; rows n..2n-1: slack non-negativity.
    g = np.zeros((2 * n, dim))
    g[:n, :d] = -(y[:, None] * x)
    g[:n, d] = -y
    g[:n, sl] = -x_star
    g[:n, -1] = -1.0
    g[n:, sl] = -x_star
    g[n:, -1] = -1.0
    h = np.concatenate([-np.ones(n), np.zeros(n)])
    return QpProblem(p_matrix=p_matrix, q=q, g_ineq=g, h_ineq=h)


def _worst_block(x, x_star, y, model, slack) -> str:
    values = slack_values(slack, x_star)
    margin_violation = np.max(1.0 - values - y * (x @ model.w + model.b),
                              initial=0.0)
    slack_violation = np.max(-values, initial=0.0)
    return ("margin (2b)" if margin_violation >= slack_violation
            else "slack non-negativity (2c)")


def train_svm_plus(x, x_star, y,
                   config: SvmPlusConfig = SvmPlusConfig()):
    """Solve the joint program; returns (LinearModel, SlackModel,
    SvmPlusDiagnostics)."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if x.ndim != 2 or x_star.ndim != 2:
        raise ValueError("x and x_star must be matrices")
    if x.shape[0] != x_star.shape[0] or x.shape[0] != y.shape[0]:
        raise ValueError("x, x_star and y must agree in row count")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")

    n, d = x.shape
    d_star = x_star.shape[1]
    problem = _assemble_qp(x, x_star, y, config)
    solution = solve_qp(problem, tol=config.tol, max_iter=config.max_iter)

    z = solution.x
    model = LinearModel(
        w=z[:d], b=float(z[d]),
        meta={"c": config.c, "gamma": config.gamma,
              "kkt_residual": solution.kkt_residual,
              "status": solution.status})
    slack = SlackModel(w_star=z[d + 1:d + 1 + d_star], b_star=float(z[-1]))

    if solution.status == INFEASIBLE:
        raise SolverFailure(
            "SVM+ QP reported infeasible; most violated block: "
            f"{_worst_block(x, x_star, y, model, slack)}")

    worst = (None if solution.status == OPTIMAL
             else _worst_block(x, x_star, y, model, slack))
    diagnostics = SvmPlusDiagnostics(
        objective=solution.objective,
        kkt_residual=solution.kkt_residual,
        slack_values=slack_values(slack, x_star),
        status=solution.status,
        iterations=solution.iterations,
        worst_block=worst)
    return model, slack, diagnostics


def objective_value(model: LinearModel, slack: SlackModel, x_star,
                    config: SvmPlusConfig) -> float:
    """Recompute the training objective from the returned parameters."""
    values = slack_values(slack, np.asarray(x_star, dtype=float))
    return float(0.5 * (model.w @ model.w
                        + config.gamma * (slack.w_star @ slack.w_star))
                 + config.c * values.sum())


def bundle_to_dict(model: LinearModel, slack: SlackModel) -> dict:
    return {"w": model.w.tolist(), "b": model.b,
            "w_star": slack.w_star.tolist(), "b_star": slack.b_star,
            "meta": dict(model.meta) if model.meta else {}}


def bundle_from_dict(doc: Mapping[str, Any]):
    model = LinearModel(w=np.asarray(doc["w"], dtype=float),
                        b=float(doc["b"]), meta=dict(doc.get("meta", {})))
    slack = SlackModel(w_star=np.asarray(doc["w_star"], dtype=float),
                       b_star=float(doc["b_star"]))
    return model, slack
