"""Evaluation metrics and the two significance analyses of the protocol:
paired Wilcoxon signed-rank tests between methods and Kendall tau rank
correlation between easy-hard orderings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DegenerateRanksError

# Effective sample sizes up to this use the exact null distribution;
# larger ones the normal approximation with tie and continuity correction.
EXACT_LIMIT = 25


def accuracy(predicted, truth) -> float:
    """Fraction of exact label matches."""
    predicted = np.asarray(predicted).ravel()
    truth = np.asarray(truth).ravel()
    if predicted.shape[0] != truth.shape[0] or predicted.shape[0] == 0:
        raise ValueError("prediction and truth must have equal length >= 1")
    return float(np.mean(predicted == truth))


def mean_stderr(values) -> Tuple[float, float]:
    """Mean and standard error (sample sd over sqrt(n))."""
    values = np.asarray(values, dtype=float).ravel()
    if values.shape[0] < 2:
        raise ValueError("need at least two values")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(values.shape[0]))
    return mean, stderr


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0])
    sorted_vals = values[order]
    i = 0
    while i < values.shape[0]:
        j = i
        while j + 1 < values.shape[0] and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


class WilcoxonResult(NamedTuple):
    p_value: float
    reject: bool


def wilcoxon_signed_rank(a, b, alpha: float = 0.05) -> WilcoxonResult:
    """Two-sided paired signed-rank test on the differences a - b.

    Zero differences are dropped; ties in |d| get average ranks. The null
    distribution is exact (all sign assignments) up to effective n of 25,
    then a normal approximation with tie and continuity correction.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape[0] != b.shape[0]:
        raise ValueError("paired samples must have equal length")
    d = a - b
    d = d[d != 0.0]
    n = d.shape[0]
    if n == 0:
        return WilcoxonResult(p_value=1.0, reject=False)
    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= EXACT_LIMIT:
        p = _exact_p(ranks, w_plus)
    else:
        p = _approx_p(d, ranks, w_plus)
    return WilcoxonResult(p_value=p, reject=bool(p < alpha))


def _exact_p(ranks: np.ndarray, w_plus: float) -> float:
    # Doubling makes tie-averaged ranks integral; the DP walks every sign
    # assignment implicitly, counting how many reach each doubled rank sum.
    n = ranks.shape[0]
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        shifted = counts.copy()
        shifted[r:] += counts[:total + 1 - r]
        counts = shifted
    w2 = int(np.rint(2.0 * w_plus))
    denom = float(2 ** n)
    p_le = float(counts[:w2 + 1].sum()) / denom
    p_ge = float(counts[w2:].sum()) / denom
    return min(1.0, 2.0 * min(p_le, p_ge))


def _approx_p(d: np.ndarray, ranks: np.ndarray, w_plus: float) -> float:
    n = d.shape[0]
    mu = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    variance -= float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
    centered = w_plus - mu
    if centered == 0.0 or variance <= 0.0:
        return 1.0
    z = (centered - 0.5 * math.copysign(1.0, centered)) / math.sqrt(variance)
    return math.erfc(abs(z) / math.sqrt(2.0))


def kendall_tau(u, v) -> float:
    """Tie-corrected Kendall rank correlation (tau-b).

    Raises DegenerateRanksError when one input is constant, which leaves
    the coefficient undefined.
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    n = u.shape[0]
    if n != v.shape[0] or n < 2:
        raise ValueError("need two aligned vectors of length >= 2")
    sign_u = np.sign(u[:, None] - u[None, :])
    sign_v = np.sign(v[:, None] - v[None, :])
    s = float(np.sum(sign_u * sign_v)) / 2.0  # concordant minus discordant
    n0 = n * (n - 1) / 2.0
    n1 = _tie_pairs(u)
    n2 = _tie_pairs(v)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise DegenerateRanksError("rank correlation undefined: an input "
                                   "is constant")
    return s / denom


def _tie_pairs(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts * (counts - 1) / 2.0))


def easiness_correlation(margins_a, margins_b) -> float:
    """Kendall tau between two per-sample easy-hard orderings (signed
    decision values or human-derived margins)."""
    return kendall_tau(margins_a, margins_b)


@dataclass(frozen=True)
class ExperimentReport:
    """Per-repeat accuracies with aggregates and pairwise significance."""

    methods: Tuple[str, ...]
    accuracies: np.ndarray  # (repeats, len(methods))
    means: Tuple[float, ...]
    stderrs: Tuple[float, ...]
    wilcoxon: Dict[Tuple[str, str], WilcoxonResult] = field(
        default_factory=dict)
    taus: Optional[Dict[str, float]] = None
    alpha: float = 0.05

    def __post_init__(self):
        acc = np.asarray(self.accuracies, dtype=float)
        if acc.ndim != 2 or acc.shape[1] != len(self.methods):
            raise ValueError("accuracies must be repeats x methods")
        if np.any(acc < 0.0) or np.any(acc > 1.0):
            raise ValueError("accuracies must lie in [0, 1]")
        if any(s < 0 for s in self.stderrs):
            raise ValueError("standard errors must be non-negative")
        for result in self.wilcoxon.values():
            if not 0.0 <= result.p_value <= 1.0:
                raise ValueError("p-values must lie in [0, 1]")
        object.__setattr__(self, "accuracies", acc)


def build_report(methods, accuracies, alpha: float = 0.05,
                 taus=None) -> ExperimentReport:
    """Aggregate a repeats-by-methods accuracy matrix into a report.

    Pairwise Wilcoxon tests are included only when there are at least
    two repeats.
    """
    methods = tuple(methods)
    accuracies = np.asarray(accuracies, dtype=float)
    repeats = accuracies.shape[0]
    if repeats >= 2:
        stats = [mean_stderr(accuracies[:, j]) for j in range(len(methods))]
        means = tuple(s[0] for s in stats)
        stderrs = tuple(s[1] for s in stats)
        pairwise = {}
        for i, m_a in enumerate(methods):
            for j, m_b in enumerate(methods):
                if i < j:
                    pairwise[(m_a, m_b)] = wilcoxon_signed_rank(
                        accuracies[:, i], accuracies[:, j], alpha=alpha)
    else:
        means = tuple(float(v) for v in accuracies[0])
        stderrs = (0.0,) * len(methods)
        pairwise = {}
    return ExperimentReport(methods=methods, accuracies=accuracies,
                            means=means, stderrs=stderrs, wilcoxon=pairwise,
                            taus=taus, alpha=alpha)


def report_to_dict(report: ExperimentReport) -> dict:
    doc = {
        "methods": list(report.methods),
        "repeats": int(report.accuracies.shape[0]),
        "accuracies": report.accuracies.tolist(),
        "mean": {m: report.means[i] for i, m in enumerate(report.methods)},
        "stderr": {m: report.stderrs[i]
                   for i, m in enumerate(report.methods)},
        "alpha": report.alpha,
    }
    if report.wilcoxon:
        doc["wilcoxon"] = [
            {"a": pair[0], "b": pair[1], "p_value": result.p_value,
             "significant": result.reject}
            for pair, result in sorted(report.wilcoxon.items())]
    if report.taus is not None:
        doc["kendall_tau"] = dict(report.taus)
    return doc


def report_csv_lines(report: ExperimentReport, task: str = "task"):
    """CSV mirroring the comparison-table layout: one row per task,
    mean +/- stderr per method, best method, significance flags."""
    header = ["task"]
    for m in report.methods:
        header += [f"{m}_mean", f"{m}_stderr"]
    header.append("best_method")
    flag_methods = [m for m in report.methods
                    if m not in ("svm",) and "svm" in report.methods]
    header += [f"{m}_significant_vs_svm" for m in flag_methods]
    row = [task]
    for i, _ in enumerate(report.methods):
        row += [f"{report.means[i]:.6f}", f"{report.stderrs[i]:.6f}"]
    best = report.methods[int(np.argmax(report.means))]
    row.append(best)
    for m in flag_methods:
        pair = tuple(sorted(("svm", m), key=list(report.methods).index))
        result = report.wilcoxon.get((pair[0], pair[1]))
        row.append("" if result is None else str(result.reject).lower())
    return [",".join(header), ",".join(row)]
