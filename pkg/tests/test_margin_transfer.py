import numpy as np
import pytest

from lupi.data import Dataset, HumanScores, SyntheticSpec, make_synthetic_lupi, score_to_margin, split
from lupi.errors import DataError
from lupi.margin_transfer import (MarginTransferConfig, MarginVector,
                                  bundle_from_dict, bundle_to_dict,
                                  compute_transfer_margins, threshold_margins,
                                  train_margin_transfer, train_with_margins)
from lupi.qp import OPTIMAL, solve_qp
from lupi.svm import (LinearModel, SvmConfig, predict_labels,
                      primal_objective, train_svm)

from util import margin_primal_qp


def test_margins_thresholded_at_epsilon():
    teacher = LinearModel(w=np.array([1.0]), b=0.0)
    x_star = np.array([[3.0], [-5.0], [0.05]])
    y = np.array([1, 1, 1])
    margins = compute_transfer_margins(teacher, x_star, y, epsilon=0.1)
    np.testing.assert_allclose(margins.rho, [3.0, 0.1, 0.1])


def test_margin_sign_handling():
    teacher = LinearModel(w=np.array([1.0]), b=0.0)
    margins = compute_transfer_margins(teacher, np.array([[-2.0]]),
                                       np.array([-1]), epsilon=0.1)
    assert margins.rho[0] == 2.0


def test_all_misclassified_saturates_at_floor():
    teacher = LinearModel(w=np.array([1.0]), b=0.0)
    x_star = np.array([[-1.0], [-2.0], [-0.5]])
    y = np.array([1, 1, 1])
    margins = compute_transfer_margins(teacher, x_star, y, epsilon=0.1)
    np.testing.assert_array_equal(margins.rho, [0.1, 0.1, 0.1])
    assert margins.rho.min() >= margins.epsilon


def test_margin_vector_enforces_floor():
    with pytest.raises(ValueError):
        MarginVector(rho=np.array([0.05, 1.0]), epsilon=0.1)


def test_unit_margins_reduce_to_plain_svm():
    rng = np.random.default_rng(23)
    for _ in range(10):
        n, d = 20, 4
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        y[:2] = (1.0, -1.0)
        x = rng.normal(size=(n, d)) + 0.4 * y[:, None]
        forced = MarginVector(rho=np.ones(n), epsilon=0.1)
        student = train_with_margins(x, y, forced, c=1.5, tol=1e-9)
        plain = train_svm(x, y, SvmConfig(c=1.5, use_bias=False, tol=1e-9))
        assert np.max(np.abs(student.w - plain.w)) <= 1e-6


def test_reparameterization_matches_direct_qp():
    # Eq-as-printed (data-dependent margins) solved directly as a QP vs
    # the divide-by-rho weighted-SVM route.
    rng = np.random.default_rng(29)
    for _ in range(100):
        n = int(rng.integers(4, 31))
        d = int(rng.integers(1, 6))
        d_star = int(rng.integers(1, 4))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        y[:2] = (1.0, -1.0)
        x = rng.normal(size=(n, d)) + 0.4 * y[:, None]
        x_star = rng.normal(size=(n, d_star)) + 0.8 * y[:, None]
        c = float(rng.uniform(0.2, 5.0))
        teacher = train_svm(x_star, y, SvmConfig(c=1.0, tol=1e-8))
        margins = compute_transfer_margins(teacher, x_star, y, epsilon=0.1)

        student = train_with_margins(x, y, margins, c=c, tol=1e-8)
        x_hat = x / margins.rho[:, None]
        obj_student = primal_objective(student, x_hat, y, c * margins.rho)

        sol = solve_qp(margin_primal_qp(x, y, np.full(n, c), margins.rho),
                       tol=1e-9)
        assert sol.status == OPTIMAL
        rel = abs(obj_student - sol.objective) / max(abs(sol.objective), 1e-12)
        assert rel <= 1e-4


def test_feasible_point_bijection_preserves_objective():
    rng = np.random.default_rng(31)
    n, d = 12, 3
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    x = rng.normal(size=(n, d))
    rho = rng.uniform(0.1, 3.0, size=n)
    c = 1.7
    for _ in range(50):
        w = rng.normal(size=d)
        xi = np.maximum(0.0, rho - y * (x @ w)) + rng.uniform(0.01, 1.0, n)
        # Forward map: xi_hat = xi / rho keeps feasibility and objective.
        xi_hat = xi / rho
        assert np.all(y * ((x / rho[:, None]) @ w) >= 1.0 - xi_hat - 1e-12)
        obj3 = 0.5 * w @ w + c * np.sum(xi)
        obj4 = 0.5 * w @ w + np.sum(c * rho * xi_hat)
        assert abs(obj3 - obj4) <= 1e-10 * max(1.0, abs(obj3))
        # Backward map from a feasible reparameterized point.
        xi_back = xi_hat * rho
        assert np.all(y * (x @ w) >= rho - xi_back - 1e-12)
        assert abs((0.5 * w @ w + c * np.sum(xi_back)) - obj4) \
            <= 1e-10 * max(1.0, abs(obj4))


def test_teacher_rescaling_preserves_ranking():
    rng = np.random.default_rng(37)
    teacher = LinearModel(w=rng.normal(size=3), b=0.3)
    scaled = LinearModel(w=3.7 * teacher.w, b=3.7 * teacher.b)
    x_star = rng.normal(size=(40, 3))
    y = np.where(rng.random(40) < 0.5, 1, -1)
    m1 = compute_transfer_margins(teacher, x_star, y, epsilon=0.1)
    m2 = compute_transfer_margins(scaled, x_star, y, epsilon=0.1)
    above = (m1.rho > 0.1) & (m2.rho > 0.1)
    np.testing.assert_allclose(m2.rho[above], 3.7 * m1.rho[above], rtol=1e-12)
    np.testing.assert_array_equal(np.argsort(m1.rho[above], kind="stable"),
                                  np.argsort(m2.rho[above], kind="stable"))


def test_hard_sample_gets_smallest_stage2_cost():
    teacher = LinearModel(w=np.array([1.0]), b=0.0)
    x_star = np.array([[-4.0], [0.5], [2.0]])
    y = np.array([1, 1, 1])
    margins = compute_transfer_margins(teacher, x_star, y, epsilon=0.1)
    costs = 2.0 * margins.rho
    assert costs[0] == 2.0 * 0.1
    assert costs[0] < costs[1] < costs[2]


def test_full_pipeline_structure():
    data = make_synthetic_lupi(SyntheticSpec(n=60, seed=3))
    result = train_margin_transfer(data, MarginTransferConfig(epsilon=0.1))
    student, margins, teacher = result
    assert margins.rho.min() >= 0.1
    assert student.b == 0.0           # stage 2 trains without a bias
    assert teacher.meta["use_bias"]
    assert student.w.shape == (data.d,)
    assert teacher.w.shape == (data.d_star,)


def test_requires_privileged_block_and_binary_labels():
    plain = Dataset(x=np.ones((4, 2)), y=np.array([1, -1, 1, -1]))
    with pytest.raises(DataError):
        train_margin_transfer(plain)
    multi = Dataset(x=np.ones((4, 2)), y=np.array([0, 1, 2, 1]),
                    x_star=np.ones((4, 1)))
    with pytest.raises(DataError):
        train_margin_transfer(multi)


def test_student_beats_or_matches_svm_in_designed_regime():
    # Easy/hard structure is shared across spaces and nearly noiseless on
    # the privileged side; transferred margins should help on average.
    student_acc, svm_acc = [], []
    for seed in range(20):
        data = make_synthetic_lupi(SyntheticSpec(n=600, seed=seed))
        train, test = split(data, n_train_per_class=100, seed=seed)
        result = train_margin_transfer(train, MarginTransferConfig(
            c_priv=1.0, c_orig=1.0, epsilon=0.1))
        student_acc.append(
            np.mean(predict_labels(result.student, test.x) == test.y))
        baseline = train_svm(train.x, train.y, SvmConfig(c=1.0))
        svm_acc.append(np.mean(predict_labels(baseline, test.x) == test.y))
    assert np.mean(student_acc) >= np.mean(svm_acc)


def test_human_scores_feed_stage_two():
    data = make_synthetic_lupi(SyntheticSpec(n=40, seed=8))
    raw = 1.0 + 15.0 * (np.arange(40) / 39.0)
    margins = score_to_margin(HumanScores(scores=raw), data.y)
    floored = threshold_margins(margins, 0.1)
    model = train_with_margins(data.x, data.y, floored, c=1.0)
    assert model.w.shape == (data.d,)
    with pytest.raises(ValueError):
        train_with_margins(data.x, data.y, margins, c=1.0)


def test_bundle_roundtrip():
    data = make_synthetic_lupi(SyntheticSpec(n=30, seed=4))
    result = train_margin_transfer(data)
    doc = bundle_to_dict(result)
    back = bundle_from_dict(doc)
    np.testing.assert_array_equal(back.student.w, result.student.w)
    np.testing.assert_array_equal(back.teacher.w, result.teacher.w)
    np.testing.assert_array_equal(back.margins.rho, result.margins.rho)
