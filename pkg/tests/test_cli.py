import json

import numpy as np
import pytest

from lupi.cli import main

FAST_EXPERIMENT = ["--repeats", "2", "--n-train-per-class", "10",
                   "--folds", "3", "--cv-repeats", "2",
                   "--c-grid", "1.0", "--gamma-grid", "1.0"]


def _gen(tmp_path, n=40, seed=3, extra=()):
    out = tmp_path / "data"
    code = main(["gen", "--n", str(n), "--d", "3", "--d-star", "2",
                 "--seed", str(seed), "--out", str(out), *extra])
    assert code == 0
    return out


def _data_flags(data_dir):
    return ["--features", str(data_dir / "features.csv"),
            "--privileged", str(data_dir / "privileged.csv"),
            "--labels", str(data_dir / "labels.csv")]


def test_gen_writes_three_consistent_files(tmp_path, capsys):
    out = _gen(tmp_path)
    features = (out / "features.csv").read_text().splitlines()
    privileged = (out / "privileged.csv").read_text().splitlines()
    labels = (out / "labels.csv").read_text().splitlines()
    assert len(features) == len(privileged) == len(labels) == 40
    assert "N=40" in capsys.readouterr().out


def test_gen_is_byte_identical_for_same_seed(tmp_path):
    a = _gen(tmp_path / "a", seed=11)
    b = _gen(tmp_path / "b", seed=11)
    for name in ("features.csv", "privileged.csv", "labels.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_gen_rejects_odd_n(tmp_path):
    code = main(["gen", "--n", "41", "--out", str(tmp_path / "x")])
    assert code == 2


def test_train_svm_writes_model_with_gap(tmp_path):
    data = _gen(tmp_path)
    out = tmp_path / "svm.json"
    code = main(["train", "--method", "svm", *_data_flags(data),
                 "--c", "1.0", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "svm"
    assert doc["model"]["meta"]["gap"] <= 1e-6
    assert doc["model"]["meta"]["c"] == 1.0


def test_train_svm_plus_without_privileged_is_usage_error(tmp_path):
    data = _gen(tmp_path)
    code = main(["train", "--method", "svm_plus",
                 "--features", str(data / "features.csv"),
                 "--labels", str(data / "labels.csv"),
                 "--out", str(tmp_path / "m.json")])
    assert code == 1


def test_train_margin_transfer_writes_margins_file(tmp_path):
    data = _gen(tmp_path)
    out = tmp_path / "mt.json"
    code = main(["train", "--method", "margin_transfer", *_data_flags(data),
                 "--epsilon", "0.1", "--out", str(out)])
    assert code == 0
    margins = json.loads((tmp_path / "mt.margins.json").read_text())
    assert margins["epsilon"] == 0.1
    assert min(margins["rho"]) >= 0.1
    doc = json.loads(out.read_text())
    assert set(doc) >= {"method", "student", "teacher", "margins"}


def test_train_reports_data_error_for_bad_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,1\n3,nope,-1\n")
    code = main(["train", "--method", "svm", "--features", str(bad),
                 "--out", str(tmp_path / "m.json")])
    assert code == 2


def test_unknown_method_is_usage_error(tmp_path):
    data = _gen(tmp_path)
    code = main(["train", "--method", "bogus", *_data_flags(data),
                 "--out", str(tmp_path / "m.json")])
    assert code == 1


def test_experiment_runs_all_methods_and_is_deterministic(tmp_path):
    args = ["experiment", "--synthetic", "--n", "60", "--d", "3",
            "--d-star", "2", "--seed", "7", *FAST_EXPERIMENT,
            "--methods", "svm,margin_transfer,svm_plus,"
                         "reference_svm_on_privileged"]
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    assert (out_a / "report.json").read_bytes() \
        == (out_b / "report.json").read_bytes()
    assert (out_a / "report.csv").read_bytes() \
        == (out_b / "report.csv").read_bytes()
    doc = json.loads((out_a / "report.json").read_text())
    assert doc["config"]["repeats"] == 2
    assert len(doc["report"]["accuracies"]) == 2
    assert len(doc["report"]["accuracies"][0]) == 4
    assert len(doc["selected_params"]) == 2


def test_experiment_jobs_do_not_change_output(tmp_path):
    base = ["experiment", "--synthetic", "--n", "60", "--d", "3",
            "--d-star", "2", "--seed", "9", *FAST_EXPERIMENT,
            "--methods", "svm,margin_transfer"]
    out_1 = tmp_path / "j1"
    out_4 = tmp_path / "j4"
    assert main(base + ["--jobs", "1", "--out", str(out_1)]) == 0
    assert main(base + ["--jobs", "4", "--out", str(out_4)]) == 0
    assert (out_1 / "report.json").read_bytes() \
        == (out_4 / "report.json").read_bytes()


def test_experiment_single_repeat_has_no_wilcoxon(tmp_path):
    out = tmp_path / "r1"
    code = main(["experiment", "--synthetic", "--n", "60", "--d", "3",
                 "--seed", "1", "--repeats", "1",
                 "--n-train-per-class", "10", "--folds", "3",
                 "--cv-repeats", "2", "--c-grid", "1.0",
                 "--gamma-grid", "1.0", "--methods", "svm",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads((out / "report.json").read_text())
    assert "wilcoxon" not in doc["report"]


def test_experiment_from_files(tmp_path):
    data = _gen(tmp_path, n=60)
    out = tmp_path / "filexp"
    code = main(["experiment", *_data_flags(data), *FAST_EXPERIMENT,
                 "--methods", "svm,reference_svm_on_privileged",
                 "--seed", "2", "--out", str(out)])
    assert code == 0
    assert (out / "report.csv").read_text().count("\n") == 2


def test_experiment_without_source_is_usage_error(tmp_path):
    code = main(["experiment", "--methods", "svm",
                 "--out", str(tmp_path / "x")])
    assert code == 1


def test_diag_model_margin_transfer_with_scores(tmp_path):
    data = _gen(tmp_path, n=30)
    bundle = tmp_path / "mt.json"
    assert main(["train", "--method", "margin_transfer", *_data_flags(data),
                 "--out", str(bundle)]) == 0
    rng = np.random.default_rng(0)
    scores_path = tmp_path / "scores.csv"
    scores_path.write_text(
        "\n".join(str(v) for v in rng.uniform(1, 16, size=30)) + "\n")
    out = tmp_path / "diag.json"
    code = main(["diag", "model", "--bundle", str(bundle),
                 *_data_flags(data), "--scores", str(scores_path),
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert min(doc["rho"]) >= doc["epsilon"]
    taus = doc["kendall_tau"]
    assert set(taus) == {"privileged_vs_original", "privileged_vs_scores",
                         "original_vs_scores"}
    for entry in taus.values():
        assert entry["degenerate"] or -1.0 <= entry["tau"] <= 1.0


def test_diag_model_mismatched_rows_is_data_error(tmp_path):
    data = _gen(tmp_path, n=30)
    other = _gen(tmp_path / "other", n=20)
    bundle = tmp_path / "mt.json"
    assert main(["train", "--method", "margin_transfer", *_data_flags(data),
                 "--out", str(bundle)]) == 0
    code = main(["diag", "model", "--bundle", str(bundle),
                 "--features", str(data / "features.csv"),
                 "--privileged", str(other / "privileged.csv"),
                 "--labels", str(data / "labels.csv")])
    assert code == 2


def test_diag_qp_documented_layout(tmp_path):
    problem = tmp_path / "qp.json"
    problem.write_text(json.dumps({
        "p": [[1.0, 0.0], [0.0, 1.0]], "q": [-1.0, -1.0],
        "g": [[-1.0, 0.0]], "h": [-0.5]}))
    out = tmp_path / "sol.json"
    code = main(["diag", "qp", "--problem", str(problem),
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "optimal"
    assert abs(doc["x"][0] - 1.0) < 1e-6
    assert doc["kkt_residual"] <= 1e-8
