"""Command-line interface.

Subcommands: gen (synthetic data to CSV), train (one model to JSON),
experiment (repeated comparison with CV and significance tests),
diag (easy-hard diagnostics for a model bundle, or a raw QP from JSON).

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver failure.
Outputs carry no timestamps; a rerun with the same flags and seed writes
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import margin_transfer as mt
from . import svm_plus as sp
from .data import (Dataset, HumanScores, SyntheticSpec, load_dataset,
                   make_synthetic_lupi, normalize, score_to_margin,
                   write_dataset_csv)
from .errors import DataError, DegenerateRanksError, SolverFailure
from .experiment import (ExperimentConfig, document_to_json,
                         experiment_document, run_experiment)
from .methods import METHODS, MARGIN_TRANSFER, REFERENCE, SVM, SVM_PLUS
from .qp import QpProblem, solve_qp
from .stats import easiness_correlation, report_csv_lines
from .svm import (SvmConfig, decision_margins, model_from_dict,
                  model_to_dict, train_svm)


class UsageError(Exception):
    """Flag combinations argparse cannot express (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; 2 is reserved for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_data_flags(parser, privileged_required=False):
    parser.add_argument("--features", required=True,
                        help="CSV of original features (one sample per row)")
    parser.add_argument("--privileged", required=privileged_required,
                        help="CSV of privileged features, row-aligned")
    parser.add_argument("--labels",
                        help="single-column label CSV; default: last column "
                             "of --features")
    parser.add_argument("--normalize", choices=("l1", "l2", "none"),
                        default="none",
                        help="per-sample normalization of original features")
    parser.add_argument("--normalize-privileged",
                        choices=("l1", "l2", "none"), default="none",
                        help="per-sample normalization of privileged features")


def _load(args) -> Dataset:
    data = load_dataset(args.features, args.privileged, args.labels)
    if args.normalize != "none":
        data = normalize(data, args.normalize, "original")
    if getattr(args, "normalize_privileged", "none") != "none":
        if data.x_star is None:
            raise DataError("--normalize-privileged given but no "
                            "--privileged file")
        data = normalize(data, args.normalize_privileged, "privileged")
    return data


def _grid(text):
    values = tuple(float(v) for v in text.split(","))
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lupi",
                     description="Train and compare classifiers that learn "
                                 "from privileged training-time features.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[], help="generate synthetic data",
                         description="Write a synthetic paired-space dataset "
                                     "as features/privileged/labels CSVs.")
    gen.add_argument("--n", type=int, default=200, help="total samples (even)")
    gen.add_argument("--d", type=int, default=10)
    gen.add_argument("--d-star", type=int, default=2)
    gen.add_argument("--noise-orig", type=float, default=1.0)
    gen.add_argument("--noise-priv", type=float, default=0.05)
    gen.add_argument("--easiness", type=float, nargs=2, metavar=("LO", "HI"),
                     default=(0.2, 2.0))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=cmd_gen)

    train = sub.add_parser("train", help="train one model",
                           description="Train a single model and write it "
                                       "as JSON.")
    train.add_argument("--method", choices=METHODS, required=True)
    _add_data_flags(train)
    train.add_argument("--c", type=float, default=1.0,
                       help="original-space cost (C)")
    train.add_argument("--gamma", type=float, default=1.0,
                       help="privileged-space regularizer (svm_plus)")
    train.add_argument("--c-priv", type=float, default=1.0,
                       help="stage-1 cost (margin_transfer) or reference C")
    train.add_argument("--epsilon", type=float, default=0.1,
                       help="margin threshold (margin_transfer)")
    train.add_argument("--out", required=True, help="model JSON path")
    train.set_defaults(func=cmd_train)

    exp = sub.add_parser("experiment", help="run a repeated comparison",
                         description="Repeated splits, per-method joint CV, "
                                     "report with Wilcoxon flags.")
    source = exp.add_argument_group("data source (files or --synthetic)")
    source.add_argument("--features")
    source.add_argument("--privileged")
    source.add_argument("--labels")
    source.add_argument("--synthetic", action="store_true",
                        help="generate data instead of reading files")
    source.add_argument("--n", type=int, default=600)
    source.add_argument("--d", type=int, default=10)
    source.add_argument("--d-star", type=int, default=2)
    source.add_argument("--noise-orig", type=float, default=1.0)
    source.add_argument("--noise-priv", type=float, default=0.05)
    source.add_argument("--easiness", type=float, nargs=2,
                        metavar=("LO", "HI"), default=(0.2, 2.0))
    exp.add_argument("--methods", default=",".join(METHODS),
                     help="comma-separated subset of: " + ",".join(METHODS))
    exp.add_argument("--repeats", type=int, default=20)
    exp.add_argument("--n-train-per-class", type=int, default=100)
    exp.add_argument("--folds", type=int, default=5)
    exp.add_argument("--cv-repeats", type=int, default=5)
    exp.add_argument("--normalize", choices=("l1", "l2", "none"),
                     default="none")
    exp.add_argument("--normalize-privileged", choices=("l1", "l2", "none"),
                     default="none")
    exp.add_argument("--c-grid", type=_grid,
                     help="comma-separated override of the original grid")
    exp.add_argument("--gamma-grid", type=_grid,
                     help="comma-separated override of the privileged grid")
    exp.add_argument("--epsilon", type=float, default=0.1)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--out", required=True, help="output directory")
    exp.set_defaults(func=cmd_experiment)

    diag = sub.add_parser("diag", help="diagnostics",
                          description="Easy-hard diagnostics for a trained "
                                      "bundle, or solve a QP from JSON.")
    diag_sub = diag.add_subparsers(dest="diag_command", required=True)

    dm = diag_sub.add_parser("model", help="easy-hard diagnostics")
    dm.add_argument("--bundle", required=True, help="JSON from `lupi train`")
    _add_data_flags(dm)
    dm.add_argument("--scores", help="single-column human scores in [1,16]")
    dm.add_argument("--epsilon", type=float, default=0.1)
    dm.add_argument("--out", help="write JSON here (default: stdout)")
    dm.set_defaults(func=cmd_diag_model)

    dq = diag_sub.add_parser(
        "qp", help="solve a QP from JSON",
        description='JSON layout: {"p": [[...]], "q": [...], "g": [[...]], '
                    '"h": [...], "a": [[...]], "b": [...]} with g/h and a/b '
                    "optional.")
    dq.add_argument("--problem", required=True, help="QP JSON path")
    dq.add_argument("--tol", type=float, default=1e-8)
    dq.add_argument("--out", help="write JSON here (default: stdout)")
    dq.set_defaults(func=cmd_diag_qp)
    return parser


def cmd_gen(args) -> int:
    spec = SyntheticSpec(n=args.n, d=args.d, d_star=args.d_star,
                         noise_orig=args.noise_orig,
                         noise_priv=args.noise_priv,
                         easiness_lo=args.easiness[0],
                         easiness_hi=args.easiness[1], seed=args.seed)
    data = make_synthetic_lupi(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(data, out / "features.csv", out / "labels.csv",
                      out / "privileged.csv")
    positive = int(np.sum(data.y == 1))
    print(f"wrote {out}/features.csv, privileged.csv, labels.csv: "
          f"N={data.n} d={data.d} d_star={data.d_star} "
          f"classes +1:{positive} -1:{data.n - positive}")
    return 0


def cmd_train(args) -> int:
    if args.method in (MARGIN_TRANSFER, SVM_PLUS, REFERENCE) \
            and not args.privileged:
        raise UsageError(f"method {args.method} requires --privileged")
    data = _load(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)

    if args.method == SVM:
        model = train_svm(data.x, data.y.astype(float), SvmConfig(c=args.c))
        doc = {"method": SVM, "model": model_to_dict(model)}
    elif args.method == REFERENCE:
        model = train_svm(data.x_star, data.y.astype(float),
                          SvmConfig(c=args.c_priv))
        doc = {"method": REFERENCE, "model": model_to_dict(model),
               "space": "privileged"}
    elif args.method == MARGIN_TRANSFER:
        result = mt.train_margin_transfer(data, mt.MarginTransferConfig(
            c_priv=args.c_priv, c_orig=args.c, epsilon=args.epsilon))
        doc = {"method": MARGIN_TRANSFER, **mt.bundle_to_dict(result)}
        margins_path = out.with_name(out.stem + ".margins.json")
        margins_path.write_text(json.dumps(
            {"rho": result.margins.rho.tolist(),
             "epsilon": result.margins.epsilon}, sort_keys=True, indent=2)
            + "\n")
        print(f"wrote {margins_path}")
    else:
        model, slack, diagnostics = sp.train_svm_plus(
            data.x, data.x_star, data.y.astype(float),
            sp.SvmPlusConfig(c=args.c, gamma=args.gamma))
        doc = {"method": SVM_PLUS, **sp.bundle_to_dict(model, slack),
               "diagnostics": {"objective": diagnostics.objective,
                               "kkt_residual": diagnostics.kkt_residual,
                               "status": diagnostics.status}}
    out.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"wrote {out}")
    return 0


def cmd_experiment(args) -> int:
    if args.synthetic:
        spec = SyntheticSpec(n=args.n, d=args.d, d_star=args.d_star,
                             noise_orig=args.noise_orig,
                             noise_priv=args.noise_priv,
                             easiness_lo=args.easiness[0],
                             easiness_hi=args.easiness[1], seed=args.seed)
        data = make_synthetic_lupi(spec)
        task = "synthetic"
    elif args.features:
        data = _load(args)
        task = Path(args.features).stem
    else:
        raise UsageError("experiment needs --features or --synthetic")
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = ExperimentConfig(
        methods=methods, repeats=args.repeats,
        n_train_per_class=args.n_train_per_class, folds=args.folds,
        cv_repeats=args.cv_repeats, seed=args.seed, epsilon=args.epsilon,
        normalization=None if args.normalize == "none" else args.normalize,
        c_grid=args.c_grid, gamma_grid=args.gamma_grid, jobs=args.jobs,
        task_name=task)
    report, selected = run_experiment(config, data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(document_to_json(
        experiment_document(config, report, selected)))
    (out / "report.csv").write_text(
        "\n".join(report_csv_lines(report, task=task)) + "\n")
    for i, method in enumerate(report.methods):
        print(f"{method}: {report.means[i]:.4f} +/- {report.stderrs[i]:.4f}")
    print(f"wrote {out}/report.json and report.csv")
    return 0


def _tau_entry(a, b) -> dict:
    try:
        return {"tau": easiness_correlation(a, b), "degenerate": False}
    except DegenerateRanksError:
        return {"tau": None, "degenerate": True}


def cmd_diag_model(args) -> int:
    data = _load(args)
    bundle = json.loads(Path(args.bundle).read_text())
    method = bundle.get("method")
    y = data.y.astype(float)
    doc: dict = {"method": method, "n": data.n}

    original_margins = None
    privileged_margins = None
    if method == MARGIN_TRANSFER:
        result = mt.bundle_from_dict(bundle)
        if data.x_star is None:
            raise DataError("margin_transfer diagnostics need --privileged")
        privileged_margins = decision_margins(result.teacher, data.x_star, y)
        original_margins = decision_margins(result.student, data.x, y)
        margins = mt.compute_transfer_margins(result.teacher, data.x_star, y,
                                              args.epsilon)
        doc["teacher_margins"] = privileged_margins.tolist()
        doc["rho"] = margins.rho.tolist()
        doc["epsilon"] = margins.epsilon
    elif method == SVM_PLUS:
        model, slack = sp.bundle_from_dict(bundle)
        if data.x_star is None:
            raise DataError("svm_plus diagnostics need --privileged")
        values = sp.slack_values(slack, data.x_star)
        original_margins = decision_margins(model, data.x, y)
        # Small slack marks easy samples; negate so every margin-like
        # vector below orders easy samples upward.
        privileged_margins = -values
        doc["slack_values"] = values.tolist()
    elif method in (SVM, REFERENCE):
        model = model_from_dict(bundle["model"])
        if method == REFERENCE:
            if data.x_star is None:
                raise DataError("reference diagnostics need --privileged")
            privileged_margins = decision_margins(model, data.x_star, y)
        else:
            original_margins = decision_margins(model, data.x, y)
            doc["margins"] = original_margins.tolist()
    else:
        raise DataError(f"bundle has unknown method {method!r}")

    human = None
    if args.scores:
        rows = [float(v) for v in
                Path(args.scores).read_text().split()]
        scores = HumanScores(scores=np.asarray(rows))
        human = score_to_margin(scores, data.y).rho
        doc["human_rho"] = human.tolist()

    taus = {}
    if privileged_margins is not None and original_margins is not None:
        taus["privileged_vs_original"] = _tau_entry(privileged_margins,
                                                    original_margins)
    if privileged_margins is not None and human is not None:
        taus["privileged_vs_scores"] = _tau_entry(privileged_margins, human)
    if original_margins is not None and human is not None:
        taus["original_vs_scores"] = _tau_entry(original_margins, human)
    if taus:
        doc["kendall_tau"] = taus

    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_diag_qp(args) -> int:
    raw = json.loads(Path(args.problem).read_text())
    try:
        problem = QpProblem(
            p_matrix=np.asarray(raw["p"], dtype=float),
            q=np.asarray(raw["q"], dtype=float),
            g_ineq=None if "g" not in raw else np.asarray(raw["g"], dtype=float),
            h_ineq=None if "h" not in raw else np.asarray(raw["h"], dtype=float),
            a_eq=None if "a" not in raw else np.asarray(raw["a"], dtype=float),
            b_eq=None if "b" not in raw else np.asarray(raw["b"], dtype=float))
    except (KeyError, ValueError) as exc:
        raise DataError(f"bad QP document: {exc}") from exc
    solution = solve_qp(problem, tol=args.tol)
    doc = {"x": solution.x.tolist(),
           "lambda_ineq": solution.lambda_ineq.tolist(),
           "nu_eq": solution.nu_eq.tolist(),
           "objective": solution.objective,
           "kkt_residual": solution.kkt_residual,
           "status": solution.status,
           "iterations": solution.iterations}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
