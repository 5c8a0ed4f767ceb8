"""``oddkit`` command line: generate, fit, score, eval, combine, bench, plot.

Exit codes: 0 success, 2 argument error, 3 data or file error. Payload
(tables, report lines) goes to stdout, diagnostics to stderr.
"""

import argparse
import os
import sys

import numpy as np

from . import data
from .bench import RANDOM_BASELINE, format_csv, format_table, run_benchmark
from .combination import METHODS, combine
from .core import DataError, zscore_standardize
from .persistence import ALGORITHMS, load_model, make_detector, save_model
from .visualize import emit_scatter_plot

EXIT_OK, EXIT_ARGS, EXIT_DATA = 0, 2, 3

# algorithms whose neighborhood size is set by --k, and the param it maps to
_K_PARAM = {"knn": "k", "avgknn": "k", "medknn": "k", "lof": "k",
            "abod": "k", "fb": "base_k"}


class ArgumentError(ValueError):
    pass


def _add_threads(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oddkit", description="Outlier detection toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write synthetic train/test CSVs")
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--n-features", type=int, default=2)
    p.add_argument("--contamination", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("fit", help="fit a detector and save it")
    p.add_argument("--algo", required=True, choices=list(ALGORITHMS))
    p.add_argument("--input", required=True, help="train feature CSV")
    p.add_argument("--model", required=True, help="model file to write")
    p.add_argument("--output", help="optional CSV of train scores")
    p.add_argument("--k", type=int)
    p.add_argument("--contamination", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-estimators", type=int, help="iforest trees")
    p.add_argument("--max-samples", type=int, help="iforest subsample size")
    p.add_argument("--bins", type=int, help="hbos bins per feature")
    p.add_argument("--n-rounds", type=int, help="fb rounds")
    p.add_argument("--proba", choices=["linear", "unify"])
    p.add_argument("--labels", action="store_true")
    _add_threads(p)

    p = sub.add_parser("score", help="score rows with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--proba", choices=["linear", "unify"])
    p.add_argument("--labels", action="store_true")
    _add_threads(p)

    p = sub.add_parser("eval", help="print ROC and precision at n")
    p.add_argument("--input", required=True, help="score CSV")
    p.add_argument("--truth", required=True, help="label CSV")
    p.add_argument("--name", default="model")

    p = sub.add_parser("combine", help="combine several score columns")
    p.add_argument("--input", required=True, action="append",
                   help="score CSV; repeat for several detectors")
    p.add_argument("--output", required=True)
    p.add_argument("--method", choices=METHODS, default="average")
    p.add_argument("--buckets", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-standardize", action="store_true",
                   help="combine raw scores without z-scoring columns")

    p = sub.add_parser("bench", help="benchmark detectors")
    p.add_argument("--algo", action="append",
                   choices=list(ALGORITHMS) + [RANDOM_BASELINE],
                   help="repeat for several; default: all")
    p.add_argument("--seeds", default="0",
                   help="comma-separated detector seeds")
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--n-features", type=int, default=2)
    p.add_argument("--contamination", type=float, default=0.1)
    p.add_argument("--data-seed", type=int, default=42,
                   help="seed of the generated dataset")
    p.add_argument("--input", action="append", default=[],
                   help="extra labeled CSV ('label' column), used as "
                        "both train and test")
    p.add_argument("--output", help="also write the table as CSV")
    _add_threads(p)

    p = sub.add_parser("plot", help="2-D scatter of predictions as SVG")
    p.add_argument("--input", required=True, help="feature CSV (2 columns)")
    p.add_argument("--truth", required=True, help="label CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pred", help="score CSV with a label column")
    group.add_argument("--model", help="model used to predict labels")
    p.add_argument("--output", required=True)
    p.add_argument("--title")
    return parser


def _info(msg):
    print(msg, file=sys.stderr)


def cmd_generate(args):
    X_tr, y_tr, X_te, y_te = data.generate_data(
        args.n_train, args.n_test, args.n_features, args.contamination,
        args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    for name, X, y in (("train", X_tr, y_tr), ("test", X_te, y_te)):
        data.write_matrix_csv(os.path.join(args.out_dir, f"X_{name}.csv"), X)
        data.write_labels_csv(os.path.join(args.out_dir, f"y_{name}.csv"), y)
    _info(f"wrote 4 files to {args.out_dir}")


def _write_scores(det, X, path, proba, labels):
    scores = det.decision_function(X)
    data.write_scores_csv(
        path, scores,
        labels=det.predict(X) if labels else None,
        probs=det.predict_proba(X, method=proba) if proba else None)


def cmd_fit(args):
    params = {"contamination": args.contamination,
              "n_jobs": -1 if args.threads is None else args.threads,
              "n_estimators": args.n_estimators,
              "max_samples": args.max_samples, "bins": args.bins,
              "n_rounds": args.n_rounds}
    cls = ALGORITHMS[args.algo][0]
    if "seed" in cls._param_names:
        params["seed"] = args.seed
    if args.k is not None:
        if args.algo not in _K_PARAM:
            raise ArgumentError(f"--k does not apply to {args.algo}")
        params[_K_PARAM[args.algo]] = args.k
    unknown = [k for k, v in params.items() if v is not None and k not in
               cls._param_names + ("contamination", "n_jobs")]
    if unknown:
        raise ArgumentError(
            f"{args.algo} does not take: {', '.join(sorted(unknown))}")
    X = data.read_matrix_csv(args.input)
    det = make_detector(args.algo, **params).fit(X)
    save_model(det, args.model)
    if args.output:
        _write_scores(det, X, args.output, args.proba, args.labels)
    _info(f"fitted {args.algo} on {X.shape[0]}x{X.shape[1]}; "
          f"threshold={det.threshold_!r}")


def cmd_score(args):
    det = load_model(args.model)
    det.n_jobs = args.threads
    X = data.read_matrix_csv(args.input)
    if X.shape[1] != det.n_features_in_:
        raise DataError(f"{args.input}: {X.shape[1]} features, model expects "
                        f"{det.n_features_in_}")
    _write_scores(det, X, args.output, args.proba, args.labels)


def cmd_eval(args):
    scores = data.read_scores_csv(args.input)
    if "score" not in scores:
        raise DataError(f"{args.input}: no 'score' column")
    y = data.read_labels_csv(args.truth)
    if len(y) != len(scores["score"]):
        raise DataError("score and label files have different lengths")
    print(data.evaluate_format(args.name, y, scores["score"]))


def _score_columns(path):
    cols = data.read_scores_csv(path)
    if "score" in cols:
        return [cols["score"]]
    return list(cols.values())


def cmd_combine(args):
    columns = [c for path in args.input for c in _score_columns(path)]
    if len({len(c) for c in columns}) != 1:
        raise DataError("score files have different numbers of rows")
    S = np.column_stack(columns)
    if not args.no_standardize:
        S = zscore_standardize(S)
    if args.method in ("aom", "moa"):
        if args.buckets is None:
            raise ArgumentError(f"--method {args.method} requires --buckets")
        if not 1 <= args.buckets <= S.shape[1]:
            raise ArgumentError(
                f"--buckets must be in [1, {S.shape[1]}] for {S.shape[1]} "
                "score columns")
    data.write_scores_csv(args.output,
                          combine(S, args.method, args.buckets, args.seed))


def cmd_bench(args):
    try:
        seeds = [int(s) for s in args.seeds.split(",")]
    except ValueError:
        raise ArgumentError(f"bad --seeds {args.seeds!r}") from None
    X_tr, y_tr, X_te, y_te = data.generate_data(
        args.n_train, args.n_test, args.n_features, args.contamination,
        args.data_seed)
    datasets = {f"generated-{args.data_seed}": (X_tr, y_tr, X_te, y_te)}
    for path in args.input:
        ds = data.read_labeled_csv(path)
        datasets[os.path.basename(path)] = (ds.X, ds.y, ds.X, ds.y)
    algos = args.algo or list(ALGORITHMS)
    rows = run_benchmark(datasets, algos, seeds,
                         n_jobs=-1 if args.threads is None else args.threads)
    for r in rows:
        if r["error"]:
            _info(f"{r['dataset']}/{r['algo']}: {r['error']}")
    print(format_table(rows))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(rows))


def cmd_plot(args):
    X = data.read_matrix_csv(args.input)
    if X.shape[1] != 2:
        raise ArgumentError(f"plot needs 2 features, {args.input} has "
                            f"{X.shape[1]}")
    y = data.read_labels_csv(args.truth)
    if args.model:
        pred = load_model(args.model).predict(X)
    else:
        cols = data.read_scores_csv(args.pred)
        if "label" not in cols:
            raise DataError(f"{args.pred}: no 'label' column")
        pred = cols["label"]
    if not len(y) == len(pred) == X.shape[0]:
        raise DataError("feature, truth and prediction lengths differ")
    emit_scatter_plot(X, y, pred, args.output, title=args.title)


COMMANDS = {"generate": cmd_generate, "fit": cmd_fit, "score": cmd_score,
            "eval": cmd_eval, "combine": cmd_combine, "bench": cmd_bench,
            "plot": cmd_plot}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ARGS
    if getattr(args, "threads", None) is not None and args.threads < 1:
        _info("oddkit: error: --threads must be >= 1")
        return EXIT_ARGS
    try:
        COMMANDS[args.command](args)
    except (DataError, OSError) as exc:
        _info(f"oddkit: error: {exc}")
        return EXIT_DATA
    except ValueError as exc:
        _info(f"oddkit: error: {exc}")
        return EXIT_ARGS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
