"""Command-line front end: train, predict, evaluate.

Exit codes: 0 success, 2 usage error, 3 data error, 4 model error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import data as data_mod
from .boosting import BoostConfig, fit_classifier, predict_batch, train
from .errors import DataError, ModelError
from .evaluate import run_protocol
from .model_io import atomic_write_text, load_model, save_model
from .simplex import binary_score, decode

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4

PROTOCOL_ALIASES = {
    "imbalance": "imbalance_auc",
    "regression": "regression_rmse",
    "noise": "noise_accuracy",
}


def _positive_unit(value: str) -> float:
    v = float(value)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} not in (0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwboost",
        description="Gradient boosting with wavelet-pruned deep trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--depth", type=int, default=8, help="max tree depth")
        p.add_argument("--iterations", type=int, default=10, help="boosting stages")
        p.add_argument("--nu", type=_positive_unit, default=0.1, help="shrinkage")
        p.add_argument(
            "--subsample", type=_positive_unit, default=0.8,
            help="in-bag fraction per stage",
        )
        p.add_argument("--min-leaf", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    p_train = sub.add_parser("train", help="fit a model and write it to disk")
    p_train.add_argument("--data", required=True, help="training CSV")
    p_train.add_argument("--label-column", required=True)
    p_train.add_argument("--task", choices=["regression", "classification"],
                         required=True)
    add_config_flags(p_train)
    p_train.add_argument("--out", required=True, help="model file path")

    p_pred = sub.add_parser("predict", help="apply a model to a feature CSV")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--out", required=True, help="predictions CSV path")

    p_eval = sub.add_parser("evaluate", help="run a cross-validation protocol")
    p_eval.add_argument(
        "--protocol", required=True,
        choices=sorted(PROTOCOL_ALIASES) + sorted(PROTOCOL_ALIASES.values()),
    )
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--label-column", required=True)
    p_eval.add_argument("--task", choices=["regression", "classification"],
                        required=True)
    p_eval.add_argument("--k", type=int, default=5, help="fold count")
    p_eval.add_argument("--folds", help="external (sample_id,fold) CSV")
    p_eval.add_argument("--noise-level", type=float, default=0.1)
    p_eval.add_argument("--trials", type=int, default=20)
    add_config_flags(p_eval)
    p_eval.add_argument("--report", help="write the JSON report here")

    return parser


def _config_from_args(args, task: str) -> BoostConfig:
    return BoostConfig(
        iterations=args.iterations,
        nu=args.nu,
        max_depth=args.depth,
        subsample_fraction=args.subsample,
        min_leaf=args.min_leaf,
        seed=args.seed,
        task=task,
    )


def cmd_train(args) -> int:
    dataset = data_mod.load_csv(args.data, args.label_column, args.task)
    config = _config_from_args(args, args.task)

    def log_fn(entry):
        oob = entry["oob_loss"]
        oob_s = "-" if oob is None else f"{oob:.6g}"
        print(
            f"iter {entry['iteration']:4d}  nodes {entry['n_nodes']:5d}  "
            f"M {entry['m_terms']:5d}  in-bag loss {entry['in_bag_loss']:.6g}  "
            f"OOB loss {oob_s}"
        )

    if args.task == "classification":
        from .simplex import build_encoding, encode_many

        enc = build_encoding(dataset.raw_labels)
        encoded = dataset.with_response(encode_many(dataset.raw_labels, enc))
        ensemble = train(encoded, config, log_fn=log_fn)
        ensemble.encoding = enc
    else:
        ensemble = train(dataset, config, log_fn=log_fn)
    save_model(ensemble, args.out)
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    ensemble = load_model(args.model)
    dataset = _load_feature_csv(args.data, ensemble.feature_names)
    points = predict_batch(ensemble, dataset)

    buf = io.StringIO()
    w = csv.writer(buf)
    if ensemble.encoding is None:
        w.writerow(["prediction"])
        for p in points:
            w.writerow([repr(float(p[0]))])
    else:
        enc = ensemble.encoding
        binary = enc.class_count == 2
        header = ["label", "confidence"] + (["score"] if binary else [])
        w.writerow(header)
        for p in points:
            label, conf, _ = decode(p, enc)
            row = [label, repr(conf)]
            if binary:
                row.append(repr(binary_score(p, enc, enc.label_order[0])))
            w.writerow(row)
    atomic_write_text(args.out, buf.getvalue())
    print(f"predictions written to {args.out}")
    return 0


def _load_feature_csv(path, feature_names):
    """Read a CSV of features only; column names must match the model's,
    in order."""
    import numpy as np

    from pathlib import Path

    p = Path(path)
    if not p.exists():
        raise DataError(f"no such file: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError("empty file: missing header row") from None
        rows = [r for r in reader if r]
    if not rows:
        raise DataError("empty data body")
    if tuple(header) != tuple(feature_names):
        extra = [h for h in header if h not in feature_names]
        missing = [f for f in feature_names if f not in header]
        raise ModelError(
            "feature names do not match the model "
            f"(unexpected: {extra}, missing: {missing}, "
            f"expected order: {list(feature_names)})"
        )
    X = np.empty((len(rows), len(header)))
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise DataError(f"row {r} has {len(row)} cells, expected {len(header)}")
        for j, cell in enumerate(row):
            X[r - 1, j] = data_mod._parse_float(cell.strip(), r, header[j])
    return X


def cmd_evaluate(args) -> int:
    dataset = data_mod.load_csv(args.data, args.label_column, args.task)
    protocol = PROTOCOL_ALIASES.get(args.protocol, args.protocol)
    config = _config_from_args(args, args.task)
    external = None
    if args.folds:
        external = data_mod.load_folds(args.folds, dataset.n_samples)
    report = run_protocol(
        dataset,
        protocol,
        config,
        seed=args.seed,
        folds=args.k,
        trials=args.trials,
        noise_level=args.noise_level,
        external_folds=external,
    )
    print(report.to_table())
    if args.report:
        atomic_write_text(args.report, report.to_json() + "\n")
        print(f"report written to {args.report}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        if args.command == "train":
            return cmd_train(args)
        if args.command == "predict":
            return cmd_predict(args)
        return cmd_evaluate(args)
    except ModelError as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
