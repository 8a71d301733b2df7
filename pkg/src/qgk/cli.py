"""Command-line interface.

Subcommands: estimate, gram, svm train|predict|eval, bench growth|scaling|cost.
Parameter precedence is flags > --config JSON > defaults, with the QGK_SEED
environment variable as a fallback seed.  Every output embeds the resolved
configuration, and identical inputs produce byte-identical output files.

Exit codes: 0 success, 2 I/O or parse failure, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import bench, data, qram, svm
from .errors import QgkError
from .estimator import (
    EstimatorConfig,
    estimate_distance_sq,
    estimate_dot,
    estimate_Z,
)
from .kernels import KernelSpec, kernel_matrix

_ESTIMATOR_DEFAULTS = {
    "backend": "exact",
    "epsilon": 0.01,
    "shots": None,
    "theta": 0.05,
    "seed": 0,
}

_KERNEL_DEFAULTS = {
    "kernel": "gaussian",
    "sigma": 1.0,
    "precision_q": 6,
    "gauss_mode": "closed_form",
    "degree": 2,
    "scale_a": 1.0,
    "offset_b": 0.0,
}


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return payload


def _resolve(args: argparse.Namespace, config: dict, defaults: dict) -> dict:
    """flags > config file > env seed > defaults."""
    resolved = {}
    for key, default in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in config:
            resolved[key] = config[key]
        elif key == "seed" and "QGK_SEED" in os.environ:
            resolved[key] = int(os.environ["QGK_SEED"])
        else:
            resolved[key] = default
    return resolved

def _estimator_config(resolved: dict) -> EstimatorConfig:
    shots = resolved["shots"]
    return EstimatorConfig(
        backend=resolved["backend"],
        epsilon=float(resolved["epsilon"]),
        shots=None if shots is None else int(shots),
        theta=float(resolved["theta"]),
        seed=int(resolved["seed"]),
    )


def _kernel_spec(resolved: dict) -> KernelSpec:
    family = resolved["kernel"]
    if family == "linear":
        return KernelSpec.linear()
    if family == "polynomial":
        return KernelSpec.polynomial(
            degree=int(resolved["degree"]),
            scale_a=float(resolved["scale_a"]),
            offset_b=float(resolved["offset_b"]),
        )
    if family == "gaussian":
        return KernelSpec.gaussian(
            sigma=float(resolved["sigma"]),
            precision_q=int(resolved["precision_q"]),
            mode=resolved["gauss_mode"],
        )
    raise ValueError(f"unknown kernel family {family!r}")


def _emit_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if out_path:
        Path(out_path).write_text(text)


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=("exact", "sampling", "ae_model"))
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--shots", type=int)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--config", help="JSON file with defaults for any flag")


def _add_data_flags(parser: argparse.ArgumentParser, labeled_default: bool = False) -> None:
    parser.add_argument("--data", required=True, help="CSV of row vectors")
    if not labeled_default:
        parser.add_argument(
            "--labeled", action="store_true", default=None,
            help="dataset has a trailing label column (stripped here)",
        )
    parser.add_argument(
        "--header", action="store_true", default=None, help="skip the first CSV line"
    )


def _add_kernel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", choices=("linear", "polynomial", "gaussian"))
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--precision-q", type=int, dest="precision_q")
    parser.add_argument(
        "--gauss-mode", choices=("closed_form", "series"), dest="gauss_mode"
    )
    parser.add_argument("--degree", type=int)
    parser.add_argument("--scale-a", type=float, dest="scale_a")
    parser.add_argument("--offset-b", type=float, dest="offset_b")


def _read_vectors(args: argparse.Namespace, resolved: dict) -> np.ndarray:
    vectors, _ = data.read_csv(
        args.data,
        labeled=bool(resolved.get("labeled", False)),
        has_header=bool(resolved.get("header", False)),
    )
    return vectors


def _data_defaults() -> dict:
    return {"labeled": False, "header": False}


def cmd_estimate(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    resolved = _resolve(args, config, {**_ESTIMATOR_DEFAULTS, **_data_defaults()})
    cfg = _estimator_config(resolved)
    vectors = _read_vectors(args, resolved)
    store = qram.load_dataset(vectors)
    quantity = "dot" if args.dot else ("z" if args.z else "distance")
    runner = {"dot": estimate_dot, "z": estimate_Z, "distance": estimate_distance_sq}[quantity]
    result = runner(store, args.i, args.j, cfg)
    resolved.update(command="estimate", quantity=quantity, i=args.i, j=args.j, data=args.data)
    _emit_json({"config": resolved, **asdict(result)}, args.out)
    return 0


def cmd_gram(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    defaults = {
        **_ESTIMATOR_DEFAULTS,
        **_KERNEL_DEFAULTS,
        **_data_defaults(),
        "psd_repair": True,
        "threads": 1,
        "poly_mode": "power",
    }
    resolved = _resolve(args, config, defaults)
    cfg = _estimator_config(resolved)
    spec = _kernel_spec(resolved)
    store = qram.load_dataset(_read_vectors(args, resolved))
    k_matrix, report = kernel_matrix(
        store,
        spec,
        cfg,
        psd_repair=bool(resolved["psd_repair"]),
        threads=int(resolved["threads"]),
        poly_mode=resolved["poly_mode"],
    )
    resolved.update(command="gram", data=args.data)
    comment = "config: " + json.dumps(resolved, sort_keys=True)
    if args.out_matrix:
        data.write_matrix_csv(args.out_matrix, k_matrix, comments=[comment])
    _emit_json({"config": resolved, "report": report}, args.out_report)
    return 0


def cmd_svm_train(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    defaults = {
        **_ESTIMATOR_DEFAULTS,
        **_KERNEL_DEFAULTS,
        "header": False,
        "gamma": 10.0,
        "psd_repair": True,
        "threads": 1,
    }
    resolved = _resolve(args, config, defaults)
    cfg = _estimator_config(resolved)
    spec = _kernel_spec(resolved)
    vectors, labels = data.read_csv(
        args.data, labeled=True, has_header=bool(resolved["header"])
    )
    dataset = svm.LabeledDataset(vectors, labels)
    model, report = svm.train(
        dataset,
        spec,
        cfg,
        gamma=float(resolved["gamma"]),
        psd_repair=bool(resolved["psd_repair"]),
        threads=int(resolved["threads"]),
    )
    svm.save_model(model, args.model_out)
    resolved.update(command="svm train", data=args.data, model_out=args.model_out)
    _emit_json({"config": resolved, "report": report}, None)
    return 0


def cmd_svm_predict(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    resolved = _resolve(args, config, {**_ESTIMATOR_DEFAULTS, "header": False})
    cfg = _estimator_config(resolved)
    model = svm.load_model(args.model)
    vectors, _ = data.read_csv(args.data, labeled=False, has_header=bool(resolved["header"]))
    scores = svm.decision_scores(model, vectors, cfg)
    labels = [int(v) for v in svm.labels_from_scores(scores)]
    resolved.update(command="svm predict", data=args.data, model=args.model)
    payload = {
        "config": resolved,
        "scores": [float(s) for s in scores],
        "labels": labels,
    }
    _emit_json(payload, args.out)
    return 0


def cmd_svm_eval(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    resolved = _resolve(args, config, {**_ESTIMATOR_DEFAULTS, "header": False})
    cfg = _estimator_config(resolved)
    model = svm.load_model(args.model)
    vectors, labels = data.read_csv(args.data, labeled=True, has_header=bool(resolved["header"]))
    dataset = svm.LabeledDataset(vectors, labels)
    accuracy, confusion = svm.evaluate(model, dataset, cfg)
    resolved.update(command="svm eval", data=args.data, model=args.model)
    payload = {
        "config": resolved,
        "accuracy": accuracy,
        "confusion": confusion.tolist(),
    }
    _emit_json(payload, args.out)
    return 0


def cmd_bench_growth(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    defaults = {"kind": "classical", "n_dim": 10, "d_max": None}
    resolved = _resolve(args, config, defaults)
    kind = resolved["kind"]
    d_max = resolved["d_max"] or (40 if kind == "classical" else 30)
    grower = bench.classical_growth if kind == "classical" else bench.quantum_growth
    series = grower(int(resolved["n_dim"]), int(d_max))
    resolved.update(command="bench growth", d_max=int(d_max))
    summary = {
        "config": resolved,
        "peak_d": series.peak_d,
        "vanish_d": series.vanish_d,
    }
    if args.out:
        comments = [
            "config: " + json.dumps(resolved, sort_keys=True),
            f"peak_d: {series.peak_d}",
            f"vanish_d: {series.vanish_d}",
        ]
        rows = [
            [int(d), float(v), float(lv)]
            for d, v, lv in zip(series.degrees, series.values, series.log10_values)
        ]
        data.write_table_csv(args.out, ["d", "value", "log10_value"], rows, comments)
    _emit_json(summary, None)
    return 0


def cmd_bench_scaling(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    defaults = {
        "backend": "sampling",
        "theta": 0.05,
        "seed": 0,
        "shot_grid": "100,1000,10000",
        "n_seeds": 100,
        "header": False,
        "labeled": False,
    }
    resolved = _resolve(args, config, defaults)
    store = qram.load_dataset(_read_vectors(args, resolved))
    grid = tuple(int(s) for s in str(resolved["shot_grid"]).split(","))
    fit = bench.scaling_experiment(
        store,
        (args.i, args.j),
        resolved["backend"],
        shot_grid=grid,
        n_seeds=int(resolved["n_seeds"]),
        base_seed=int(resolved["seed"]),
        theta=float(resolved["theta"]),
    )
    resolved.update(command="bench scaling", data=args.data, i=args.i, j=args.j)
    summary = {
        "config": resolved,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "degenerate": fit.degenerate,
    }
    if args.out:
        comments = [
            "config: " + json.dumps(resolved, sort_keys=True),
            f"slope: {data.format_float(fit.slope)}",
            f"r2: {data.format_float(fit.r2)}",
            f"degenerate: {str(fit.degenerate).lower()}",
        ]
        rows = [[int(s), float(r)] for s, r in zip(fit.shots, fit.rmse)]
        data.write_table_csv(args.out, ["shots", "rmse"], rows, comments)
    _emit_json(summary, None)
    return 0


def cmd_bench_cost(args: argparse.Namespace) -> int:
    config = _load_config_file(args.config)
    defaults = {**_ESTIMATOR_DEFAULTS, **_data_defaults(), "i": 0, "j": 1}
    resolved = _resolve(args, config, defaults)
    cfg = _estimator_config(resolved)
    store = qram.load_dataset(_read_vectors(args, resolved))
    pair = (int(resolved["i"]), int(resolved["j"]))
    entries = bench.run_cost_experiment(store, cfg, pair=pair)
    rows, all_match = bench.cost_report(entries)
    resolved.update(command="bench cost", data=args.data)
    if args.out:
        comments = ["config: " + json.dumps(resolved, sort_keys=True)]
        columns = list(rows[0].keys())
        data.write_table_csv(
            args.out, columns, [[r[c] for c in columns] for r in rows], comments
        )
    _emit_json({"config": resolved, "all_match": all_match, "rows": rows}, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgk",
        description="Estimated quantum kernels: pair estimates, Gram matrices, "
        "an LS-SVM, and resource benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate one pair quantity")
    _add_data_flags(p_est)
    group = p_est.add_mutually_exclusive_group(required=True)
    group.add_argument("--dot", action="store_true", help="dot product x_i . x_j")
    group.add_argument("--z", action="store_true", help="norm sum |x_i|^2 + |x_j|^2")
    group.add_argument("--distance", action="store_true", help="squared distance")
    p_est.add_argument("-i", type=int, required=True)
    p_est.add_argument("-j", type=int, required=True)
    _add_estimator_flags(p_est)
    p_est.add_argument("--out", help="also write the JSON result here")
    p_est.set_defaults(func=cmd_estimate)

    p_gram = sub.add_parser("gram", help="estimated kernel matrix")
    _add_data_flags(p_gram)
    _add_kernel_flags(p_gram)
    _add_estimator_flags(p_gram)
    p_gram.add_argument(
        "--psd-repair", action=argparse.BooleanOptionalAction, default=None,
        dest="psd_repair", help="clip negative Gram eigenvalues (default on)",
    )
    p_gram.add_argument("--threads", type=int)
    p_gram.add_argument("--poly-mode", choices=("power", "tensor_state"), dest="poly_mode")
    p_gram.add_argument("--out-matrix", help="write the matrix as CSV here")
    p_gram.add_argument("--out-report", help="write the JSON report here")
    p_gram.set_defaults(func=cmd_gram)

    p_svm = sub.add_parser("svm", help="least-squares SVM on estimated kernels")
    svm_sub = p_svm.add_subparsers(dest="svm_command", required=True)

    p_train = svm_sub.add_parser("train", help="train from a labeled CSV")
    p_train.add_argument("--data", required=True, help="labeled CSV (trailing label column)")
    p_train.add_argument("--header", action="store_true", default=None)
    _add_kernel_flags(p_train)
    _add_estimator_flags(p_train)
    p_train.add_argument("--gamma", type=float)
    p_train.add_argument(
        "--psd-repair", action=argparse.BooleanOptionalAction, default=None, dest="psd_repair"
    )
    p_train.add_argument("--threads", type=int)
    p_train.add_argument("--model-out", required=True, dest="model_out")
    p_train.set_defaults(func=cmd_svm_train)

    p_pred = svm_sub.add_parser("predict", help="score unlabeled points")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--header", action="store_true", default=None)
    _add_estimator_flags(p_pred)
    p_pred.add_argument("--out")
    p_pred.set_defaults(func=cmd_svm_predict)

    p_eval = svm_sub.add_parser("eval", help="accuracy and confusion on labeled points")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--header", action="store_true", default=None)
    _add_estimator_flags(p_eval)
    p_eval.add_argument("--out")
    p_eval.set_defaults(func=cmd_svm_eval)

    p_bench = sub.add_parser("bench", help="growth figures, error scaling, cost checks")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)

    p_growth = bench_sub.add_parser("growth", help="cost-proxy series over degree")
    p_growth.add_argument("--kind", choices=("classical", "quantum"))
    p_growth.add_argument("--N", type=int, dest="n_dim")
    p_growth.add_argument("--d-max", type=int, dest="d_max")
    p_growth.add_argument("--config")
    p_growth.add_argument("--out", help="write the series as CSV here")
    p_growth.set_defaults(func=cmd_bench_growth)

    p_scaling = bench_sub.add_parser("scaling", help="RMSE vs shots power fit")
    _add_data_flags(p_scaling)
    p_scaling.add_argument("-i", type=int, required=True)
    p_scaling.add_argument("-j", type=int, required=True)
    p_scaling.add_argument("--backend", choices=("exact", "sampling", "ae_model"))
    p_scaling.add_argument("--shot-grid", dest="shot_grid", help="comma-separated shots")
    p_scaling.add_argument("--seeds", type=int, dest="n_seeds")
    p_scaling.add_argument("--theta", type=float)
    p_scaling.add_argument("--seed", type=int)
    p_scaling.add_argument("--config")
    p_scaling.add_argument("--out", help="write the RMSE table as CSV here")
    p_scaling.set_defaults(func=cmd_bench_scaling)

    p_cost = bench_sub.add_parser("cost", help="query/step conformance table")
    _add_data_flags(p_cost)
    p_cost.add_argument("-i", type=int, default=None)
    p_cost.add_argument("-j", type=int, default=None)
    _add_estimator_flags(p_cost)
    p_cost.add_argument("--out", help="write the table as CSV here")
    p_cost.set_defaults(func=cmd_bench_cost)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except QgkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
