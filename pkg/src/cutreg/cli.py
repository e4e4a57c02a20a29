"""Reproducible experiment runner.

Exit codes: 0 success, 1 usage/config error, 2 verification failure,
3 resource cap exceeded.
"""

import os

_threads = os.environ.get("CUTREG_THREADS")
if _threads:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from cutreg import cutting, datagen
from cutreg.ansatz import AnsatzConfig, QmlModel
from cutreg.config import ConfigError, load_config
from cutreg.cutting import ResourceCapError, evaluate_exact, evaluate_sampled, kappa, sampling_overhead
from cutreg.metrics import CSV_HEADER, mse
from cutreg.training import LossConfig, TrainConfig, predict, regularizer, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_RESOURCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    parser = _Parser(prog="cutreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="key=value config file")
        p.add_argument("--out", dest="out_dir", default=None, help="output directory")
        p.add_argument("--seed-data", dest="seed_data", type=int, default=None)
        p.add_argument("--seed-train", dest="seed_train", type=int, default=None)

    p = sub.add_parser("generate-data", help="write the dataset CSV and metadata")
    common(p)

    p = sub.add_parser("overhead", help="print s(alphas), kappa, and the regularizer")
    common(p)
    p.add_argument("--alphas", default=None, help="comma-separated cut angles in radians")

    p = sub.add_parser("cut-check", help="verify cut-vs-full agreement on random draws")
    common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--sabotage", action="store_true",
                   help="negative control: corrupt a channel coefficient")

    p = sub.add_parser("train", help="run the training loop")
    common(p)
    p.add_argument("--mode", choices=["full", "cut-exact", "cut-sampled"], default=None)

    p = sub.add_parser("evaluate", help="test-set MSE for saved parameters")
    common(p)
    p.add_argument("--params", type=Path, required=True)
    p.add_argument("--mode", choices=["full", "cut-exact", "cut-sampled"], default=None)

    return parser


def _config_from_args(args):
    overrides = {}
    for key in ("out_dir", "seed_data", "seed_train"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    mode = getattr(args, "mode", None)
    if mode is not None:
        overrides["forward_mode"] = mode.replace("-", "_")
    return load_config(args.config, overrides)


def _make_dataset(cfg):
    n_features = 2 * cfg.num_qubits if cfg.num_layers == 0 else cfg.num_layers * cfg.num_qubits
    raw = datagen.make_regression(cfg.n_samples, n_features, cfg.noise_std, cfg.seed_data)
    datagen.split(raw, cfg.seed_data, (cfg.n_train, cfg.n_val, cfg.n_test))
    return datagen.scale(raw)


def _make_model(cfg):
    layers = None if cfg.num_layers == 0 else cfg.num_layers
    return QmlModel(AnsatzConfig(cfg.num_qubits, cfg.num_partitions, layers))


def _load_dataset(cfg, out_dir):
    path = out_dir / "dataset.csv"
    if path.exists():
        return datagen.load_csv(path)
    return _make_dataset(cfg)


def cmd_generate_data(args):
    cfg = _config_from_args(args)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _make_dataset(cfg)
    datagen.save_csv(dataset, out_dir / "dataset.csv")
    datagen.save_metadata(dataset, out_dir / "dataset.meta.json")
    print(f"wrote {out_dir / 'dataset.csv'} ({dataset.X.shape[0]} rows, "
          f"{dataset.num_features} features)")
    return EXIT_OK


def _alphas_from_args(args, cfg):
    if getattr(args, "alphas", None) is not None:
        try:
            return [float(v) for v in args.alphas.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad --alphas value {args.alphas!r}") from None
    model = _make_model(cfg)
    init = cfg.alpha_init_value()
    if init == "half_pi":
        return [np.pi / 2] * model.num_alpha
    if init == "small":
        return [0.1] * model.num_alpha
    return init


def cmd_overhead(args):
    cfg = _config_from_args(args)
    alphas = _alphas_from_args(args, cfg)
    s = sampling_overhead(alphas)
    k = float(np.prod([kappa(a) for a in alphas]))
    r = regularizer(alphas, cfg.regularizer)
    print(f"s_total    = {s:.6g}")
    print(f"kappa      = {k:.6g}")
    print(f"R_overhead = {r:.6g}")
    return EXIT_OK


def cmd_cut_check(args):
    cfg = _config_from_args(args)
    model = _make_model(cfg)
    if args.sabotage:
        cutting._SABOTAGE_SCALE = 1.001
    rng = np.random.default_rng(cfg.seed_train)
    max_dev = 0.0
    for _ in range(args.trials):
        theta = rng.uniform(-np.pi, np.pi, model.num_theta)
        alpha = rng.uniform(0, 2 * np.pi, model.num_alpha)
        x = rng.uniform(-np.pi, np.pi, model.config.num_features)
        full = model.forward(theta, alpha, x, "full")
        cut = evaluate_exact(model.circuit, model.cuts, theta, alpha, x,
                             model.observable, cfg.resource_cap)
        max_dev = max(max_dev, abs(full - cut))
    print(f"exact recombination: {args.trials} trials, max |deviation| = {max_dev:.3e}")

    z_max = 0.0
    sampled_trials = min(args.trials, 3)
    for i in range(sampled_trials):
        theta = rng.uniform(-np.pi, np.pi, model.num_theta)
        alpha = rng.uniform(0, 2 * np.pi, model.num_alpha)
        x = rng.uniform(-np.pi, np.pi, model.config.num_features)
        full = model.forward(theta, alpha, x, "full")
        mean, stderr = evaluate_sampled(model.circuit, model.cuts, theta, alpha, x,
                                        model.observable, cfg.num_samples,
                                        cfg.seed_sampling + i)
        z = abs(mean - full) / stderr if stderr > 0 else 0.0
        z_max = max(z_max, z)
        print(f"sampled trial {i}: mean={mean:.6f} exact={full:.6f} "
              f"stderr={stderr:.2e} |z|={z:.2f}")
    if max_dev > 1e-9:
        print("FAIL: exact recombination deviates from the full simulation")
        return EXIT_VERIFICATION
    if sampled_trials and z_max > 5.0:
        print("FAIL: sampled estimator outside 5 standard errors")
        return EXIT_VERIFICATION
    print("PASS")
    return EXIT_OK


def _train_config(cfg):
    return TrainConfig(
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        loss=LossConfig(cfg.lambda_initial, cfg.lambda_final,
                        cfg.lambda_switch_epoch, cfg.regularizer,
                        cfg.lambda_anneal_epochs),
        gradient_estimator=cfg.gradient_estimator,
        spsa_c=cfg.spsa_c,
        forward_mode=cfg.forward_mode,
        num_samples=cfg.num_samples,
        alpha_init=cfg.alpha_init_value(),
        seed_init=cfg.seed_init,
        seed_train=cfg.seed_train,
        seed_sampling=cfg.seed_sampling,
        max_runs=cfg.resource_cap,
        track_wallclock=cfg.record_wallclock,
    )


def cmd_train(args):
    cfg = _config_from_args(args)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _load_dataset(cfg, out_dir)
    model = _make_model(cfg)

    metrics_path = out_dir / "metrics.csv"
    with open(metrics_path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.flush()

        def flush_record(rec):
            fh.write(rec.to_csv_row() + "\n")
            fh.flush()

        records, theta, alpha, summary = train(model, dataset, _train_config(cfg), flush_record)

    with open(out_dir / "params.json", "w", encoding="utf-8") as fh:
        json.dump({"theta": list(theta), "alpha": list(alpha)}, fh)
        fh.write("\n")
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"final test MSE {summary['final_test_mse']:.6g}, "
          f"s_total {summary['initial_s_total']:.6g} -> {summary['final_s_total']:.6g}")
    return EXIT_OK


def cmd_evaluate(args):
    cfg = _config_from_args(args)
    out_dir = Path(cfg.out_dir)
    dataset = _load_dataset(cfg, out_dir)
    with open(args.params, encoding="utf-8") as fh:
        params = json.load(fh)
    theta = np.asarray(params["theta"], dtype=float)
    alpha = np.asarray(params["alpha"], dtype=float)
    model = _make_model(cfg)
    X_test, y_test = dataset.rows("test")
    preds = predict(model, theta, alpha, X_test, cfg.forward_mode,
                    num_samples=cfg.num_samples, seed=cfg.seed_sampling,
                    max_runs=cfg.resource_cap)
    result = {"test_mse": mse(preds, y_test), "mode": cfg.forward_mode,
              "s_total": sampling_overhead(alpha)}
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


_COMMANDS = {
    "generate-data": cmd_generate_data,
    "overhead": cmd_overhead,
    "cut-check": cmd_cut_check,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
