"""Command-line entry point.

Subcommands cover the full pipeline: train a model, estimate process
noise from calibration data, propagate an input belief, run the Monte
Carlo baseline, compare the two, compute the per-label RMSE baseline,
and sweep input variances. Every command takes explicit file paths and
writes a JSON report (plus optional plot CSV); randomized commands are
reproducible via --seed. Exit codes: 0 success, 1 runtime failure,
2 usage error.
"""

import argparse
import json
import sys
from datetime import datetime, timezone

import numpy as np

from .data import (
    read_idx,
    read_vectors_csv,
    write_plot_data,
    write_report,
)
from .ekf import PropagationMode, propagate
from .errors import EkfPropError, ShapeError
from .monte_carlo import compare_stats, mc_propagate
from .network import load_model, save_model
from .noise import estimate_process_noise, load_noise, save_noise
from .postprocess import make_error_bars, rmse_by_label
from .training import evaluate_accuracy, train


def _add_common_output(parser):
    parser.add_argument("--out", required=True, help="report file to write")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp field (byte-stable output)")


def _add_config(parser):
    parser.add_argument("--config", help="JSON file supplying defaults for "
                                         "optional flags (flags override)")


def _add_sigma0(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--var", type=float,
                       help="scalar variance for a diagonal input covariance")
    group.add_argument("--cov", help="CSV file holding a full input covariance")


def _add_dataset(parser):
    parser.add_argument("--dataset-images", required=True, help="IDX image file")
    parser.add_argument("--dataset-labels", required=True, help="IDX label file")
    parser.add_argument("--limit", type=int, default=None,
                        help="use only the first N dataset entries")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ekfprop",
        description="Gaussian uncertainty propagation through ReLU networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    def add_parser(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        subparsers[name] = p
        _add_config(p)
        return p

    p = add_parser("train", help="train a ReLU MLP")
    _add_dataset(p)
    p.add_argument("--dims", required=True,
                   help="comma-separated layer widths, e.g. 784,64,64,10")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = add_parser("estimate-noise",
                       help="estimate per-layer process noise from calibration data")
    p.add_argument("--model", required=True)
    _add_dataset(p)
    p.add_argument("--out", required=True, help="noise file to write")
    p.set_defaults(func=cmd_estimate_noise)

    p = add_parser("propagate", help="propagate an input belief")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True,
                   help="CSV input vector (first row is used)")
    _add_sigma0(p)
    p.add_argument("--mode", choices=["perfect", "noisy"], default="perfect")
    p.add_argument("--noise", help="noise file (required with --mode noisy)")
    p.add_argument("--sigma-mult", type=float, default=1.0,
                   help="error-bar width in sigmas")
    p.add_argument("--truncate", action="store_true",
                   help="apply the nonnegative-support variance correction to bars")
    p.add_argument("--plot-out", help="CSV with per-component bar data")
    _add_common_output(p)
    p.set_defaults(func=cmd_propagate)

    p = add_parser("mc", help="Monte Carlo output statistics")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    _add_sigma0(p)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot-out", help="CSV with per-component mean/std")
    _add_common_output(p)
    p.set_defaults(func=cmd_mc)

    p = add_parser("compare", help="EKF std vs Monte Carlo std")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    _add_sigma0(p)
    p.add_argument("--mode", choices=["perfect", "noisy"], default="perfect")
    p.add_argument("--noise")
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot-out", help="CSV with both std series and diffs")
    _add_common_output(p)
    p.set_defaults(func=cmd_compare)

    p = add_parser("rmse",
                       help="EKF std (zero input covariance, with noise) vs "
                            "per-label RMSE")
    p.add_argument("--model", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--input", required=True)
    _add_dataset(p)
    p.add_argument("--label", type=int, required=True)
    p.add_argument("--plot-out", help="CSV with ekf_std and rmse series")
    _add_common_output(p)
    p.set_defaults(func=cmd_rmse)

    p = add_parser("sweep", help="propagate over several input variances")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--vars", required=True,
                   help="comma-separated diagonal variances, e.g. 0.0025,0.01,0.04")
    p.add_argument("--mode", choices=["perfect", "noisy"], default="perfect")
    p.add_argument("--noise")
    p.add_argument("--plot-out", help="CSV with one std column per variance")
    _add_common_output(p)
    p.set_defaults(func=cmd_sweep)

    return parser, subparsers


def _apply_config(args, subparser):
    """Fill optional flags from the config file; explicit flags win.

    The file is flat JSON mapping flag dest names (underscored) to
    values, optionally with per-command sections keyed by the command
    name. A config value is used only where the parsed value still
    equals the subcommand's built-in default; required flags (explicit
    file paths, sigma0) always come from the command line.
    """
    with open(args.config) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ShapeError(f"malformed config file {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ShapeError(f"config file {args.config} must hold a JSON object")
    merged = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    merged.update(cfg.get(args.command, {}))
    for key, value in merged.items():
        if not hasattr(args, key) or key in ("config", "command", "func"):
            continue
        if getattr(args, key) == subparser.get_default(key):
            setattr(args, key, value)


def _read_input_vector(path):
    return read_vectors_csv(path)[0]


def _sigma0_from_args(args, d):
    if args.cov is not None:
        rows = read_vectors_csv(args.cov)
        sigma0 = np.vstack(rows)
        if sigma0.shape != (d, d):
            raise ShapeError(
                f"covariance file {args.cov} has shape {sigma0.shape}, "
                f"expected ({d}, {d})"
            )
        return sigma0, {"cov_file": args.cov}
    if args.var < 0:
        raise ShapeError(f"--var must be nonnegative, got {args.var}")
    return args.var * np.eye(d), {"var": args.var}


def _load_dataset(args):
    dataset = read_idx(args.dataset_images, args.dataset_labels)
    if args.limit is not None:
        if args.limit < 1:
            raise ShapeError("--limit must be at least 1")
        from .data import LabeledDataset

        dataset = LabeledDataset(
            vectors=dataset.vectors[: args.limit],
            labels=dataset.labels[: args.limit],
        )
    return dataset


def _emit_report(report, args):
    if not args.no_timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    write_report(report, args.out)


def _mode_and_noise(args):
    mode = PropagationMode(args.mode)
    noise = None
    if mode is PropagationMode.WITH_PROCESS_NOISE:
        if not args.noise:
            raise ShapeError("--mode noisy requires --noise")
        noise = load_noise(args.noise)
    elif args.noise:
        raise ShapeError("--noise is only meaningful with --mode noisy")
    return mode, noise


def cmd_train(args):
    dims = [int(tok) for tok in args.dims.split(",")]
    dataset = _load_dataset(args)
    net = train(dataset, dims, epochs=args.epochs, lr=args.lr,
                batch=args.batch, seed=args.seed)
    save_model(net, args.out)
    accuracy = evaluate_accuracy(net, dataset)
    print(f"trained dims={dims} train-accuracy={accuracy:.4f} -> {args.out}")
    return 0


def cmd_estimate_noise(args):
    net = load_model(args.model)
    dataset = _load_dataset(args)
    noise = estimate_process_noise(net, dataset.vectors)
    save_noise(noise, args.out)
    print(f"estimated noise over {noise.sample_count} inputs -> {args.out}")
    return 0


def cmd_propagate(args):
    net = load_model(args.model)
    x0 = _read_input_vector(args.input)
    sigma0, sigma0_meta = _sigma0_from_args(args, net.dims[0])
    mode, noise = _mode_and_noise(args)
    _, beliefs = propagate(net, x0, sigma0, mode, noise)
    bars = make_error_bars(beliefs[-1], multiplier=args.sigma_mult,
                           truncate=args.truncate)
    report = {
        "command": "propagate",
        "model": args.model,
        "input": args.input,
        "noise_file": args.noise,
        "mode": mode.value,
        "sigma0": sigma0_meta,
        "sigma_mult": args.sigma_mult,
        "truncate": args.truncate,
        "output_mean": beliefs[-1].mean.tolist(),
        "output_cov": beliefs[-1].cov.tolist(),
        "sigma_raw": bars.sigma_raw.tolist(),
        "sigma_truncated": bars.sigma_truncated.tolist(),
        "bar_low": bars.bar_low.tolist(),
        "bar_high": bars.bar_high.tolist(),
    }
    _emit_report(report, args)
    if args.plot_out:
        write_plot_data(
            {
                "prediction": bars.center,
                "sigma_raw": bars.sigma_raw,
                "sigma_truncated": bars.sigma_truncated,
                "bar_low": bars.bar_low,
                "bar_high": bars.bar_high,
            },
            args.plot_out,
        )
    return 0


def cmd_mc(args):
    net = load_model(args.model)
    x0 = _read_input_vector(args.input)
    sigma0, sigma0_meta = _sigma0_from_args(args, net.dims[0])
    stats = mc_propagate(net, x0, sigma0, n=args.samples, seed=args.seed)
    report = {
        "command": "mc",
        "model": args.model,
        "input": args.input,
        "sigma0": sigma0_meta,
        "samples": stats.n,
        "seed": args.seed,
        "output_mean": stats.mean.tolist(),
        "output_cov": stats.cov.tolist(),
        "output_std": stats.std.tolist(),
    }
    _emit_report(report, args)
    if args.plot_out:
        write_plot_data({"mean": stats.mean, "std": stats.std}, args.plot_out)
    return 0


def cmd_compare(args):
    net = load_model(args.model)
    x0 = _read_input_vector(args.input)
    sigma0, sigma0_meta = _sigma0_from_args(args, net.dims[0])
    mode, noise = _mode_and_noise(args)
    _, beliefs = propagate(net, x0, sigma0, mode, noise)
    bars = make_error_bars(beliefs[-1])
    stats = mc_propagate(net, x0, sigma0, n=args.samples, seed=args.seed)
    cmp = compare_stats(bars.sigma_raw, stats.std)
    report = {
        "command": "compare",
        "model": args.model,
        "input": args.input,
        "noise_file": args.noise,
        "mode": mode.value,
        "sigma0": sigma0_meta,
        "samples": stats.n,
        "seed": args.seed,
        "ekf_std": bars.sigma_raw.tolist(),
        "mc_std": stats.std.tolist(),
        "abs_diff": cmp.abs_diff.tolist(),
        "rel_diff": cmp.rel_diff.tolist(),
        "max_abs_diff": cmp.max_abs,
        "mean_abs_diff": cmp.mean_abs,
        "max_rel_diff": cmp.max_rel,
        "mean_rel_diff": cmp.mean_rel,
    }
    _emit_report(report, args)
    if args.plot_out:
        write_plot_data(
            {
                "ekf_std": bars.sigma_raw,
                "mc_std": stats.std,
                "abs_diff": cmp.abs_diff,
                "rel_diff": cmp.rel_diff,
            },
            args.plot_out,
        )
    return 0


def cmd_rmse(args):
    net = load_model(args.model)
    noise = load_noise(args.noise)
    x0 = _read_input_vector(args.input)
    dataset = _load_dataset(args)
    sigma0 = np.zeros((net.dims[0], net.dims[0]))
    _, beliefs = propagate(net, x0, sigma0,
                           PropagationMode.WITH_PROCESS_NOISE, noise)
    bars = make_error_bars(beliefs[-1])
    rmse = rmse_by_label(net, dataset.vectors, dataset.labels, args.label)
    exceed = int(np.sum(bars.sigma_raw > rmse))
    report = {
        "command": "rmse",
        "model": args.model,
        "noise_file": args.noise,
        "input": args.input,
        "label": args.label,
        "ekf_std": bars.sigma_raw.tolist(),
        "rmse": rmse.tolist(),
        "components_where_ekf_exceeds_rmse": exceed,
    }
    _emit_report(report, args)
    if args.plot_out:
        write_plot_data({"ekf_std": bars.sigma_raw, "rmse": rmse},
                        args.plot_out)
    return 0


def cmd_sweep(args):
    net = load_model(args.model)
    x0 = _read_input_vector(args.input)
    try:
        variances = [float(tok) for tok in args.vars.split(",")]
    except ValueError as exc:
        raise ShapeError(f"bad --vars list: {exc}") from exc
    if not variances or any(v < 0 for v in variances):
        raise ShapeError("--vars needs a comma-separated list of "
                         "nonnegative variances")
    mode, noise = _mode_and_noise(args)
    d = net.dims[0]
    stds = {}
    for v in variances:
        _, beliefs = propagate(net, x0, v * np.eye(d), mode, noise)
        stds[v] = make_error_bars(beliefs[-1]).sigma_raw
    report = {
        "command": "sweep",
        "model": args.model,
        "input": args.input,
        "noise_file": args.noise,
        "mode": mode.value,
        "variances": variances,
        "std": {repr(v): stds[v].tolist() for v in variances},
    }
    _emit_report(report, args)
    if args.plot_out:
        write_plot_data(
            {f"std_{v:g}": stds[v] for v in variances}, args.plot_out
        )
    return 0


def main(argv=None):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(args, subparsers[args.command])
        return args.func(args)
    except (EkfPropError, OSError) as exc:
        print(f"ekfprop {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
