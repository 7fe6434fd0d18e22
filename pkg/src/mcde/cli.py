"""Command-line entry point.

Subcommands: gen-data, train, estimate, bench.  Exit statuses are a
stable contract: 0 success, 2 usage error (bad flags or config file),
1 runtime error (bad data, divergence, I/O failures).

Each subcommand accepts ``--config FILE`` naming a JSON object whose
keys mirror the flag names (underscores for dashes); explicit flags
override config values.  All randomness flows from ``--seed``; derived
sub-seeds are stable hashes of (seed, purpose), so every run is
reproducible from its echoed configuration alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from mcde import datagen, fusion
from mcde.bench import BenchConfig, TrainableSpec, crossval, write_report
from mcde.color import apply_von_kries, recovery_error, reproduction_error
from mcde.datagen import POOLS, DatasetFormatError, GenConfig
from mcde.nn import (
    ARCHITECTURES,
    ModelFormatError,
    NumericError,
    TrainConfig,
    TrainingError,
    build,
    load_network,
    save_network,
    train,
)
from mcde.seeding import derive_seed

__all__ = ["main"]

_RUNTIME_ERRORS = (
    ValueError,
    KeyError,
    IndexError,
    OSError,
    DatasetFormatError,
    ModelFormatError,
    TrainingError,
    NumericError,
)


class _UsageError(Exception):
    pass


def _span(text: str) -> tuple[int, int]:
    """Parse a half-open scene range written as ``start:stop``."""
    try:
        start_text, stop_text = text.split(":")
        start, stop = int(start_text), int(stop_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:stop, got {text!r}"
        ) from None
    if start < 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return start, stop


def _int_min(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _float_min(minimum: float):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


# ---------------------------------------------------------------------------
# Config-file handling.  A config file is a JSON object whose keys mirror
# flag names; values are validated here because they bypass argparse's own
# type and choices checks.


def _conf_int(minimum=None):
    def check(value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise _UsageError(f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            raise _UsageError(f"must be >= {minimum}, got {value}")
        return value

    return check


def _conf_float(minimum=None):
    def check(value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _UsageError(f"expected a number, got {value!r}")
        value = float(value)
        if minimum is not None and value < minimum:
            raise _UsageError(f"must be >= {minimum}, got {value}")
        return value

    return check


def _conf_str(choices=None):
    def check(value):
        if not isinstance(value, str):
            raise _UsageError(f"expected a string, got {value!r}")
        if choices is not None and value not in choices:
            raise _UsageError(f"must be one of {sorted(choices)}, got {value!r}")
        return value

    return check


def _conf_str_list(value):
    if not (isinstance(value, list) and value and all(isinstance(v, str) for v in value)):
        raise _UsageError(f"expected a non-empty list of strings, got {value!r}")
    return value


def _conf_span(value):
    if not isinstance(value, str):
        raise _UsageError(f"expected a start:stop string, got {value!r}")
    try:
        return _span(value)
    except argparse.ArgumentTypeError as exc:
        raise _UsageError(str(exc)) from None


_POOL_NAMES = tuple(sorted(POOLS))
_ARCH_NAMES = tuple(sorted(ARCHITECTURES))
_VARIANTS = ("linear", "log")

_CONFIG_KEYS: dict[str, dict] = {
    "gen-data": {
        "scenes": _conf_int(1),
        "width": _conf_int(8),
        "height": _conf_int(8),
        "patches": _conf_int(1),
        "pool": _conf_str(_POOL_NAMES),
        "noise_std": _conf_float(0.0),
        "seed": _conf_int(),
        "out": _conf_str(),
    },
    "train": {
        "arch": _conf_str(_ARCH_NAMES),
        "data": _conf_str(),
        "out": _conf_str(),
        "epochs": _conf_int(0),
        "lr": _conf_float(0.0),
        "batch_size": _conf_int(1),
        "channels": _conf_int(1),
        "dropout": _conf_float(0.0),
        "seed": _conf_int(),
        "subset": _conf_span,
    },
    "estimate": {
        "models": _conf_str_list,
        "data": _conf_str(),
        "index": _conf_int(0),
        "nu": _conf_int(1),
        "seed": _conf_int(),
        "variant": _conf_str(_VARIANTS),
        "save_corrected": _conf_str(),
    },
    "bench": {
        "data": _conf_str(),
        "out": _conf_str(),
        "k": _conf_int(2),
        "nu": _conf_int(1),
        "seed": _conf_int(),
        "epochs": _conf_int(0),
        "lr": _conf_float(0.0),
        "batch_size": _conf_int(1),
        "channels": _conf_int(1),
        "dropout": _conf_float(0.0),
        "sog_p": _conf_float(1.0),
        "workers": _conf_int(1),
    },
}

_REQUIRED = {
    "gen-data": ("scenes", "out"),
    "train": ("arch", "data", "out"),
    "estimate": ("models", "data"),
    "bench": ("data", "out"),
}


def _load_config_values(path: str, command: str) -> dict:
    try:
        values = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(values, dict):
        raise _UsageError("config file must hold a JSON object")
    checks = _CONFIG_KEYS[command]
    resolved = {}
    for key, value in values.items():
        if key not in checks:
            raise _UsageError(
                f"unknown config key {key!r} for {command} "
                f"(allowed: {sorted(checks)})"
            )
        try:
            resolved[key] = checks[key](value)
        except _UsageError as exc:
            raise _UsageError(f"config key {key!r}: {exc}") from None
    return resolved


def _prescan_config(argv: list[str]):
    """Subcommand name and --config path, read before real parsing."""
    command = argv[0] if argv and argv[0] in _CONFIG_KEYS else None
    config_path = None
    i = 0
    while i < len(argv):
        token = argv[i]
        if token == "--config":
            if i + 1 < len(argv):
                config_path = argv[i + 1]
                i += 1
        elif token.startswith("--config="):
            config_path = token.split("=", 1)[1]
        i += 1
    return command, config_path


# ---------------------------------------------------------------------------
# Subcommand bodies.


def _cmd_gen_data(args) -> int:
    config = GenConfig(
        n_scenes=args.scenes,
        width=args.width,
        height=args.height,
        n_patches=args.patches,
        pool=args.pool,
        noise_std=args.noise_std,
        base_seed=args.seed,
    )
    dataset = datagen.gen_dataset(config)
    datagen.save(dataset, args.out)
    spec = POOLS[args.pool]
    print(f"wrote {len(dataset.scenes)} scenes to {args.out}")
    print(
        f"illuminant pool {args.pool}: azimuth {spec.phi_deg[0]:g}-{spec.phi_deg[1]:g} deg, "
        f"inclination {spec.varphi_deg[0]:g}-{spec.varphi_deg[1]:g} deg"
    )
    return 0


def _cmd_train(args) -> int:
    dataset = datagen.load(args.data)
    scenes = dataset.scenes
    subset = args.subset
    if subset is not None:
        scenes = scenes[subset[0] : subset[1]]
    net = build(
        args.arch,
        seed=derive_seed("init", args.seed, args.arch),
        channels=args.channels,
        dropout_rate=args.dropout,
    )
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        base_seed=derive_seed("train", args.seed, args.arch),
    )
    net, trace = train(net, scenes, config)
    training_meta = {
        "arch": args.arch,
        "channels": args.channels,
        "dropout": args.dropout,
        "epochs": args.epochs,
        "learning_rate": args.lr,
        "batch_size": args.batch_size,
        "seed": args.seed,
        "data": str(args.data),
        "subset": list(subset) if subset is not None else None,
        "n_scenes": len(scenes),
    }
    save_network(net, args.out, training=training_meta, loss_trace=trace)
    print(f"trained {args.arch} on {len(scenes)} scenes for {args.epochs} epochs")
    if trace:
        print(f"final epoch mean loss {trace[-1]:.6g}")
    print(f"saved model to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    nets = [load_network(path) for path in args.models]
    dataset = datagen.load(args.data)
    if not 0 <= args.index < len(dataset.scenes):
        raise IndexError(
            f"scene index {args.index} out of range "
            f"(dataset has {len(dataset.scenes)} scenes)"
        )
    scene = dataset.scenes[args.index]
    result = fusion.mcde(
        nets, scene.pixels, nu=args.nu, base_seed=args.seed, variant=args.variant
    )
    record = {
        "config": {
            "models": [str(p) for p in args.models],
            "data": str(args.data),
            "index": args.index,
            "nu": args.nu,
            "seed": args.seed,
            "variant": args.variant,
        },
        "fused": [float(v) for v in result.fused],
        "weights": [float(w) for w in result.weights],
        "raw_scores": [float(s) for s in result.raw_scores],
        "per_model": [
            {
                "mean": [float(v) for v in est.mean],
                "sigma": [float(v) for v in est.sigma],
                "mu": float(est.mu),
            }
            for est in result.estimates
        ],
        "ground_truth": [float(v) for v in scene.label],
        "errors": {
            "recovery_deg": float(recovery_error(scene.label, result.fused)),
            "reproduction_deg": float(reproduction_error(scene.label, result.fused)),
        },
    }
    print(json.dumps(record, indent=2, sort_keys=True))
    if args.save_corrected is not None:
        corrected = apply_von_kries(scene.pixels, result.fused)
        Path(args.save_corrected).write_bytes(
            np.ascontiguousarray(corrected, dtype="<f4").tobytes()
        )
    return 0


def _cmd_bench(args) -> int:
    dataset = datagen.load(args.data)
    trainables = tuple(
        TrainableSpec(
            name=name,
            arch=name,
            channels=args.channels,
            dropout_rate=args.dropout,
            epochs=args.epochs,
            learning_rate=args.lr,
            batch_size=args.batch_size,
        )
        for name in ("g-net", "m-net")
    )
    config = BenchConfig(
        folds=args.k,
        nu=args.nu,
        base_seed=args.seed,
        sog_p=args.sog_p,
        workers=args.workers,
        trainables=trainables,
    )
    report = crossval(dataset, config)
    write_report(report, args.out)
    print(f"benchmark: {len(dataset.scenes)} scenes, {args.k} folds, nu={args.nu}")
    print(f"{'method':>16}  {'mean':>6} {'med':>6} {'tri':>6} {'b25':>6} {'w25':>6}  (recovery, deg)")
    for method in report.methods:
        s = report.summary[(method, "recovery")]
        print(
            f"{method:>16}  {s.mean:6.1f} {s.median:6.1f} {s.trimean:6.1f} "
            f"{s.best25_mean:6.1f} {s.worst25_mean:6.1f}"
        )
    print(f"report written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", default=None,
                        help="JSON file with flag defaults (flags override)")
    parser.add_argument("--seed", type=int, default=0, help="master seed")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mcde",
        description="Monte Carlo dropout ensembles for illuminant estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("gen-data", help="generate a synthetic scene dataset")
    p.add_argument("--scenes", type=_int_min(1), default=None, help="number of scenes")
    p.add_argument("--out", default=None, help="output dataset directory")
    p.add_argument("--width", type=_int_min(8), default=16)
    p.add_argument("--height", type=_int_min(8), default=16)
    p.add_argument("--patches", type=_int_min(1), default=25)
    p.add_argument("--pool", choices=_POOL_NAMES, default="full",
                   help="illuminant pool to draw labels from")
    p.add_argument("--noise-std", type=_float_min(0.0), default=0.01)
    _add_common(p)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="train one stock architecture")
    p.add_argument("--arch", choices=_ARCH_NAMES, default=None)
    p.add_argument("--data", default=None, help="dataset directory")
    p.add_argument("--out", default=None, help="output model path")
    p.add_argument("--epochs", type=_int_min(0), default=30)
    p.add_argument("--lr", type=_float_min(0.0), default=0.05)
    p.add_argument("--batch-size", type=_int_min(1), default=8)
    p.add_argument("--channels", type=_int_min(1), default=12)
    p.add_argument("--dropout", type=_float_min(0.0), default=0.3)
    p.add_argument("--subset", type=_span, default=None, metavar="START:STOP",
                   help="train on a half-open scene range")
    _add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("estimate", help="fused illuminant estimate for one scene")
    p.add_argument("--models", nargs="+", default=None, help="model paths")
    p.add_argument("--data", default=None, help="dataset directory")
    p.add_argument("--index", type=_int_min(0), default=0, help="scene index")
    p.add_argument("--nu", type=_int_min(1), default=30, help="MC passes per model")
    p.add_argument("--variant", choices=_VARIANTS, default="log")
    p.add_argument("--save-corrected", default=None, metavar="FILE",
                   help="write the corrected scene as little-endian float32")
    _add_common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("bench", help="cross-validated benchmark report")
    p.add_argument("--data", default=None, help="dataset directory")
    p.add_argument("--out", default=None, help="output report directory")
    p.add_argument("--k", type=_int_min(2), default=10, help="number of folds")
    p.add_argument("--nu", type=_int_min(1), default=30)
    p.add_argument("--epochs", type=_int_min(0), default=30)
    p.add_argument("--lr", type=_float_min(0.0), default=0.05)
    p.add_argument("--batch-size", type=_int_min(1), default=8)
    p.add_argument("--channels", type=_int_min(1), default=12)
    p.add_argument("--dropout", type=_float_min(0.0), default=0.3)
    p.add_argument("--sog-p", type=_float_min(1.0), default=6.0,
                   help="Minkowski norm for the shades-of-grey baseline")
    p.add_argument("--workers", type=_int_min(1), default=1,
                   help="parallel fold workers (does not change results)")
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    return parser, {name: sub.choices[name] for name in sub.choices}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = _build_parser()
    try:
        command, config_path = _prescan_config(argv)
        if config_path is not None and command is not None:
            subparsers[command].set_defaults(
                **_load_config_values(config_path, command)
            )
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        for key in _REQUIRED[args.command]:
            if getattr(args, key) is None:
                raise _UsageError(
                    f"missing required flag --{key.replace('_', '-')} "
                    f"(or config key {key!r})"
                )
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
