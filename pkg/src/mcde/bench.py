"""Benchmark protocols, error statistics, and report files.

Reports are deterministic: identical (dataset, config, seeds) produce
byte-identical files, regardless of worker count.  All randomness is
derived from the run's base seed, and per-sample MC seeds are keyed by
the sample's global index rather than by visit order.

Report directory layout:

    config.json     fully resolved run configuration (everything
                    needed to reproduce; output paths and worker
                    counts deliberately excluded, they do not affect
                    results)
    summary.csv     method, metric, and the seven error statistics
    per_sample.csv  sample, method, metric, error_deg
    scatter_*.csv   per-sample joins for the usual diagnostic plots

CSV files are UTF-8, comma-separated, one header row, full-precision
(17 significant digit) decimals.  Human-readable renderings round to
one decimal; the files never do.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from pathlib import Path

import numpy as np

from mcde import baselines, fusion
from mcde.color import recovery_error, reproduction_error
from mcde.datagen import Dataset, GenConfig, folds, gen_dataset
from mcde.nn.archs import build
from mcde.nn.training import TrainConfig, train
from mcde.seeding import derive_seed

__all__ = [
    "METRICS",
    "ErrorStats",
    "stats",
    "TrainableSpec",
    "BenchConfig",
    "BenchReport",
    "crossval",
    "scatter_export",
    "write_report",
    "ScenarioConfig",
    "band_shift_scenario",
]

METRICS = ("recovery", "reproduction")
_METRIC_FNS = {"recovery": recovery_error, "reproduction": reproduction_error}


@dataclass(frozen=True)
class ErrorStats:
    """The seven summary statistics used for angular error tables."""

    best25_mean: float
    mean: float
    median: float
    trimean: float
    worst25_mean: float
    worst10_mean: float
    worst5_mean: float


def _tail_count(n: int, num: int, den: int) -> int:
    # ceil(n * num / den) in exact integer arithmetic.
    return -((-n * num) // den)


def stats(errors) -> ErrorStats:
    """Summary statistics of an error sample.

    Quantiles use linear interpolation between order statistics; the
    best/worst tail means average the ceil(q * n) smallest/largest
    values; the trimean is (Q1 + 2 * median + Q3) / 4.
    """
    arr = np.sort(np.asarray(errors, dtype=np.float64).ravel())
    n = arr.size
    if n == 0:
        raise ValueError("cannot summarize an empty error sample")
    q1, q2, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    c25 = _tail_count(n, 1, 4)
    c10 = _tail_count(n, 1, 10)
    c5 = _tail_count(n, 1, 20)
    return ErrorStats(
        best25_mean=float(arr[:c25].mean()),
        mean=float(arr.mean()),
        median=float(q2),
        trimean=float((q1 + 2.0 * q2 + q3) / 4.0),
        worst25_mean=float(arr[-c25:].mean()),
        worst10_mean=float(arr[-c10:].mean()),
        worst5_mean=float(arr[-c5:].mean()),
    )


@dataclass(frozen=True)
class TrainableSpec:
    """One trainable ensemble member and its training hyperparameters."""

    name: str
    arch: str
    channels: int = 12
    dropout_rate: float = 0.3
    epochs: int = 30
    learning_rate: float = 0.05
    batch_size: int = 8


DEFAULT_TRAINABLES = (
    TrainableSpec(name="g-net", arch="g-net"),
    TrainableSpec(name="m-net", arch="m-net"),
)


@dataclass(frozen=True)
class BenchConfig:
    folds: int = 10
    nu: int = 30
    base_seed: int = 0
    sog_p: float = 6.0
    workers: int = 1
    trainables: tuple[TrainableSpec, ...] = DEFAULT_TRAINABLES


@dataclass
class BenchReport:
    """Everything a report directory is rendered from.

    errors maps (method, metric) to per-sample error arrays aligned
    with sample_ids; summary holds the corresponding ErrorStats; and
    uncertainties keeps each model's per-sample total uncertainty for
    the confidence scatter.
    """

    config: dict
    methods: tuple[str, ...]
    model_names: tuple[str, ...]
    sample_ids: np.ndarray
    errors: dict[tuple[str, str], np.ndarray]
    summary: dict[tuple[str, str], ErrorStats]
    uncertainties: dict[str, np.ndarray]


def _method_list(model_names) -> tuple[str, ...]:
    methods = ["grey-world", "shades-of-grey", *model_names]
    if model_names:
        methods += ["mcde-linear", "mcde-log", "ideal"]
    return tuple(methods)


def _evaluate_samples(models, scenes, sample_ids, nu, base_seed, sog_p):
    """Per-sample errors and uncertainties for one batch of scenes.

    ``models`` is a list of (name, network) pairs; MC seeds are keyed
    by each sample's global id so results are independent of batching.
    """
    model_names = [name for name, _ in models]
    nets = [net for _, net in models]
    methods = _method_list(model_names)
    errors = {(m, metric): [] for m in methods for metric in METRICS}
    uncertainties: dict[str, list[float]] = {name: [] for name in model_names}

    for sample_id, scene in zip(sample_ids, scenes):
        estimates = []
        fused = {}
        if nets:
            estimates = fusion.ensemble_estimates(
                nets, scene.pixels, nu, derive_seed("sample-mc", base_seed, sample_id)
            )
            for variant in ("linear", "log"):
                fused[variant] = fusion.fuse(estimates, variant).fused
            for name, est in zip(model_names, estimates):
                uncertainties[name].append(est.mu)
        gw = baselines.grey_world(scene.pixels)
        sog = baselines.shades_of_grey(scene.pixels, sog_p)
        for metric in METRICS:
            fn = _METRIC_FNS[metric]
            errors[("grey-world", metric)].append(float(fn(scene.label, gw)))
            errors[("shades-of-grey", metric)].append(float(fn(scene.label, sog)))
            if nets:
                member_errors = [
                    float(fn(scene.label, est.mean)) for est in estimates
                ]
                for name, err in zip(model_names, member_errors):
                    errors[(name, metric)].append(err)
                for variant in ("linear", "log"):
                    errors[(f"mcde-{variant}", metric)].append(
                        float(fn(scene.label, fused[variant]))
                    )
                errors[("ideal", metric)].append(min(member_errors))
    return errors, uncertainties


def _merge_batches(batches):
    errors: dict[tuple[str, str], list[float]] = {}
    uncertainties: dict[str, list[float]] = {}
    for batch_errors, batch_unc in batches:
        for key, values in batch_errors.items():
            errors.setdefault(key, []).extend(values)
        for name, values in batch_unc.items():
            uncertainties.setdefault(name, []).extend(values)
    return (
        {key: np.array(values) for key, values in errors.items()},
        {name: np.array(values) for name, values in uncertainties.items()},
    )


def _train_member(spec: TrainableSpec, scenes, init_seed: int, train_seed: int):
    net = build(
        spec.arch,
        seed=init_seed,
        channels=spec.channels,
        dropout_rate=spec.dropout_rate,
    )
    train(
        net,
        scenes,
        TrainConfig(
            epochs=spec.epochs,
            learning_rate=spec.learning_rate,
            batch_size=spec.batch_size,
            base_seed=train_seed,
        ),
    )
    return net


def _run_fold(dataset: Dataset, config: BenchConfig, spans, fold_index: int):
    span = spans[fold_index]
    try:
        train_scenes = [
            scene
            for i, scene in enumerate(dataset.scenes)
            if i < span.start or i >= span.stop
        ]
        models = []
        for spec in config.trainables:
            net = _train_member(
                spec,
                train_scenes,
                init_seed=derive_seed("fold-init", config.base_seed, fold_index, spec.name),
                train_seed=derive_seed("fold-train", config.base_seed, fold_index, spec.name),
            )
            models.append((spec.name, net))
        eval_scenes = [dataset.scenes[i] for i in span]
        return _evaluate_samples(
            models, eval_scenes, list(span), config.nu, config.base_seed, config.sog_p
        )
    except Exception as exc:
        raise RuntimeError(f"fold {fold_index} failed: {exc}") from exc


def crossval(dataset: Dataset, config: BenchConfig = BenchConfig()) -> BenchReport:
    """k-fold protocol: train members on the other k-1 folds, score the rest.

    Folds are independent, so ``config.workers`` > 1 fans them out to
    worker processes; results are merged in fold order and are
    identical for any worker count.
    """
    spans = folds(len(dataset.scenes), config.folds)
    runner = partial(_run_fold, dataset, config, spans)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            batches = list(pool.map(runner, range(len(spans))))
    else:
        batches = [runner(i) for i in range(len(spans))]
    errors, uncertainties = _merge_batches(batches)
    model_names = tuple(spec.name for spec in config.trainables)
    summary = {key: stats(values) for key, values in errors.items()}
    echo = {
        "protocol": "cross-validation",
        "folds": config.folds,
        "nu": config.nu,
        "base_seed": config.base_seed,
        "sog_p": config.sog_p,
        "trainables": [asdict(spec) for spec in config.trainables],
        "dataset": asdict(dataset.config),
        "format_version": 1,
    }
    return BenchReport(
        config=echo,
        methods=_method_list(model_names),
        model_names=model_names,
        sample_ids=np.arange(len(dataset.scenes)),
        errors=errors,
        summary=summary,
        uncertainties=uncertainties,
    )


def scatter_export(report: BenchReport, kind: str, model_a: str | None = None,
                   model_b: str | None = None, model: str | None = None,
                   metric: str = "recovery"):
    """Rows for a diagnostic scatter plot.

    kind "error_pair": per-sample errors of two methods against each
    other.  kind "error_vs_confidence": a model's per-sample error
    against its raw (pre-normalization) log-inverse confidence score.
    Returns (header, rows); unknown method names raise KeyError.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    ids = report.sample_ids
    if kind == "error_pair":
        for name in (model_a, model_b):
            if (name, metric) not in report.errors:
                raise KeyError(f"unknown method {name!r}")
        header = ["sample", f"{model_a}_{metric}_deg", f"{model_b}_{metric}_deg"]
        xs = report.errors[(model_a, metric)]
        ys = report.errors[(model_b, metric)]
        return header, [(int(i), float(x), float(y)) for i, x, y in zip(ids, xs, ys)]
    if kind == "error_vs_confidence":
        if model not in report.uncertainties:
            raise KeyError(f"unknown model {model!r}")
        scores = fusion.raw_confidence(report.uncertainties[model], "log")
        errs = report.errors[(model, metric)]
        header = ["sample", f"{model}_log_inverse_confidence", f"{model}_{metric}_deg"]
        return header, [
            (int(i), float(s), float(e)) for i, s, e in zip(ids, scores, errs)
        ]
    raise ValueError(f"unknown scatter kind {kind!r}")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row)
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report(report: BenchReport, out_dir) -> None:
    """Render a report directory; bytes depend only on the report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(
        json.dumps(report.config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    stat_fields = (
        "best25_mean",
        "mean",
        "median",
        "trimean",
        "worst25_mean",
        "worst10_mean",
        "worst5_mean",
    )
    summary_rows = []
    for method in report.methods:
        for metric in METRICS:
            entry = report.summary[(method, metric)]
            summary_rows.append(
                (method, metric, *(getattr(entry, f) for f in stat_fields))
            )
    _write_csv(out / "summary.csv", ["method", "metric", *stat_fields], summary_rows)

    sample_rows = []
    for pos, sample_id in enumerate(report.sample_ids):
        for method in report.methods:
            for metric in METRICS:
                sample_rows.append(
                    (int(sample_id), method, metric, float(report.errors[(method, metric)][pos]))
                )
    _write_csv(
        out / "per_sample.csv", ["sample", "method", "metric", "error_deg"], sample_rows
    )

    if len(report.model_names) >= 2:
        first, second = report.model_names[:2]
        for metric in METRICS:
            header, rows = scatter_export(
                report, "error_pair", model_a=first, model_b=second, metric=metric
            )
            _write_csv(out / f"scatter_{metric}_errors.csv", header, rows)
    for name in report.model_names:
        header, rows = scatter_export(report, "error_vs_confidence", model=name)
        _write_csv(out / f"scatter_confidence_{name}.csv", header, rows)


@dataclass(frozen=True)
class ScenarioConfig:
    """Domain-shift scenario: each member sees only one illuminant band.

    g-net trains on blue-shifted scenes, m-net on red-shifted ones, and
    both are evaluated on a mixed set drawn from the union of the two
    bands.  Off-band inputs make a member's dropout passes disagree,
    so the fusion can lean on whichever member is at home.
    """

    seed: int = 7
    eval_per_band: int = 200
    train_per_band: int = 360
    nu: int = 30
    width: int = 16
    height: int = 16
    n_patches: int = 25
    noise_std: float = 0.01
    channels: int = 12
    dropout_rate: float = 0.45
    epochs: int = 60
    learning_rate: float = 0.05
    batch_size: int = 8
    sog_p: float = 6.0


def band_shift_scenario(config: ScenarioConfig = ScenarioConfig()) -> BenchReport:
    """Train one member per band, evaluate on the union of both bands."""
    members = (("g-net", "band-a"), ("m-net", "band-b"))
    models = []
    for name, band in members:
        train_ds = gen_dataset(
            GenConfig(
                n_scenes=config.train_per_band,
                width=config.width,
                height=config.height,
                n_patches=config.n_patches,
                pool=band,
                noise_std=config.noise_std,
                base_seed=derive_seed("scenario-train", config.seed, band),
            )
        )
        spec = TrainableSpec(
            name=name,
            arch=name,
            channels=config.channels,
            dropout_rate=config.dropout_rate,
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            batch_size=config.batch_size,
        )
        net = _train_member(
            spec,
            train_ds.scenes,
            init_seed=derive_seed("scenario-init", config.seed, name),
            train_seed=derive_seed("scenario-train-loop", config.seed, name),
        )
        models.append((name, net))

    eval_scenes = []
    for _, band in members:
        eval_scenes.extend(
            gen_dataset(
                GenConfig(
                    n_scenes=config.eval_per_band,
                    width=config.width,
                    height=config.height,
                    n_patches=config.n_patches,
                    pool=band,
                    noise_std=config.noise_std,
                    base_seed=derive_seed("scenario-eval", config.seed, band),
                )
            ).scenes
        )

    sample_ids = list(range(len(eval_scenes)))
    errors_lists, unc_lists = _evaluate_samples(
        models,
        eval_scenes,
        sample_ids,
        config.nu,
        derive_seed("scenario-mc", config.seed),
        config.sog_p,
    )
    errors, uncertainties = _merge_batches([(errors_lists, unc_lists)])
    model_names = tuple(name for name, _ in members)
    echo = {"protocol": "band-shift-scenario", "format_version": 1, **asdict(config)}
    return BenchReport(
        config=echo,
        methods=_method_list(model_names),
        model_names=model_names,
        sample_ids=np.arange(len(eval_scenes)),
        errors=errors,
        summary={key: stats(values) for key, values in errors.items()},
        uncertainties=uncertainties,
    )
