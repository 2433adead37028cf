"""Experiment orchestration: suite parsing, the generate -> split ->
reduce -> train -> evaluate pipeline, metric computation, repetition and
CSV/JSON result emission.

Determinism contract: (suite file, master seed) fully determines every
emitted CSV byte.  Per-run seeds are master_seed + run_index and feed the
generator, the splitter, the reduction and the model training, so matched
experiments (e.g. QSVC vs classical SVC on the same dataset/reduction)
see identical splits and reduced features.

Feature scaling policy (recorded in the JSON mirror): features are
standardized on train statistics before reduction, except for the
autoencoder which receives min-max scaled inputs; after reduction,
angle/IQP-embedded models see train-standardized features scaled by pi/2,
amplitude-embedded models the raw reduced features.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import datasets, dimred, nn, qkernel, qnn, svm
from .embeddings import ANGLE_KINDS, EmbeddingSpec
from .errors import QdrBenchError, SuiteParseError, UsageError

SCHEMA_VERSION = 1
QNN_WIDTHS = (8, 10, 12, 14, 16)
QSVC_WIDTHS = (4, 5, 6, 7, 8)
CSV_HEADER = [
    "dataset", "reduction", "target_dim", "model", "ansatz", "embedding",
    "n_qubits", "run", "accuracy", "precision", "recall", "f1", "seed",
]


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float


def metrics(predictions, truth) -> MetricsReport:
    """Confusion-count metrics with the zero-division -> 0 convention."""
    p = np.asarray(predictions)
    t = np.asarray(truth)
    if len(p) != len(t) or len(p) == 0:
        raise UsageError("predictions and truth must be equal-length and non-empty")
    if not (set(np.unique(p)) | set(np.unique(t))) <= {0, 1}:
        raise UsageError("labels must be in {0, 1}")
    tp = int(np.sum((p == 1) & (t == 1)))
    fp = int(np.sum((p == 1) & (t == 0)))
    fn = int(np.sum((p == 0) & (t == 1)))
    tn = int(np.sum((p == 0) & (t == 0)))
    acc = (tp + tn) / len(p)
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    return MetricsReport(acc, prec, rec, f1)


# ---------------------------------------------------------------------------
# config parsing

def _take(d: dict, allowed: dict, context: str) -> dict:
    """Pop known keys with defaults; reject anything unknown."""
    unknown = set(d) - set(allowed)
    if unknown:
        raise SuiteParseError(f"unknown field(s) {sorted(unknown)} in {context}")
    return {k: d.get(k, v) for k, v in allowed.items()}


_DATASET_CONFIGS = {
    "linear": datasets.LinearGenConfig,
    "nonlinear": datasets.NonlinearGenConfig,
    "image4x4": datasets.ImageGenConfig,
}


@dataclass
class ExperimentConfig:
    name: str
    dataset_kind: str
    dataset_args: dict
    reduction: dict | None  # method/target_dim plus method options
    model_type: str
    model_args: dict
    training: dict
    repeats: int
    split_fraction: float
    standardize: str

    @staticmethod
    def from_dict(d: dict, index: int = 0) -> "ExperimentConfig":
        ctx = f"experiment #{index}"
        top = _take(d, {
            "name": f"experiment-{index}",
            "dataset": None, "reduction": None, "model": None,
            "training": {}, "repeats": 10, "split_fraction": 0.8,
            "standardize": "auto",
        }, ctx)
        if not isinstance(top["dataset"], dict) or "kind" not in top["dataset"]:
            raise SuiteParseError(f"{ctx}: dataset must be an object with a 'kind'")
        ds = dict(top["dataset"])
        kind = ds.pop("kind")
        if kind not in _DATASET_CONFIGS:
            raise SuiteParseError(f"{ctx}: unknown dataset kind {kind!r}")
        allowed = {f: getattr(_DATASET_CONFIGS[kind], f)
                   for f in _DATASET_CONFIGS[kind].__dataclass_fields__
                   if f != "seed"}
        ds = _take(ds, allowed, f"{ctx} dataset")

        red = top["reduction"]
        if red is not None:
            red = _take(dict(red), {
                "method": None, "target_dim": None,
                "tsne_perplexity": 30.0, "tsne_iterations": 1000,
                "autoencoder_epochs": 400,
            }, f"{ctx} reduction")
            if red["method"] not in dimred.REDUCTION_METHODS:
                raise SuiteParseError(
                    f"{ctx}: unknown reduction method {red['method']!r}"
                )
            if not isinstance(red["target_dim"], int) or red["target_dim"] < 1:
                raise SuiteParseError(f"{ctx}: reduction needs a positive target_dim")

        if not isinstance(top["model"], dict) or "type" not in top["model"]:
            raise SuiteParseError(f"{ctx}: model must be an object with a 'type'")
        model = dict(top["model"])
        mtype = model.pop("type")
        if mtype == "QNN":
            margs = _take(model, {
                "ansatz": "U_SU4", "embedding": {"kind": "Amplitude"},
                "layers": 2, "pooling": True, "wiring": "Ladder",
            }, f"{ctx} QNN model")
        elif mtype == "QSVC":
            margs = _take(model, {
                "embedding": {"kind": "AngleY"}, "layers": 1,
                "trainable": False, "C": 1.0,
            }, f"{ctx} QSVC model")
        elif mtype == "ClassicalSVC":
            margs = _take(model, {"C": 1.0, "gamma": None}, f"{ctx} SVC model")
        elif mtype == "CNN":
            margs = _take(model, {}, f"{ctx} CNN model")
        else:
            raise SuiteParseError(f"{ctx}: unknown model type {mtype!r}")
        if "embedding" in margs:
            margs["embedding"] = _take(dict(margs["embedding"]),
                                       {"kind": None, "iqp_repeats": 2},
                                       f"{ctx} embedding")

        training = _take(dict(top["training"]), {
            "iterations": 200, "batch_size": 32, "learning_rate": 0.01,
        }, f"{ctx} training")

        cfg = ExperimentConfig(
            name=str(top["name"]),
            dataset_kind=kind, dataset_args=ds,
            reduction=red, model_type=mtype, model_args=margs,
            training=training,
            repeats=int(top["repeats"]),
            split_fraction=float(top["split_fraction"]),
            standardize=top["standardize"],
        )
        cfg.validate(ctx)
        return cfg

    def validate(self, ctx: str) -> None:
        width = self.width()
        if self.model_type == "QNN" and width not in QNN_WIDTHS:
            raise SuiteParseError(
                f"{ctx}: QNN width must be one of {QNN_WIDTHS} and equal the "
                f"reduction target_dim (got {width})"
            )
        if self.model_type == "QSVC" and width not in QSVC_WIDTHS:
            raise SuiteParseError(
                f"{ctx}: QSVC width must be one of {QSVC_WIDTHS} and equal the "
                f"reduction target_dim (got {width})"
            )
        if self.repeats < 1:
            raise SuiteParseError(f"{ctx}: repeats must be >= 1")
        if not 0 < self.split_fraction < 1:
            raise SuiteParseError(f"{ctx}: split_fraction must be in (0, 1)")
        if self.standardize not in ("auto", True, False):
            raise SuiteParseError(f"{ctx}: standardize must be 'auto', true or false")

    def n_features(self) -> int:
        if self.dataset_kind == "linear":
            return self.dataset_args["n_features"]
        if self.dataset_kind == "nonlinear":
            return (self.dataset_args["n_informative"]
                    + self.dataset_args["n_redundant"]
                    + self.dataset_args["n_nuisance"])
        return 16

    def width(self) -> int:
        return self.reduction["target_dim"] if self.reduction else self.n_features()


# ---------------------------------------------------------------------------
# pipeline stages

def _stage(name: str):
    """Re-raise toolkit errors with the failing stage named."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, QdrBenchError):
                raise type(exc)(f"[{name}] {exc}") from exc
            return False
    return _Ctx()


def _standardize(train: np.ndarray, test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std[std == 0] = 1.0
    return (train - mean) / std, (test - mean) / std


def _minmax(train: np.ndarray, test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = train.min(axis=0)
    span = train.max(axis=0) - lo
    span[span == 0] = 1.0
    return (train - lo) / span, (test - lo) / span


def _embedding_kind(cfg: ExperimentConfig) -> str | None:
    emb = cfg.model_args.get("embedding")
    return emb["kind"] if emb else None


def run_single(cfg: ExperimentConfig, run_seed: int) -> MetricsReport:
    """One repeat of the pipeline; pure function of (cfg, run_seed)."""
    with _stage("generate"):
        gen_cfg = _DATASET_CONFIGS[cfg.dataset_kind](**cfg.dataset_args, seed=run_seed)
        gen = {"linear": datasets.gen_linear, "nonlinear": datasets.gen_nonlinear,
               "image4x4": datasets.gen_image4x4}[cfg.dataset_kind]
        ds = gen(gen_cfg)
    with _stage("split"):
        train, test = datasets.split(ds, cfg.split_fraction, run_seed)

    train_X, test_X = train.X, test.X
    method = cfg.reduction["method"] if cfg.reduction else None
    standardize = cfg.standardize
    if standardize == "auto":
        standardize = method != "Autoencoder"
    with _stage("scale"):
        if standardize:
            train_X, test_X = _standardize(train_X, test_X)
        elif method == "Autoencoder":
            train_X, test_X = _minmax(train_X, test_X)

    kind = _embedding_kind(cfg)
    if cfg.reduction:
        with _stage("reduce"):
            spec = dimred.ReductionSpec(
                method=method,
                target_dim=cfg.reduction["target_dim"],
                tsne_perplexity=cfg.reduction["tsne_perplexity"],
                tsne_iterations=cfg.reduction["tsne_iterations"],
                autoencoder_epochs=cfg.reduction["autoencoder_epochs"],
                seed=run_seed,
            )
            reduced = dimred.fit_transform(spec, train_X, test_X)
            train_X, test_X = reduced.train, reduced.test
        if kind == "Amplitude":
            # reduced coordinates have arbitrary scale and sign; map them
            # into the unit box (clipped away from zero rows)
            with _stage("scale"):
                train_X, test_X = _minmax(train_X, test_X)
                train_X = np.clip(train_X, 1e-6, None)
                test_X = np.clip(test_X, 1e-6, None)

    if kind in ANGLE_KINDS or kind == "IQP":
        with _stage("scale"):
            train_X, test_X = _standardize(train_X, test_X)
            train_X, test_X = train_X * (np.pi / 2), test_X * (np.pi / 2)

    with _stage("train"):
        settings = qnn.TrainSettings(seed=run_seed, **cfg.training)
        if cfg.model_type == "QNN":
            model_cfg = qnn.QnnConfig(
                n_qubits=cfg.width(),
                ansatz=cfg.model_args["ansatz"],
                embedding=EmbeddingSpec(**cfg.model_args["embedding"]),
                layers=cfg.model_args["layers"],
                pooling=cfg.model_args["pooling"],
                wiring=cfg.model_args["wiring"],
            )
            params, _ = qnn.train(model_cfg, settings, train_X, train.y)
            preds = qnn.predict(model_cfg, params, test_X)
        elif cfg.model_type == "QSVC":
            kernel_cfg = qkernel.KernelConfig(
                n_qubits=cfg.width(),
                embedding=EmbeddingSpec(**cfg.model_args["embedding"]),
                layers=cfg.model_args["layers"],
                trainable=cfg.model_args["trainable"],
            )
            y_pm = 2 * train.y - 1
            if kernel_cfg.trainable:
                kparams, _ = qkernel.train_kernel(kernel_cfg, train_X, y_pm, settings)
            else:
                kparams = np.zeros(0)
            gram = qkernel.gram(kernel_cfg, kparams, train_X)
            model = svm.fit(gram.entries, y_pm, C=cfg.model_args["C"])
            rows = qkernel.cross_gram(kernel_cfg, kparams, test_X, train_X)
            preds = (svm.predict_batch(model, rows) + 1) // 2
        elif cfg.model_type == "ClassicalSVC":
            model = svm.fit(train_X, 2 * train.y - 1, C=cfg.model_args["C"],
                            kernel="rbf", gamma=cfg.model_args["gamma"])
            preds = (svm.predict_batch(model, test_X) + 1) // 2
        else:  # CNN
            preds, _ = nn.train_cnn_baseline(train_X, train.y, test_X, settings)

    with _stage("evaluate"):
        return metrics(preds, test.y)


def run_experiment(cfg: ExperimentConfig, master_seed: int) -> list[dict]:
    """All repeats plus a mean row; rows in deterministic run order."""
    rows = []
    reports = []
    for r in range(cfg.repeats):
        seed_r = master_seed + r
        rep = run_single(cfg, seed_r)
        reports.append(rep)
        rows.append(_row(cfg, str(r), rep, seed_r))
    mean = MetricsReport(*(float(np.mean([getattr(m, f) for m in reports]))
                           for f in ("accuracy", "precision", "recall", "f1")))
    rows.append(_row(cfg, "mean", mean, master_seed))
    return rows


def _row(cfg: ExperimentConfig, run: str, rep: MetricsReport, seed: int) -> dict:
    return {
        "dataset": cfg.dataset_kind,
        "reduction": cfg.reduction["method"] if cfg.reduction else "none",
        "target_dim": cfg.width(),
        "model": cfg.model_type,
        "ansatz": cfg.model_args.get("ansatz", ""),
        "embedding": _embedding_kind(cfg) or "",
        "n_qubits": cfg.width() if cfg.model_type in ("QNN", "QSVC") else 0,
        "run": run,
        "accuracy": f"{rep.accuracy:.6f}",
        "precision": f"{rep.precision:.6f}",
        "recall": f"{rep.recall:.6f}",
        "f1": f"{rep.f1:.6f}",
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# suites

def parse_suite(path) -> list[ExperimentConfig]:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SuiteParseError(f"suite {path}: invalid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise SuiteParseError(f"suite {path}: top level must be an object")
    top = _take(payload, {"schema_version": None, "experiments": None},
                f"suite {path}")
    if top["schema_version"] != SCHEMA_VERSION:
        raise SuiteParseError(
            f"suite {path}: schema_version must be {SCHEMA_VERSION}"
        )
    if not isinstance(top["experiments"], list):
        raise SuiteParseError(f"suite {path}: experiments must be a list")
    return [
        ExperimentConfig.from_dict(e, i) for i, e in enumerate(top["experiments"])
    ]


def _run_one(args):
    cfg, master_seed, repeats_override = args
    if repeats_override is not None:
        cfg.repeats = repeats_override
    return run_experiment(cfg, master_seed)


def run_suite(suite_path, out_dir, master_seed: int,
              repeats_override: int | None = None, parallel: int = 1) -> dict:
    """Execute all experiments; write results.csv, summary.csv, results.json."""
    configs = parse_suite(suite_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, master_seed, repeats_override) for cfg in configs]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            all_rows = list(pool.map(_run_one, jobs))
    else:
        all_rows = [_run_one(j) for j in jobs]

    per_run = [r for rows in all_rows for r in rows if r["run"] != "mean"]
    means = [r for rows in all_rows for r in rows if r["run"] == "mean"]
    _write_csv(out / "results.csv", per_run)
    _write_csv(out / "summary.csv", means)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "master_seed": master_seed,
        "scaling_policy": "standardize-pre-reduction (min-max for autoencoder), "
                          "pi/2-standardized post-reduction for angle/IQP",
        "results": per_run,
        "summary": means,
    }
    (out / "results.json").write_text(json.dumps(payload, indent=2) + "\n")
    return payload


def _write_csv(path, rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    Path(path).write_text(buf.getvalue())
