"""Reproducible training/evaluation loop with per-epoch metric logs.

A run is fully described by a RunConfig (JSON-loadable, unknown keys
rejected).  The master seed fans out into three documented sub-streams
(model init, optimizer init, shuffling), so identical configs replay
bit-for-bit.

Metric CSVs are the canonical, byte-reproducible output: the
wall_seconds column is fixed at 0 so two identical runs serialize
identically; measured per-epoch times live in the sidecar metadata JSON
instead.
"""

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import nn
from .data import BatchPlan, batches, load_idx, subset, synthetic_blobs
from .errors import ConfigError, NumericError
from .optim import OPTIMIZER_NAMES, init_optimizer, optimizer_step
from .seeding import (
    STREAM_MODEL,
    STREAM_OPTIMIZER,
    STREAM_SHUFFLE,
    derive_subseed,
    rng_from,
)

METRICS_HEADER = "epoch,train_loss,train_acc,val_loss,val_acc,wall_seconds"

_TOP_KEYS = {"model", "dataset", "optimizer", "epochs", "batch_size", "seed", "out_dir"}
_LAYER_KEYS = {"in_dim", "out_dim", "activation"}
_DATASET_KEYS = {
    "idx": {"kind", "train_images", "train_labels", "val_images", "val_labels"},
    "synthetic": {"kind", "n", "d", "classes", "spread", "seed", "val_n"},
}


@dataclass
class RunConfig:
    model: list                 # list of nn.LayerSpec
    dataset: dict               # validated dataset spec
    optimizer: dict             # {"name": ..., **hyper}
    epochs: int = 100
    batch_size: int = 128
    seed: int = 0
    out_dir: str = None


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    wall_seconds: float


@dataclass
class MetricsLog:
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def parse_run_config(raw):
    """Validate a plain dict into a RunConfig; unknown keys are an error."""
    if not isinstance(raw, dict):
        raise ConfigError(f"run config must be an object, got {type(raw).__name__}")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for key in ("model", "dataset", "optimizer"):
        if key not in raw:
            raise ConfigError(f"missing config key {key!r}")

    model_spec = raw["model"]
    if set(model_spec) != {"layers"}:
        raise ConfigError('model spec must be {"layers": [...]}')
    layers = []
    for entry in model_spec["layers"]:
        extra = set(entry) - _LAYER_KEYS
        if extra:
            raise ConfigError(f"unknown layer keys {sorted(extra)}")
        layers.append(nn.LayerSpec(**entry))
    if not layers:
        raise ConfigError("model needs at least one layer")

    dataset = dict(raw["dataset"])
    kind = dataset.get("kind")
    if kind not in _DATASET_KEYS:
        raise ConfigError(f"dataset kind must be one of {sorted(_DATASET_KEYS)}, got {kind!r}")
    allowed = _DATASET_KEYS[kind]
    unknown = set(dataset) - allowed
    if unknown:
        raise ConfigError(f"unknown dataset keys {sorted(unknown)}")
    missing = allowed - set(dataset)
    if missing:
        raise ConfigError(f"missing dataset keys {sorted(missing)}")

    optimizer = dict(raw["optimizer"])
    name = optimizer.get("name")
    if name not in OPTIMIZER_NAMES:
        raise ConfigError(f"optimizer name must be one of {OPTIMIZER_NAMES}, got {name!r}")

    epochs = int(raw.get("epochs", 100))
    if epochs < 0:
        raise ConfigError(f"epochs must be non-negative, got {epochs}")
    batch_size = int(raw.get("batch_size", 128))
    if batch_size < 1:
        raise ConfigError(f"batch_size must be positive, got {batch_size}")
    return RunConfig(model=layers, dataset=dataset, optimizer=optimizer,
                     epochs=epochs, batch_size=batch_size,
                     seed=int(raw.get("seed", 0)), out_dir=raw.get("out_dir"))


def load_run_config(path):
    """Read and validate a JSON run config file."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}") from None
    return parse_run_config(raw)


def config_to_dict(config):
    """Canonical plain-dict form of a RunConfig (layers as dicts)."""
    return {
        "model": {"layers": [
            {"in_dim": s.in_dim, "out_dim": s.out_dim, "activation": s.activation}
            for s in config.model
        ]},
        "dataset": dict(config.dataset),
        "optimizer": dict(config.optimizer),
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "seed": config.seed,
    }


def config_hash(config):
    """sha256 of the canonical config JSON; out_dir is excluded, so the
    same experiment hashes identically wherever its artifacts land."""
    blob = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_datasets(dataset_spec):
    """(train, validation) datasets for a validated dataset spec.

    Synthetic specs draw one pool of n + val_n samples (so both splits
    share the same class centers) and divide it with a permutation from
    sub-stream 1 of the dataset seed.
    """
    if dataset_spec["kind"] == "idx":
        train = load_idx(dataset_spec["train_images"], dataset_spec["train_labels"])
        val = load_idx(dataset_spec["val_images"], dataset_spec["val_labels"])
        return train, val
    d = dataset_spec
    if d["n"] < 1 or d["val_n"] < 1:
        raise ConfigError(f"n and val_n must be positive, got {d['n']} and {d['val_n']}")
    pool = synthetic_blobs(d["n"] + d["val_n"], d["d"], d["classes"], d["spread"],
                           d["seed"])
    perm = rng_from(derive_subseed(d["seed"], 1)).permutation(pool.n)
    return subset(pool, perm[:d["n"]]), subset(pool, perm[d["n"]:])


def evaluate(model, dataset, batch_size):
    """Full-pass mean loss and accuracy; touches no parameters.

    batch_size larger than the dataset degrades to a single full batch.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    step = min(int(batch_size), dataset.n)
    loss_sum = 0.0
    hit_sum = 0.0
    for start in range(0, dataset.n, step):
        X = dataset.features[start:start + step]
        y = dataset.labels[start:start + step]
        logits = nn.forward(model, X)
        loss_sum += nn.cross_entropy(logits, y) * len(y)
        hit_sum += nn.accuracy(logits, y) * len(y)
    return loss_sum / dataset.n, hit_sum / dataset.n


def train(config):
    """Run one training job and return its MetricsLog.

    Deterministic given the config: model, optimizer, and shuffling draw
    from fixed sub-streams of the master seed.  When config.out_dir is
    set, metrics.csv and run.json are written there; a numeric failure
    flushes the partial log with a failure marker before re-raising.
    """
    train_ds, val_ds = load_datasets(config.dataset)
    if config.model[0].in_dim != train_ds.d:
        raise ConfigError(
            f"model input dim {config.model[0].in_dim} does not match dataset dim {train_ds.d}"
        )
    if config.epochs > 0 and config.batch_size > train_ds.n:
        raise ConfigError(
            f"batch_size {config.batch_size} exceeds training set size {train_ds.n}"
        )
    model = nn.model_init(config.model, derive_subseed(config.seed, STREAM_MODEL))
    params = model.parameters()
    shapes = [p.shape for p in params]
    opt_state = init_optimizer(config.optimizer["name"], shapes,
                               {k: v for k, v in config.optimizer.items() if k != "name"},
                               derive_subseed(config.seed, STREAM_OPTIMIZER))
    plan = BatchPlan(batch_size=config.batch_size,
                     shuffle_seed=derive_subseed(config.seed, STREAM_SHUFFLE))

    log = MetricsLog(metadata={
        "config_hash": config_hash(config),
        "seed": config.seed,
        "optimizer": config.optimizer["name"],
        "optimizer_config": {k: v for k, v in config.optimizer.items() if k != "name"},
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "failed": False,
        "failure": None,
    })
    try:
        for epoch in range(config.epochs):
            tick = time.perf_counter()
            for idx in batches(train_ds, plan, epoch):
                _, grads = nn.loss_and_grads(model, train_ds.features[idx],
                                             train_ds.labels[idx])
                optimizer_step(opt_state, params, grads)
            train_loss, train_acc = evaluate(model, train_ds, config.batch_size)
            val_loss, val_acc = evaluate(model, val_ds, config.batch_size)
            log.records.append(EpochRecord(
                epoch=epoch, train_loss=train_loss, train_acc=train_acc,
                val_loss=val_loss, val_acc=val_acc,
                wall_seconds=time.perf_counter() - tick))
    except NumericError as e:
        log.metadata["failed"] = True
        log.metadata["failure"] = str(e)
        _finalize(log, config)
        raise
    _finalize(log, config)
    return log


def compare(configs, out_dir=None):
    """Train several configs on the same data/model and tabulate them.

    Returns (labels, logs, summary) where summary rows carry the best
    validation accuracy and final validation loss per run.  Labels are
    optimizer names, suffixed #k when the same optimizer appears twice.
    Individual run artifacts land in out_dir/<label>/ when out_dir is
    given.
    """
    configs = list(configs)
    if len(configs) < 2:
        raise ValueError(f"compare needs at least 2 configs, got {len(configs)}")
    first = configs[0]
    for other in configs[1:]:
        if config_to_dict(other)["dataset"] != config_to_dict(first)["dataset"]:
            raise ValueError("compare requires all configs to share one dataset spec")
        if config_to_dict(other)["model"] != config_to_dict(first)["model"]:
            raise ValueError("compare requires all configs to share one model spec")
    labels = _run_labels([c.optimizer["name"] for c in configs])
    logs = []
    for label, config in zip(labels, configs):
        if out_dir is not None:
            config = RunConfig(**{**config.__dict__,
                                  "out_dir": os.path.join(out_dir, label)})
        logs.append(train(config))
    summary = [{
        "optimizer": label,
        "best_val_acc": max(r.val_acc for r in log.records) if log.records else float("nan"),
        "final_val_loss": log.records[-1].val_loss if log.records else float("nan"),
    } for label, log in zip(labels, logs)]
    if out_dir is not None:
        write_comparison_csv(labels, logs, os.path.join(out_dir, "comparison.csv"))
        write_summary_csv(summary, os.path.join(out_dir, "summary.csv"))
    return labels, logs, summary


def write_metrics_csv(log, path):
    """Serialize per-epoch records; 9 significant digits per value.

    wall_seconds is written as 0 to keep the file byte-reproducible;
    measured times are in the metadata sidecar.
    """
    lines = [METRICS_HEADER]
    for r in log.records:
        lines.append(f"{r.epoch},{r.train_loss:.9g},{r.train_acc:.9g},"
                     f"{r.val_loss:.9g},{r.val_acc:.9g},{0.0:.9g}")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_run_metadata(log, path):
    meta = dict(log.metadata)
    meta["completed_epochs"] = len(log.records)
    meta["epoch_wall_seconds"] = [r.wall_seconds for r in log.records]
    meta["total_wall_seconds"] = float(sum(r.wall_seconds for r in log.records))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


def write_comparison_csv(labels, logs, path):
    """Aligned per-epoch metrics, one column group per run."""
    cols = ["epoch"]
    for label in labels:
        cols += [f"{label}_train_loss", f"{label}_train_acc",
                 f"{label}_val_loss", f"{label}_val_acc"]
    depth = min(len(log.records) for log in logs)
    lines = [",".join(cols)]
    for i in range(depth):
        row = [str(i)]
        for log in logs:
            r = log.records[i]
            row += [f"{r.train_loss:.9g}", f"{r.train_acc:.9g}",
                    f"{r.val_loss:.9g}", f"{r.val_acc:.9g}"]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_summary_csv(summary, path):
    lines = ["optimizer,best_val_acc,final_val_loss"]
    for row in summary:
        lines.append(f"{row['optimizer']},{row['best_val_acc']:.9g},"
                     f"{row['final_val_loss']:.9g}")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")


def _finalize(log, config):
    if config.out_dir is None:
        return
    os.makedirs(config.out_dir, exist_ok=True)
    write_metrics_csv(log, os.path.join(config.out_dir, "metrics.csv"))
    write_run_metadata(log, os.path.join(config.out_dir, "run.json"))


def _run_labels(names):
    from collections import Counter
    total = Counter(names)
    seen = Counter()
    labels = []
    for name in names:
        seen[name] += 1
        labels.append(name if total[name] == 1 else f"{name}#{seen[name]}")
    return labels
