"""Training harness: one loop tying sampling, backbone, and losses together.

The triplet/pair set is sampled once per run (from seed+1, so the weight
init at seed and the sampling stream stay independent) and iterated in
fixed consecutive mini-batches for the configured epochs; no per-epoch
reshuffle, so a (config, seed) pair fully determines the run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields, replace
from typing import Callable

import numpy as np

from .backbone import NetworkParams, backward, forward, init_params, sgd_step
from .data_io import LabeledDataset
from .losses import LossConfig, contrastive_loss, fdc_loss, fdt_loss, triplet_loss
from .sampling import PairBatch, TripletBatch, sample_pairs, sample_triplets
from .scatter import EmbeddedPairBatch, EmbeddedTripletBatch

LOSS_NAMES = ("triplet", "contrastive", "fdt", "fdc")
LOG_FLUSH_INTERVAL = 50


class ConfigError(ValueError):
    """Invalid run configuration; message lists every failing field."""


@dataclass(frozen=True)
class RunConfig:
    loss: str = "fdt"
    alpha: float = 0.25
    lam: float = 0.1
    mu_w: float = 1e-4
    mu_b: float = 1e-4
    q: int = 300
    p: int = 128
    batch_size: int = 32
    learning_rate: float = 1e-5
    epochs: int = 50
    triplet_count: int = 500
    seed: int = 42
    hidden: tuple[int, ...] = (512,)
    positive_fraction: float = 0.5
    images: str = ""
    labels: str = ""
    out_dir: str = "run"

    def validate(self) -> None:
        problems = []
        if self.loss not in LOSS_NAMES:
            problems.append(f"loss must be one of {LOSS_NAMES}, got {self.loss!r}")
        if self.alpha < 0:
            problems.append(f"alpha must be >= 0, got {self.alpha}")
        if not 0.0 < self.lam < 1.0:
            problems.append(f"lambda must lie in (0, 1), got {self.lam}")
        if self.mu_w < 0:
            problems.append(f"mu_w must be >= 0, got {self.mu_w}")
        if self.mu_b < 0:
            problems.append(f"mu_b must be >= 0, got {self.mu_b}")
        if not 1 <= self.p <= self.q:
            problems.append(f"need q >= p >= 1, got q={self.q}, p={self.p}")
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            problems.append(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            problems.append(f"epochs must be >= 0, got {self.epochs}")
        if self.triplet_count < 1:
            problems.append(f"triplet_count must be >= 1, got {self.triplet_count}")
        if any(h < 1 for h in self.hidden):
            problems.append(f"hidden widths must be >= 1, got {self.hidden}")
        if not 0.0 <= self.positive_fraction <= 1.0:
            problems.append(
                f"positive_fraction must lie in [0, 1], got {self.positive_fraction}"
            )
        if problems:
            raise ConfigError("invalid config: " + "; ".join(problems))

    def loss_config(self) -> LossConfig:
        return LossConfig(alpha=self.alpha, lam=self.lam, mu_w=self.mu_w, mu_b=self.mu_b)


@dataclass
class TrainResult:
    params: NetworkParams
    initial_params: NetworkParams
    log_rows: list[tuple[int, float, float]] = field(default_factory=list)
    epoch_mean_losses: list[float] = field(default_factory=list)


def _batch_slices(total: int, batch_size: int):
    for start in range(0, total, batch_size):
        yield slice(start, min(start + batch_size, total))


def run_training(
    config: RunConfig,
    dataset: LabeledDataset,
    log_path: str | None = None,
    progress: Callable[[int, float], None] | None = None,
) -> TrainResult:
    config.validate()
    d = dataset.dim
    params = init_params((d, *config.hidden, config.q), config.p, config.seed)
    result = TrainResult(params=params, initial_params=params)
    cfg = config.loss_config()
    pair_family = config.loss in ("contrastive", "fdc")
    if pair_family:
        pairs = sample_pairs(
            dataset.labels, config.triplet_count, config.seed + 1, config.positive_fraction
        )
    else:
        triplets = sample_triplets(dataset.labels, config.triplet_count, config.seed + 1)

    log_file = open(log_path, "w", newline="") if log_path else None
    writer = None
    if log_file:
        writer = csv.writer(log_file)
        writer.writerow(["step", "loss", "hinge_active_fraction"])

    step = 0
    try:
        for _ in range(config.epochs):
            epoch_losses = []
            for sl in _batch_slices(config.triplet_count, config.batch_size):
                if pair_family:
                    batch = PairBatch(pairs.idx_1[sl], pairs.idx_2[sl], pairs.y[sl])
                    params, value, active_fraction = _pair_step(params, dataset, batch, config, cfg)
                else:
                    batch = TripletBatch(
                        triplets.anchor_idx[sl], triplets.neighbor_idx[sl], triplets.distant_idx[sl]
                    )
                    params, value, active_fraction = _triplet_step(
                        params, dataset, batch, config, cfg
                    )
                step += 1
                result.log_rows.append((step, value, active_fraction))
                epoch_losses.append(value)
                if writer:
                    writer.writerow([step, repr(value), repr(active_fraction)])
                    if step % LOG_FLUSH_INTERVAL == 0:
                        log_file.flush()
                if progress:
                    progress(step, value)
            result.epoch_mean_losses.append(float(np.mean(epoch_losses)))
    finally:
        if log_file:
            log_file.close()
    result.params = params
    return result


def _triplet_step(params, dataset, batch: TripletBatch, config: RunConfig, cfg: LossConfig):
    b = len(batch)
    stacked = np.concatenate(
        [
            dataset.data[:, batch.anchor_idx],
            dataset.data[:, batch.neighbor_idx],
            dataset.data[:, batch.distant_idx],
        ],
        axis=1,
    )
    trace = forward(params, stacked)
    if config.loss == "fdt":
        o_a, o_n, o_d = np.split(trace.latent, 3, axis=1)
        out = fdt_loss(EmbeddedTripletBatch(o_a, o_n, o_d), params.projection_u, cfg)
        grads = backward(
            params,
            trace,
            grad_latent=np.concatenate([out.grad_a, out.grad_n, out.grad_d], axis=1),
            grad_u_direct=out.grad_u,
        )
    else:
        f_a, f_n, f_d = np.split(trace.features, 3, axis=1)
        out = triplet_loss(f_a, f_n, f_d, cfg.alpha)
        grads = backward(
            params,
            trace,
            grad_features=np.concatenate([out.grad_a, out.grad_n, out.grad_d], axis=1),
        )
    return sgd_step(params, grads, config.learning_rate), out.value, out.active_fraction


def _pair_step(params, dataset, batch: PairBatch, config: RunConfig, cfg: LossConfig):
    stacked = np.concatenate(
        [dataset.data[:, batch.idx_1], dataset.data[:, batch.idx_2]], axis=1
    )
    trace = forward(params, stacked)
    if config.loss == "fdc":
        o_1, o_2 = np.split(trace.latent, 2, axis=1)
        out = fdc_loss(EmbeddedPairBatch(o_1, o_2, batch.y), params.projection_u, cfg)
        grads = backward(
            params,
            trace,
            grad_latent=np.concatenate([out.grad_1, out.grad_2], axis=1),
            grad_u_direct=out.grad_u,
        )
    else:
        f_1, f_2 = np.split(trace.features, 2, axis=1)
        out = contrastive_loss(f_1, f_2, batch.y, cfg.alpha)
        grads = backward(
            params,
            trace,
            grad_features=np.concatenate([out.grad_1, out.grad_2], axis=1),
        )
    return sgd_step(params, grads, config.learning_rate), out.value, out.active_fraction


def config_to_text(config: RunConfig) -> str:
    """key=value echo of a config, replayable as a --config file."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if f.name == "hidden":
            value = ",".join(str(h) for h in value)
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


def config_from_mapping(mapping: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Build a RunConfig from string key=value pairs over a base config."""
    base = base or RunConfig()
    kwargs = {}
    valid = {f.name: f for f in fields(RunConfig)}
    for key, raw in mapping.items():
        name = key.replace("-", "_")
        if name == "lambda":
            name = "lam"
        if name not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        if name == "loss" or name in ("images", "labels", "out_dir"):
            kwargs[name] = raw
        elif name == "hidden":
            kwargs[name] = tuple(int(tok) for tok in str(raw).split(",") if tok != "")
        elif name in ("q", "p", "batch_size", "epochs", "triplet_count", "seed"):
            kwargs[name] = int(raw)
        else:
            kwargs[name] = float(raw)
    return replace(base, **kwargs)
