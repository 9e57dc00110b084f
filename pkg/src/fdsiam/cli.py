"""Command-line interface.

Subcommands: train, eval, export, fda.  Flags mirror the run config in
kebab-case; precedence is CLI flag > --config key=value file > defaults.
Every command exits 0 on success and 1 on error with a message naming the
failing field or file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .backbone import forward, load_checkpoint, save_checkpoint
from .data_io import export_embeddings, load_embeddings_csv, load_idx
from .eval import one_nn_accuracy
from .fda import fda_fit, fda_transform, save_fda_model
from .rng import Xoshiro256
from .train import ConfigError, RunConfig, config_from_mapping, config_to_text, run_training

CONFIG_FLOAT_KEYS = ("alpha", "lam", "mu_w", "mu_b", "learning_rate", "positive_fraction")
CONFIG_INT_KEYS = ("q", "p", "batch_size", "epochs", "triplet_count", "seed")


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value config file; '#' starts a comment."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {text!r}")
            key, value = text.split("=", 1)
            mapping[key.strip()] = value.strip()
    return mapping


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file (flags override it)")
    parser.add_argument("--loss", choices=("triplet", "contrastive", "fdt", "fdc"))
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--mu-w", type=float)
    parser.add_argument("--mu-b", type=float)
    parser.add_argument("--q", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--triplet-count", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--hidden", help="comma-separated hidden layer widths, e.g. 512")
    parser.add_argument("--positive-fraction", type=float)
    parser.add_argument("--images", help="training images (IDX, .gz ok)")
    parser.add_argument("--labels", help="training labels (IDX, .gz ok)")
    parser.add_argument("--out-dir")


def _resolved_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    if args.config:
        base = config_from_mapping(read_config_file(args.config), base)
    overrides = {}
    for name in (
        "loss alpha lam mu_w mu_b q p batch_size learning_rate epochs "
        "triplet_count seed hidden positive_fraction images labels out_dir"
    ).split():
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = str(value)
    config = config_from_mapping(overrides, base)
    config.validate()
    if not config.images or not config.labels:
        raise ConfigError("images and labels paths are required (flags or config file)")
    return config


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolved_config(args)
    dataset = load_idx(config.images, config.labels)
    os.makedirs(config.out_dir, exist_ok=True)
    log_path = os.path.join(config.out_dir, "train_log.csv")
    result = run_training(config, dataset, log_path=log_path)
    checkpoint_path = os.path.join(config.out_dir, "checkpoint.fdlnet")
    save_checkpoint(result.params, checkpoint_path)
    with open(os.path.join(config.out_dir, "config_echo.txt"), "w", encoding="utf-8") as f:
        f.write(config_to_text(config))
    if result.epoch_mean_losses:
        print(
            f"trained loss={config.loss} epochs={config.epochs} "
            f"first_epoch_mean={result.epoch_mean_losses[0]:.6g} "
            f"final_epoch_mean={result.epoch_mean_losses[-1]:.6g}"
        )
    else:
        print(f"trained loss={config.loss} epochs=0 (checkpoint equals initialization)")
    print(f"checkpoint: {checkpoint_path}")
    return 0


def _embed(checkpoint_path: str, dataset, space: str) -> np.ndarray:
    params = load_checkpoint(checkpoint_path)
    trace = forward(params, dataset.data)
    if space == "latent":
        return trace.latent
    if space == "feature":
        return trace.features
    raise ValueError(f"space must be latent or feature, got {space!r}")


def _subsample(dataset_data, labels, count: int, seed: int):
    n = dataset_data.shape[1]
    if count <= 0 or count >= n:
        return dataset_data, labels
    rng = Xoshiro256(seed)
    chosen = []
    remaining = list(range(n))
    for _ in range(count):
        chosen.append(remaining.pop(rng.randint(len(remaining))))
    idx = np.array(chosen, dtype=np.int64)
    return dataset_data[:, idx], labels[idx]


def cmd_eval(args: argparse.Namespace) -> int:
    reference = load_idx(args.ref_images, args.ref_labels)
    query = load_idx(args.query_images, args.query_labels)
    ref_data, ref_labels = _subsample(
        reference.data, reference.labels, args.ref_sample, args.seed
    )
    query_data, query_labels = query.data, query.labels
    if args.query_limit > 0:
        query_data = query_data[:, : args.query_limit]
        query_labels = query_labels[: args.query_limit]

    params = load_checkpoint(args.checkpoint)
    ref_emb = forward(params, ref_data).latent if args.space == "latent" else forward(params, ref_data).features
    query_emb = (
        forward(params, query_data).latent
        if args.space == "latent"
        else forward(params, query_data).features
    )
    report = one_nn_accuracy(
        ref_emb, ref_labels, query_emb, query_labels, exclude_self=args.exclude_self
    )
    payload = {
        "accuracy": report.accuracy,
        "n_query": report.n_query,
        "n_reference": report.n_reference,
        "space": args.space,
    }
    print(json.dumps(payload))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(payload, f)
            f.write("\n")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    dataset = load_idx(args.images, args.labels)
    embeddings = _embed(args.checkpoint, dataset, args.space)
    export_embeddings(embeddings, dataset.labels, args.out)
    print(f"wrote {embeddings.shape[1]} embeddings ({args.space}, dim {embeddings.shape[0]}) to {args.out}")
    return 0


def cmd_fda(args: argparse.Namespace) -> int:
    if args.csv:
        data, labels = load_embeddings_csv(args.csv)
        if data.shape[1] == 0:
            raise ValueError(f"no samples in {args.csv}")
    elif args.images and args.labels:
        dataset = load_idx(args.images, args.labels)
        data, labels = dataset.data, dataset.labels
    else:
        raise ConfigError("fda needs either --csv or both --images and --labels")
    model = fda_fit(data, labels, args.p, mu_w=args.mu_w)
    os.makedirs(args.out_dir, exist_ok=True)
    model_path = os.path.join(args.out_dir, "fda_model.bin")
    save_fda_model(model, model_path)
    projected = fda_transform(model, data)
    csv_path = os.path.join(args.out_dir, "fda_embedding.csv")
    export_embeddings(projected, labels, csv_path)
    print(f"fda fit: d={data.shape[0]} p={args.p} top eigenvalue={model.eigenvalues[0]:.6g}")
    print(f"model: {model_path}")
    print(f"projected: {csv_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdsiam",
        description="Train and evaluate Siamese embeddings with Fisher-discriminant losses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model on an IDX dataset")
    _add_train_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="1-NN accuracy of a checkpoint's embeddings")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--ref-images", required=True)
    p_eval.add_argument("--ref-labels", required=True)
    p_eval.add_argument("--query-images", required=True)
    p_eval.add_argument("--query-labels", required=True)
    p_eval.add_argument("--space", choices=("latent", "feature"), default="feature")
    p_eval.add_argument("--ref-sample", type=int, default=0, help="seeded reference subsample size (0 = all)")
    p_eval.add_argument("--query-limit", type=int, default=0, help="use only the first N queries (0 = all)")
    p_eval.add_argument("--seed", type=int, default=42)
    p_eval.add_argument("--exclude-self", action="store_true", help="leave-one-out when ref == query")
    p_eval.add_argument("--out", help="also write the report as JSON here")
    p_eval.set_defaults(func=cmd_eval)

    p_export = sub.add_parser("export", help="export embeddings as CSV")
    p_export.add_argument("--checkpoint", required=True)
    p_export.add_argument("--images", required=True)
    p_export.add_argument("--labels", required=True)
    p_export.add_argument("--space", choices=("latent", "feature"), default="feature")
    p_export.add_argument("--out", required=True)
    p_export.set_defaults(func=cmd_export)

    p_fda = sub.add_parser("fda", help="fit the classical FDA baseline")
    p_fda.add_argument("--images")
    p_fda.add_argument("--labels")
    p_fda.add_argument("--csv", help="embedding-CSV input (label,f0,...) instead of IDX")
    p_fda.add_argument("--p", type=int, required=True)
    p_fda.add_argument("--mu-w", type=float, default=1e-4)
    p_fda.add_argument("--out-dir", required=True)
    p_fda.set_defaults(func=cmd_fda)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:  # ConfigError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
