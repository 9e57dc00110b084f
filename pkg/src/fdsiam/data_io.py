"""Dataset ingestion and embedding export.

Handles the IDX image/label container (the standard big-endian format,
gzip-transparent when the path ends in .gz), a seeded synthetic Gaussian
mixture generator for oracle tests and demos, and plain-CSV embedding
export/import.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import cholesky
from .rng import Xoshiro256

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass(frozen=True)
class LabeledDataset:
    data: np.ndarray    # (d, n), one column per sample
    labels: np.ndarray  # (n,), ids in [0, class_count)
    class_count: int

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"data must be 2-D, got shape {self.data.shape}")
        if self.labels.shape[0] != self.data.shape[1]:
            raise ValueError(
                f"label count {self.labels.shape[0]} does not match "
                f"sample count {self.data.shape[1]}"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ValueError("labels must lie in [0, class_count)")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def count(self) -> int:
        return self.data.shape[1]


def _open_maybe_gz(path: str, mode: str):
    return gzip.open(path, mode) if path.endswith(".gz") else open(path, mode)


def _read_exact(f, count: int, path: str, what: str) -> bytes:
    blob = f.read(count)
    if len(blob) != count:
        raise ValueError(
            f"truncated IDX file {path}: expected {count} bytes of {what}, got {len(blob)}"
        )
    return blob


def load_idx(images_path: str, labels_path: str) -> LabeledDataset:
    """Load an IDX image/label file pair into flattened [0,1] columns."""
    with _open_maybe_gz(images_path, "rb") as f:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(f, 16, images_path, "header"))
        if magic != IDX_IMAGE_MAGIC:
            raise ValueError(
                f"bad IDX magic 0x{magic:08x} in {images_path} "
                f"(expected image magic 0x{IDX_IMAGE_MAGIC:08x})"
            )
        pixels = np.frombuffer(
            _read_exact(f, count * rows * cols, images_path, "pixel data"), dtype=np.uint8
        )
    with _open_maybe_gz(labels_path, "rb") as f:
        magic, label_count = struct.unpack(">II", _read_exact(f, 8, labels_path, "header"))
        if magic != IDX_LABEL_MAGIC:
            raise ValueError(
                f"bad IDX magic 0x{magic:08x} in {labels_path} "
                f"(expected label magic 0x{IDX_LABEL_MAGIC:08x})"
            )
        labels = np.frombuffer(
            _read_exact(f, label_count, labels_path, "label data"), dtype=np.uint8
        )
    if count != label_count:
        raise ValueError(
            f"image/label count mismatch: {count} images in {images_path} "
            f"vs {label_count} labels in {labels_path}"
        )
    data = pixels.reshape(count, rows * cols).T.astype(np.float64) / 255.0
    labels = labels.astype(np.int64)
    class_count = int(labels.max()) + 1 if labels.size else 0
    return LabeledDataset(data=data, labels=labels, class_count=class_count)


def write_idx(images: np.ndarray, labels: np.ndarray, images_path: str, labels_path: str) -> None:
    """Write (n, rows, cols) uint8 images and their labels as an IDX pair."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    n, rows, cols = images.shape
    with _open_maybe_gz(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, n, rows, cols))
        f.write(images.tobytes())
    with _open_maybe_gz(labels_path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


def synthetic_gaussians(
    means: Sequence, covariances: Sequence, counts: Sequence[int], seed: int
) -> LabeledDataset:
    """Seeded Gaussian mixture, one class per (mean, covariance, count).

    Samples are mean + L z with L the Cholesky factor of the covariance and
    z standard normals from Box-Muller.  An all-zero covariance is allowed
    (all samples sit at the mean); any other non-PD covariance raises.
    """
    if not (len(means) == len(covariances) == len(counts)):
        raise ValueError("means, covariances, and counts must have equal length")
    means = [np.asarray(m, dtype=np.float64).ravel() for m in means]
    dim = means[0].shape[0]
    factors = []
    for k, cov in enumerate(covariances):
        cov = np.asarray(cov, dtype=np.float64)
        if cov.shape != (dim, dim):
            raise ValueError(f"covariance {k} has shape {cov.shape}, expected {(dim, dim)}")
        if means[k].shape[0] != dim:
            raise ValueError(f"mean {k} has dim {means[k].shape[0]}, expected {dim}")
        factors.append(np.zeros((dim, dim)) if not cov.any() else cholesky(cov))
    rng = Xoshiro256(seed)
    columns = []
    labels = []
    for k, (mean, factor, count) in enumerate(zip(means, factors, counts)):
        for _ in range(int(count)):
            z = rng.fill_gauss(dim)
            columns.append(mean + factor @ z)
            labels.append(k)
    data = np.stack(columns, axis=1)
    return LabeledDataset(data=data, labels=np.array(labels, dtype=np.int64), class_count=len(means))


def export_embeddings(embeddings: np.ndarray, labels, path: str) -> None:
    """Write embeddings (p, m) as CSV rows "label,f0,...,f{p-1}", 9 sig digits."""
    embeddings = np.asarray(embeddings, dtype=np.float64)
    labels = np.asarray(labels).ravel()
    if labels.shape[0] != embeddings.shape[1]:
        raise ValueError(
            f"label count {labels.shape[0]} does not match embedding count {embeddings.shape[1]}"
        )
    p = embeddings.shape[0]
    with open(path, "w", encoding="ascii") as f:
        f.write("label," + ",".join(f"f{i}" for i in range(p)) + "\n")
        for j in range(embeddings.shape[1]):
            coords = ",".join(f"{v:.9g}" for v in embeddings[:, j])
            f.write(f"{int(labels[j])},{coords}\n")


def load_embeddings_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse an export_embeddings CSV back into (embeddings (p, m), labels)."""
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().strip().split(",")
        if not header or header[0] != "label":
            raise ValueError(f"{path} is not an embedding CSV (header {header!r})")
        p = len(header) - 1
        labels = []
        cols = []
        for line_no, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != p + 1:
                raise ValueError(f"{path}:{line_no}: expected {p + 1} fields, got {len(fields)}")
            labels.append(int(fields[0]))
            cols.append([float(v) for v in fields[1:]])
    if not cols:
        return np.zeros((p, 0)), np.zeros(0, dtype=np.int64)
    return np.array(cols, dtype=np.float64).T, np.array(labels, dtype=np.int64)
