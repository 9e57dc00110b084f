"""Classical Fisher discriminant analysis baseline.

Fits a p-dimensional subspace by maximizing the projected between/within
trace ratio: build the pairwise-difference scatters, strengthen S_W to
positive definiteness, and take the top-p generalized eigenvectors of
(S_B, S_W).  Columns come out S_W-orthonormal with a deterministic sign.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, generalized_eig
from .scatter import DEFAULT_MU, classical_scatters

FDA_MODEL_MAGIC = b"FDAMDL1"


@dataclass(frozen=True)
class FdaModel:
    projection: np.ndarray   # (d, p), top generalized eigenvectors as columns
    eigenvalues: np.ndarray  # (p,), descending


def fda_fit(data, labels, p: int, mu_w: float = DEFAULT_MU) -> FdaModel:
    data = as_matrix(data, "data")
    d = data.shape[0]
    if not 1 <= p <= d:
        raise ValueError(f"p must lie in [1, {d}], got {p}")
    sp = classical_scatters(data, labels)
    s_w = sp.s_w + mu_w * np.eye(d)
    values, vectors = generalized_eig(sp.s_b, s_w)
    projection = vectors[:, :p].copy()
    # deterministic sign: each column's largest-magnitude entry is positive
    for j in range(p):
        lead = np.argmax(np.abs(projection[:, j]))
        if projection[lead, j] < 0:
            projection[:, j] = -projection[:, j]
    return FdaModel(projection=projection, eigenvalues=values[:p].copy())


def fda_transform(model: FdaModel, data) -> np.ndarray:
    data = as_matrix(data, "data")
    if data.shape[0] != model.projection.shape[0]:
        raise ValueError(
            f"data dim {data.shape[0]} does not match model dim {model.projection.shape[0]}"
        )
    return model.projection.T @ data


def save_fda_model(model: FdaModel, path: str) -> None:
    d, p = model.projection.shape
    with open(path, "wb") as f:
        f.write(FDA_MODEL_MAGIC)
        f.write(struct.pack("<II", d, p))
        f.write(model.eigenvalues.astype("<f8").tobytes())
        f.write(model.projection.astype("<f8").tobytes())


def load_fda_model(path: str) -> FdaModel:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[: len(FDA_MODEL_MAGIC)] != FDA_MODEL_MAGIC:
        raise ValueError(f"bad FDA model magic in {path}")
    offset = len(FDA_MODEL_MAGIC)
    d, p = struct.unpack("<II", blob[offset : offset + 8])
    offset += 8
    expected = offset + 8 * p + 8 * d * p
    if len(blob) != expected:
        raise ValueError(f"FDA model {path} has {len(blob)} bytes, expected {expected}")
    eigenvalues = np.frombuffer(blob[offset : offset + 8 * p], dtype="<f8").astype(np.float64)
    offset += 8 * p
    projection = np.frombuffer(blob[offset:], dtype="<f8").astype(np.float64).reshape(d, p)
    return FdaModel(projection=projection, eigenvalues=eigenvalues)
