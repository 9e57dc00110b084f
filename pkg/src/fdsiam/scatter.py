"""Intra-/inter-class scatter matrix construction.

Covers the classical pairwise-difference scatters over a labeled dataset
and the mini-batch forms built from embedded triplets (anchor-neighbor and
anchor-distant difference columns) or labeled pairs, with optional diagonal
strengthening ``mu * I`` to force full rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

DEFAULT_MU = 1e-4


@dataclass(frozen=True)
class ScatterPair:
    """Within/between scatter matrices with their diagonal strengthening."""

    s_w: np.ndarray
    s_b: np.ndarray
    mu_w: float
    mu_b: float


@dataclass(frozen=True)
class EmbeddedTripletBatch:
    """Latent embeddings of a triplet mini-batch, one column per triplet."""

    o_a: np.ndarray
    o_n: np.ndarray
    o_d: np.ndarray

    def __post_init__(self):
        o_a = as_matrix(self.o_a, "o_a")
        o_n = as_matrix(self.o_n, "o_n")
        o_d = as_matrix(self.o_d, "o_d")
        if not (o_a.shape == o_n.shape == o_d.shape):
            raise ValueError(
                f"triplet batch shape mismatch: o_a {o_a.shape}, "
                f"o_n {o_n.shape}, o_d {o_d.shape}"
            )
        for name, arr in (("o_a", o_a), ("o_n", o_n), ("o_d", o_d)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "o_a", o_a)
        object.__setattr__(self, "o_n", o_n)
        object.__setattr__(self, "o_d", o_d)

    @property
    def batch_size(self) -> int:
        return self.o_a.shape[1]


@dataclass(frozen=True)
class EmbeddedPairBatch:
    """Latent embeddings of a pair mini-batch; y=0 similar, y=1 dissimilar."""

    o_1: np.ndarray
    o_2: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        o_1 = as_matrix(self.o_1, "o_1")
        o_2 = as_matrix(self.o_2, "o_2")
        if o_1.shape != o_2.shape:
            raise ValueError(f"pair batch shape mismatch: o_1 {o_1.shape}, o_2 {o_2.shape}")
        y = np.asarray(self.y, dtype=np.int64).ravel()
        if y.shape[0] != o_1.shape[1]:
            raise ValueError(f"y length {y.shape[0]} does not match batch size {o_1.shape[1]}")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("y entries must be 0 or 1")
        for name, arr in (("o_1", o_1), ("o_2", o_2)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "o_1", o_1)
        object.__setattr__(self, "o_2", o_2)
        object.__setattr__(self, "y", y)

    @property
    def batch_size(self) -> int:
        return self.o_1.shape[1]


def _check_mu(mu_w: float, mu_b: float) -> tuple[float, float]:
    if mu_w < 0 or mu_b < 0:
        raise ValueError(f"mu_w and mu_b must be non-negative, got {mu_w}, {mu_b}")
    return float(mu_w), float(mu_b)


def _sum_outer(diffs: np.ndarray, dim: int) -> np.ndarray:
    """Sum of column outer products in canonical (lexicographic) column order.

    The canonical order makes the sum bitwise invariant under permutations
    of the batch.
    """
    total = np.zeros((dim, dim), dtype=np.float64)
    if diffs.shape[1] == 0:
        return total
    for j in np.lexsort(diffs[::-1]):
        col = diffs[:, j]
        total += np.outer(col, col)
    return total


def triplet_scatters(
    batch: EmbeddedTripletBatch, mu_w: float = DEFAULT_MU, mu_b: float = DEFAULT_MU
) -> ScatterPair:
    """Batch scatters from anchor-neighbor and anchor-distant differences."""
    mu_w, mu_b = _check_mu(mu_w, mu_b)
    q = batch.o_a.shape[0]
    s_w = _sum_outer(batch.o_a - batch.o_n, q) + mu_w * np.eye(q)
    s_b = _sum_outer(batch.o_a - batch.o_d, q) + mu_b * np.eye(q)
    return ScatterPair(s_w, s_b, mu_w, mu_b)


def pair_scatters(
    batch: EmbeddedPairBatch, mu_w: float = DEFAULT_MU, mu_b: float = DEFAULT_MU
) -> ScatterPair:
    """Batch scatters from pair differences, split by the pair label y.

    A batch with no pairs of one kind contributes only its mu * I term.
    """
    mu_w, mu_b = _check_mu(mu_w, mu_b)
    q = batch.o_1.shape[0]
    diffs = batch.o_1 - batch.o_2
    s_w = _sum_outer(diffs[:, batch.y == 0], q) + mu_w * np.eye(q)
    s_b = _sum_outer(diffs[:, batch.y == 1], q) + mu_b * np.eye(q)
    return ScatterPair(s_w, s_b, mu_w, mu_b)


def classical_scatters(data, labels) -> ScatterPair:
    """Scatters over all ordered same-class / cross-class sample pairs.

    Uses the identity sum_ij (x_i - x_j)(x_i - x_j)^T = 2n X X^T - 2 s s^T
    per group, so large datasets avoid the quadratic pair loop.  mu fields
    are zero; callers strengthen as needed.
    """
    data = as_matrix(data, "data")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.shape[0] != data.shape[1]:
        raise ValueError(
            f"labels length {labels.shape[0]} does not match sample count {data.shape[1]}"
        )
    classes = np.unique(labels)
    if classes.shape[0] < 2:
        raise ValueError(f"need at least 2 classes, got {classes.shape[0]}")

    def pair_sum(x: np.ndarray) -> np.ndarray:
        n = x.shape[1]
        col_sum = x.sum(axis=1)
        return 2.0 * n * (x @ x.T) - 2.0 * np.outer(col_sum, col_sum)

    s_w = np.zeros((data.shape[0], data.shape[0]), dtype=np.float64)
    for k in classes:
        s_w += pair_sum(data[:, labels == k])
    s_b = pair_sum(data) - s_w
    return ScatterPair(s_w, s_b, 0.0, 0.0)


def total_scatter(sp: ScatterPair) -> np.ndarray:
    """Total scatter S_T = S_B + S_W."""
    return sp.s_b + sp.s_w
