"""Seeded triplet and pair sampling over a labeled dataset.

Triplets are (anchor, neighbor, distant): anchor uniform over all samples,
neighbor uniform over the anchor's class excluding the anchor, distant
uniform over the other classes.  Pairs flip a positive/negative coin per
draw.  No hard-negative mining; draws are uniform and fully determined by
the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Xoshiro256


@dataclass(frozen=True)
class TripletBatch:
    anchor_idx: np.ndarray
    neighbor_idx: np.ndarray
    distant_idx: np.ndarray

    def __len__(self) -> int:
        return self.anchor_idx.shape[0]


@dataclass(frozen=True)
class PairBatch:
    idx_1: np.ndarray
    idx_2: np.ndarray
    y: np.ndarray  # 0 = same class, 1 = different class

    def __len__(self) -> int:
        return self.idx_1.shape[0]


def _class_index_lists(labels: np.ndarray) -> dict[int, np.ndarray]:
    classes = np.unique(labels)
    if classes.shape[0] < 2:
        raise ValueError(f"need at least 2 classes to sample, got {classes.shape[0]}")
    by_class = {}
    for k in classes:
        members = np.flatnonzero(labels == k)
        if members.shape[0] < 2:
            raise ValueError(f"class {int(k)} has {members.shape[0]} sample(s); need >= 2")
        by_class[int(k)] = members
    return by_class


def sample_triplets(labels, count: int, seed: int) -> TripletBatch:
    labels = np.asarray(labels, dtype=np.int64).ravel()
    by_class = _class_index_lists(labels)
    complements = {k: np.flatnonzero(labels != k) for k in by_class}
    rng = Xoshiro256(seed)
    n = labels.shape[0]
    anchors = np.empty(count, dtype=np.int64)
    neighbors = np.empty(count, dtype=np.int64)
    distants = np.empty(count, dtype=np.int64)
    for i in range(count):
        a = rng.randint(n)
        members = by_class[int(labels[a])]
        # uniform over the class minus the anchor: skip past the anchor's slot
        j = rng.randint(members.shape[0] - 1)
        pos_of_a = int(np.searchsorted(members, a))
        neighbor = members[j if j < pos_of_a else j + 1]
        comp = complements[int(labels[a])]
        distant = comp[rng.randint(comp.shape[0])]
        anchors[i] = a
        neighbors[i] = neighbor
        distants[i] = distant
    return TripletBatch(anchors, neighbors, distants)


def sample_pairs(labels, count: int, seed: int, positive_fraction: float = 0.5) -> PairBatch:
    if not 0.0 <= positive_fraction <= 1.0:
        raise ValueError(f"positive_fraction must lie in [0, 1], got {positive_fraction}")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    by_class = _class_index_lists(labels)
    complements = {k: np.flatnonzero(labels != k) for k in by_class}
    rng = Xoshiro256(seed)
    n = labels.shape[0]
    idx_1 = np.empty(count, dtype=np.int64)
    idx_2 = np.empty(count, dtype=np.int64)
    y = np.empty(count, dtype=np.int64)
    for i in range(count):
        positive = rng.random() < positive_fraction
        a = rng.randint(n)
        if positive:
            members = by_class[int(labels[a])]
            j = rng.randint(members.shape[0] - 1)
            pos_of_a = int(np.searchsorted(members, a))
            partner = members[j if j < pos_of_a else j + 1]
        else:
            comp = complements[int(labels[a])]
            partner = comp[rng.randint(comp.shape[0])]
        idx_1[i] = a
        idx_2[i] = partner
        y[i] = 0 if positive else 1
    return PairBatch(idx_1, idx_2, y)
