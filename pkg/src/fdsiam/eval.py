"""Embedding evaluation by exact 1-nearest-neighbor search.

Brute force on squared Euclidean distances; ties go to the lowest
reference index.  Self-matches are excluded only on request (leave-one-out
over an identical reference/query set).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import nearest_ref_indices
from .linalg import as_matrix


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    n_query: int
    n_reference: int


def one_nn_accuracy(
    reference, ref_labels, query, query_labels, exclude_self: bool = False
) -> EvalReport:
    """Fraction of query columns whose nearest reference shares their label."""
    reference = as_matrix(reference, "reference")
    query = as_matrix(query, "query")
    if reference.shape[1] < 1:
        raise ValueError("reference set is empty")
    if reference.shape[0] != query.shape[0]:
        raise ValueError(
            f"embedding dims differ: reference {reference.shape[0]}, query {query.shape[0]}"
        )
    ref_labels = np.asarray(ref_labels, dtype=np.int64).ravel()
    query_labels = np.asarray(query_labels, dtype=np.int64).ravel()
    if ref_labels.shape[0] != reference.shape[1]:
        raise ValueError("reference label count mismatch")
    if query_labels.shape[0] != query.shape[1]:
        raise ValueError("query label count mismatch")
    if exclude_self and reference.shape[1] != query.shape[1]:
        raise ValueError("exclude_self requires reference and query sets of equal size")
    if exclude_self and reference.shape[1] < 2:
        raise ValueError("exclude_self needs at least 2 reference samples")
    nearest = nearest_ref_indices(
        np.ascontiguousarray(reference.T),
        np.ascontiguousarray(query.T),
        exclude_self,
    )
    correct = int((ref_labels[np.asarray(nearest)] == query_labels).sum())
    return EvalReport(
        accuracy=correct / query_labels.shape[0],
        n_query=int(query_labels.shape[0]),
        n_reference=int(ref_labels.shape[0]),
    )
