"""Reference (pure numpy) implementations of the compiled kernels.

These are the fallback lane and the executable definition of what the
Cython lane must compute: same pivot rule, same rotation order, same
convergence test, same tie-breaking.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


def cholesky_lower(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Lower Cholesky factor of a symmetric matrix.

    Returns (L, pivot) where pivot is -1 on success or the index of the
    first non-positive diagonal pivot (input not positive definite).
    """
    n = a.shape[0]
    low = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1):
            acc = a[i, j] - float(low[i, :j] @ low[j, :j])
            if i == j:
                if acc <= 0.0 or math.isnan(acc):
                    return low, i
                low[i, i] = math.sqrt(acc)
            else:
                low[i, j] = acc / low[j, j]
    return low, -1


def _off_diag_norm(a: np.ndarray) -> float:
    total = float((a * a).sum()) - float((np.diagonal(a) ** 2).sum())
    return math.sqrt(max(total, 0.0))


def jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps row-cyclically until the off-diagonal Frobenius norm falls to
    JACOBI_REL_TOL relative to ||a||_F, stops improving, or
    JACOBI_MAX_SWEEPS is hit.  Returns (diagonal values, accumulated
    eigenvector columns, sweep count); values are unsorted.
    """
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.float64)
    scale = math.sqrt(float((a * a).sum()))
    if scale == 0.0:
        return np.diagonal(a).copy(), v, 0
    tol = JACOBI_REL_TOL * scale
    prev_off = math.inf
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS:
        off = _off_diag_norm(a)
        if off <= tol or off >= prev_off:
            break
        prev_off = off
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return np.diagonal(a).copy(), v, sweeps


def xoshiro_fill_uniform(state: np.ndarray, out: np.ndarray) -> None:
    """Fill out with uniform [0,1) doubles, advancing the xoshiro256** state."""
    s0, s1, s2, s3 = (int(w) for w in state)
    for i in range(out.shape[0]):
        r = (s1 * 5) & _MASK64
        result = ((((r << 7) | (r >> 57)) & _MASK64) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        out[i] = (result >> 11) * _INV_2_53
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3


def nearest_ref_indices(ref_t: np.ndarray, query_t: np.ndarray, exclude_self: bool) -> np.ndarray:
    """Index of the squared-Euclidean nearest reference row for each query row.

    Ties resolve to the lowest reference index.  With exclude_self, query i
    skips reference i (leave-one-out on an identical set).
    """
    m = query_t.shape[0]
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        dists = ((ref_t - query_t[i]) ** 2).sum(axis=1)
        if exclude_self:
            dists[i] = np.inf
        out[i] = int(np.argmin(dists))
    return out
