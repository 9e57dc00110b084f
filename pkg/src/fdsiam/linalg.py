"""Dense linear algebra used by the rest of the package.

Matrices are plain 2-D float64 numpy arrays (row-major).  Products go
through numpy; the factorizations and eigensolvers are implemented here
(via the kernel lanes) so their pivoting, rotation order, and tie-breaking
are fully pinned down:

- ``cholesky``: lower-triangular factorization with a named failing pivot.
- ``sym_eig``: cyclic Jacobi rotations, eigenvalues sorted descending with
  a stable sort so ties keep the rotation output order.
- ``generalized_eig``: symmetric-definite pencil solved by Cholesky
  reduction and back-substitution.
"""

from __future__ import annotations

import numpy as np

from ._kernels import cholesky_lower, jacobi_eigh

ASYMMETRY_TOL = 1e-10


class NotPositiveDefiniteError(ValueError):
    """Raised when a factorization requires positive definiteness and fails."""


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got {a.shape}")
    return a


def _symmetrized(s: np.ndarray, name: str) -> np.ndarray:
    """Validate near-symmetry and absorb floating-point drift.

    The tolerance is relative to the matrix magnitude so products like
    O O^T at large scale do not trip it.
    """
    s = as_matrix(s, name)
    if s.shape[0] != s.shape[1]:
        raise ValueError(f"{name} must be square, got {s.shape}")
    bound = ASYMMETRY_TOL * max(1.0, float(np.abs(s).max()))
    asym = float(np.abs(s - s.T).max())
    if asym > bound:
        raise ValueError(
            f"{name} is not symmetric: max |S - S^T| = {asym:.3e} exceeds {bound:.3e}"
        )
    return (s + s.T) / 2.0


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def trace_quadratic(u, s) -> float:
    """tr(U^T S U) without forming the p-by-p product."""
    u = as_matrix(u, "u")
    s = as_matrix(s, "s")
    if s.shape[0] != s.shape[1]:
        raise ValueError(f"s must be square, got {s.shape}")
    if s.shape[0] != u.shape[0]:
        raise ValueError(f"dimension mismatch: s is {s.shape}, u is {u.shape}")
    return float(((s @ u) * u).sum())


def cholesky(s) -> np.ndarray:
    """Lower-triangular L with L L^T = s for symmetric positive definite s."""
    s = _symmetrized(s, "s")
    low, pivot = cholesky_lower(np.ascontiguousarray(s))
    if pivot >= 0:
        raise NotPositiveDefiniteError(
            f"input is not positive definite: non-positive pivot at index {pivot}"
        )
    return np.asarray(low)


def sym_eig(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending
    and eigenvectors as the matching orthonormal columns.
    """
    s = _symmetrized(s, "s")
    values, vectors, _ = jacobi_eigh(np.ascontiguousarray(s))
    values = np.asarray(values)
    vectors = np.asarray(vectors)
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def _solve_lower(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution: solve low @ X = b for lower-triangular low."""
    n = low.shape[0]
    x = np.empty_like(b)
    for i in range(n):
        x[i] = (b[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def _solve_lower_t(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution: solve low^T @ X = b."""
    n = low.shape[0]
    x = np.empty_like(b)
    for i in reversed(range(n)):
        x[i] = (b[i] - low[i + 1:, i] @ x[i + 1:]) / low[i, i]
    return x


def generalized_eig(s_b, s_w) -> tuple[np.ndarray, np.ndarray]:
    """Solve S_B u = lambda S_W u for a symmetric pencil with S_W PD.

    Reduction: S_W = L L^T, eigendecompose C = L^-1 S_B L^-T, then map the
    eigenvectors back through L^-T.  Returned eigenvalues are descending and
    the eigenvector columns satisfy U^T S_W U = I.
    """
    s_b = _symmetrized(s_b, "s_b")
    s_w = _symmetrized(s_w, "s_w")
    if s_b.shape != s_w.shape:
        raise ValueError(f"pencil shape mismatch: {s_b.shape} vs {s_w.shape}")
    try:
        low = cholesky(s_w)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(
            f"s_w is not positive definite ({exc}); increase the diagonal "
            f"strengthening mu_w"
        ) from exc
    half = _solve_lower(low, s_b)          # L^-1 S_B
    reduced = _solve_lower(low, half.T)    # L^-1 S_B L^-T (symmetric up to roundoff)
    reduced = (reduced + reduced.T) / 2.0
    values, vectors = sym_eig(reduced)
    return values, _solve_lower_t(low, vectors)
