"""The four metric-learning losses with analytical gradients.

Two families:

- classical triplet and contrastive losses on feature-space columns
  ``f = U^T o`` (dimension p), with per-item hinges;
- their Fisher-discriminant counterparts (FDT, FDC) on latent-space columns
  ``o`` (dimension q) together with the projection matrix U, where the
  squared distances are replaced by traces of projected batch scatters:

      fdt = [(2 - lam) tr(U^T S_W U) - lam tr(U^T S_B U) + alpha]_+
      fdc = (2 - lam) tr(U^T S~_W U) + [-lam tr(U^T S~_B U) + alpha]_+

  with lam = 1 - eps in (0, 1) weighing the total-scatter penalty that
  keeps the embedding from inflating, and mu-strengthened scatters from
  the scatter module.  FDT carries a single batch-level hinge; FDC's pull
  term is always active and only the push term sits under the hinge.

Every output bundles the loss value with gradients for each input block;
a hinge argument of exactly zero counts as inactive (zero subgradient).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, trace_quadratic
from .scatter import (
    DEFAULT_MU,
    EmbeddedPairBatch,
    EmbeddedTripletBatch,
    pair_scatters,
    total_scatter,
    triplet_scatters,
)

DEFAULT_ALPHA = 0.25
DEFAULT_LAMBDA = 0.1


@dataclass(frozen=True)
class LossConfig:
    alpha: float = DEFAULT_ALPHA
    lam: float = DEFAULT_LAMBDA
    mu_w: float = DEFAULT_MU
    mu_b: float = DEFAULT_MU

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if self.mu_w < 0 or self.mu_b < 0:
            raise ValueError(f"mu_w and mu_b must be >= 0, got {self.mu_w}, {self.mu_b}")


@dataclass(frozen=True)
class LossOutput:
    """Loss value plus gradients for whichever inputs the loss consumed.

    ``active`` reports whether any hinge is engaged; ``active_fraction`` is
    the per-item fraction for the per-item hinges (triplet, contrastive)
    and 0/1 for the single-hinge losses (FDT, FDC).  Unused gradient slots
    stay None.
    """

    value: float
    active: bool
    active_fraction: float
    grad_u: np.ndarray | None = None
    grad_a: np.ndarray | None = None
    grad_n: np.ndarray | None = None
    grad_d: np.ndarray | None = None
    grad_1: np.ndarray | None = None
    grad_2: np.ndarray | None = None


def _check_equal_shapes(**named) -> None:
    shapes = {name: arr.shape for name, arr in named.items()}
    if len(set(shapes.values())) != 1:
        raise ValueError(f"shape mismatch between inputs: {shapes}")


def triplet_loss(features_a, features_n, features_d, alpha: float = DEFAULT_ALPHA) -> LossOutput:
    """Sum of per-triplet hinges on squared feature distances."""
    f_a = as_matrix(features_a, "features_a")
    f_n = as_matrix(features_n, "features_n")
    f_d = as_matrix(features_d, "features_d")
    _check_equal_shapes(features_a=f_a, features_n=f_n, features_d=f_d)
    d_n = f_a - f_n
    d_d = f_a - f_d
    hinge_args = (d_n * d_n).sum(axis=0) - (d_d * d_d).sum(axis=0) + alpha
    active = hinge_args > 0.0
    value = float(hinge_args[active].sum()) if active.any() else 0.0
    mask = active.astype(np.float64)
    grad_n = -2.0 * d_n * mask
    grad_d = 2.0 * d_d * mask
    grad_a = -grad_n - grad_d
    return LossOutput(
        value=value,
        active=bool(active.any()),
        active_fraction=float(active.mean()),
        grad_a=grad_a,
        grad_n=grad_n,
        grad_d=grad_d,
    )


def contrastive_loss(features_1, features_2, y, alpha: float = DEFAULT_ALPHA) -> LossOutput:
    """Pull on similar pairs, hinged push on dissimilar pairs."""
    f_1 = as_matrix(features_1, "features_1")
    f_2 = as_matrix(features_2, "features_2")
    _check_equal_shapes(features_1=f_1, features_2=f_2)
    y = np.asarray(y, dtype=np.int64).ravel()
    if y.shape[0] != f_1.shape[1]:
        raise ValueError(f"y length {y.shape[0]} does not match batch size {f_1.shape[1]}")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("y entries must be 0 or 1")
    diff = f_1 - f_2
    sq = (diff * diff).sum(axis=0)
    push_args = alpha - sq
    push_active = (y == 1) & (push_args > 0.0)
    similar = y == 0
    value = float(sq[similar].sum() + push_args[push_active].sum())
    coeff = 2.0 * similar.astype(np.float64) - 2.0 * push_active.astype(np.float64)
    grad_1 = diff * coeff
    n_push = int((y == 1).sum())
    return LossOutput(
        value=value,
        active=bool(push_active.any()),
        active_fraction=float(push_active.sum() / n_push) if n_push else 0.0,
        grad_1=grad_1,
        grad_2=-grad_1,
    )


def _check_projection(u, q: int) -> np.ndarray:
    u = as_matrix(u, "u")
    if u.shape[0] != q:
        raise ValueError(f"projection u has {u.shape[0]} rows but the latent dimension is {q}")
    return u


def fdt_loss(batch: EmbeddedTripletBatch, u, cfg: LossConfig) -> LossOutput:
    """Fisher-discriminant triplet loss with one hinge over the batch scatters.

    Gradients cover U and all three latent blocks; when the hinge is
    inactive the value and every gradient are exactly zero.
    """
    u = _check_projection(u, batch.o_a.shape[0])
    sp = triplet_scatters(batch, cfg.mu_w, cfg.mu_b)
    pull = trace_quadratic(u, sp.s_w)
    push = trace_quadratic(u, sp.s_b)
    inner = (2.0 - cfg.lam) * pull - cfg.lam * push + cfg.alpha
    if inner <= 0.0:
        zeros_o = np.zeros_like(batch.o_a)
        return LossOutput(
            value=0.0,
            active=False,
            active_fraction=0.0,
            grad_u=np.zeros_like(u),
            grad_a=zeros_o,
            grad_n=zeros_o.copy(),
            grad_d=zeros_o.copy(),
        )
    grad_u = 2.0 * (2.0 - cfg.lam) * (sp.s_w @ u) - 2.0 * cfg.lam * (sp.s_b @ u)
    # d tr(U^T O O^T U) / dO = 2 U U^T O, chained into the difference columns
    proj_w = 2.0 * (u @ (u.T @ (batch.o_a - batch.o_n)))
    proj_b = 2.0 * (u @ (u.T @ (batch.o_a - batch.o_d)))
    grad_n = -(2.0 - cfg.lam) * proj_w
    grad_d = cfg.lam * proj_b
    grad_a = -grad_n - grad_d
    return LossOutput(
        value=inner,
        active=True,
        active_fraction=1.0,
        grad_u=grad_u,
        grad_a=grad_a,
        grad_n=grad_n,
        grad_d=grad_d,
    )


def fdt_loss_epsilon_form(batch: EmbeddedTripletBatch, u, epsilon: float, cfg: LossConfig) -> float:
    """Un-hinged total-scatter-penalty form of the FDT objective.

    tr(U^T S_W U) - tr(U^T S_B U) + eps * tr(U^T S_T U); algebraically equal
    to the lam-form inner expression (minus alpha) at lam = 1 - eps.  Kept
    for verifying that identity.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    u = _check_projection(u, batch.o_a.shape[0])
    sp = triplet_scatters(batch, cfg.mu_w, cfg.mu_b)
    s_t = total_scatter(sp)
    return (
        trace_quadratic(u, sp.s_w)
        - trace_quadratic(u, sp.s_b)
        + epsilon * trace_quadratic(u, s_t)
    )


def fdc_loss(batch: EmbeddedPairBatch, u, cfg: LossConfig) -> LossOutput:
    """Fisher-discriminant contrastive loss.

    The pull term (2 - lam) tr(U^T S~_W U) is unconditional; only the push
    term -lam tr(U^T S~_B U) + alpha sits under the hinge.
    """
    u = _check_projection(u, batch.o_1.shape[0])
    sp = pair_scatters(batch, cfg.mu_w, cfg.mu_b)
    pull = (2.0 - cfg.lam) * trace_quadratic(u, sp.s_w)
    push_arg = -cfg.lam * trace_quadratic(u, sp.s_b) + cfg.alpha
    active = push_arg > 0.0
    value = pull + (push_arg if active else 0.0)
    grad_u = 2.0 * (2.0 - cfg.lam) * (sp.s_w @ u)
    if active:
        grad_u = grad_u - 2.0 * cfg.lam * (sp.s_b @ u)
    diffs = batch.o_1 - batch.o_2
    proj = 2.0 * (u @ (u.T @ diffs))
    pull_mask = (batch.y == 0).astype(np.float64)
    push_mask = (batch.y == 1).astype(np.float64) if active else 0.0
    grad_1 = (2.0 - cfg.lam) * proj * pull_mask - cfg.lam * proj * push_mask
    return LossOutput(
        value=value,
        active=bool(active),
        active_fraction=1.0 if active else 0.0,
        grad_u=grad_u,
        grad_1=grad_1,
        grad_2=-grad_1,
    )
