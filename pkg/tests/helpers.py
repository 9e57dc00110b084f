"""Shared test utilities: finite-difference oracles and loss composition."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from fdsiam.backbone import NetworkParams, backward, forward, init_params
from fdsiam.linalg import trace_quadratic
from fdsiam.losses import LossConfig, contrastive_loss, fdc_loss, fdt_loss, triplet_loss
from fdsiam.scatter import (
    EmbeddedPairBatch,
    EmbeddedTripletBatch,
    pair_scatters,
    triplet_scatters,
)

FD_STEP = 1e-5
KINK_MARGIN = 1e-3


def numeric_grad(fn, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central finite differences of a scalar function at x."""
    grad = np.zeros_like(x, dtype=np.float64)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        plus = x.copy()
        plus[idx] += h
        minus = x.copy()
        minus[idx] -= h
        grad[idx] = (fn(plus) - fn(minus)) / (2.0 * h)
    return grad


def max_rel_err(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float((np.abs(analytic - numeric) / denom).max())


def loss_from_trace(loss_name: str, params: NetworkParams, trace, cfg: LossConfig, y=None):
    """Apply a named loss to a forward trace of concatenated branch columns."""
    if loss_name == "fdt":
        o_a, o_n, o_d = np.split(trace.latent, 3, axis=1)
        return fdt_loss(EmbeddedTripletBatch(o_a, o_n, o_d), params.projection_u, cfg)
    if loss_name == "triplet":
        f_a, f_n, f_d = np.split(trace.features, 3, axis=1)
        return triplet_loss(f_a, f_n, f_d, cfg.alpha)
    if loss_name == "fdc":
        o_1, o_2 = np.split(trace.latent, 2, axis=1)
        return fdc_loss(EmbeddedPairBatch(o_1, o_2, y), params.projection_u, cfg)
    if loss_name == "contrastive":
        f_1, f_2 = np.split(trace.features, 2, axis=1)
        return contrastive_loss(f_1, f_2, y, cfg.alpha)
    raise ValueError(loss_name)


def composed_scalar(loss_name: str, params: NetworkParams, inputs, cfg: LossConfig, y=None):
    return loss_from_trace(loss_name, params, forward(params, inputs), cfg, y=y).value


def composed_grads(loss_name: str, params: NetworkParams, inputs, cfg: LossConfig, y=None):
    """Analytic end-to-end gradients of a composed loss."""
    trace = forward(params, inputs)
    out = loss_from_trace(loss_name, params, trace, cfg, y=y)
    if loss_name == "fdt":
        return backward(
            params,
            trace,
            grad_latent=np.concatenate([out.grad_a, out.grad_n, out.grad_d], axis=1),
            grad_u_direct=out.grad_u,
        )
    if loss_name == "triplet":
        return backward(
            params,
            trace,
            grad_features=np.concatenate([out.grad_a, out.grad_n, out.grad_d], axis=1),
        )
    if loss_name == "fdc":
        return backward(
            params,
            trace,
            grad_latent=np.concatenate([out.grad_1, out.grad_2], axis=1),
            grad_u_direct=out.grad_u,
        )
    return backward(
        params,
        trace,
        grad_features=np.concatenate([out.grad_1, out.grad_2], axis=1),
    )


def hinge_args_of(loss_name: str, params: NetworkParams, inputs, cfg: LossConfig, y=None):
    """All hinge arguments of the composed loss, for kink avoidance."""
    trace = forward(params, inputs)
    u = params.projection_u
    if loss_name == "fdt":
        o_a, o_n, o_d = np.split(trace.latent, 3, axis=1)
        sp = triplet_scatters(EmbeddedTripletBatch(o_a, o_n, o_d), cfg.mu_w, cfg.mu_b)
        inner = (
            (2.0 - cfg.lam) * trace_quadratic(u, sp.s_w)
            - cfg.lam * trace_quadratic(u, sp.s_b)
            + cfg.alpha
        )
        return np.array([inner])
    if loss_name == "triplet":
        f_a, f_n, f_d = np.split(trace.features, 3, axis=1)
        d_n = f_a - f_n
        d_d = f_a - f_d
        return (d_n * d_n).sum(axis=0) - (d_d * d_d).sum(axis=0) + cfg.alpha
    if loss_name == "fdc":
        o_1, o_2 = np.split(trace.latent, 2, axis=1)
        sp = pair_scatters(EmbeddedPairBatch(o_1, o_2, y), cfg.mu_w, cfg.mu_b)
        return np.array([-cfg.lam * trace_quadratic(u, sp.s_b) + cfg.alpha])
    f_1, f_2 = np.split(trace.features, 2, axis=1)
    diff = f_1 - f_2
    return cfg.alpha - (diff * diff).sum(axis=0)


def sample_non_kink_config(
    loss_name: str,
    rng: np.random.Generator,
    d: int = 6,
    hidden: int = 5,
    q: int = 5,
    p: int = 3,
    b: int = 4,
    input_scale: float = 1.0,
):
    """Random (params, inputs, cfg, y) away from ReLU and hinge kinks."""
    branches = 2 if loss_name in ("fdc", "contrastive") else 3
    y = np.array([i % 2 for i in range(b)]) if branches == 2 else None
    for _ in range(200):
        params = init_params((d, hidden, q), p, seed=int(rng.integers(1, 2**31)))
        inputs = input_scale * rng.standard_normal((d, branches * b))
        cfg = LossConfig(
            alpha=float(rng.uniform(0.05, 0.5)),
            lam=float(rng.uniform(0.05, 0.9)),
            mu_w=1e-4,
            mu_b=1e-4,
        )
        trace = forward(params, inputs)
        min_preact = min(float(np.abs(z).min()) for z in trace.pre_activations)
        hinges = hinge_args_of(loss_name, params, inputs, cfg, y=y)
        if min_preact > KINK_MARGIN and float(np.abs(hinges).min()) > KINK_MARGIN:
            return params, inputs, cfg, y
    raise RuntimeError(f"could not sample a non-kink configuration for {loss_name}")


def check_composed_gradients(loss_name, params, inputs, cfg, y=None, h: float = FD_STEP) -> float:
    """Worst relative error between analytic and FD gradients, all blocks."""
    grads = composed_grads(loss_name, params, inputs, cfg, y=y)
    worst = 0.0

    def scalar_at_layer(i, field, arr):
        layers = list(params.layers)
        layers[i] = replace(layers[i], **{field: arr})
        return composed_scalar(loss_name, replace(params, layers=tuple(layers)), inputs, cfg, y=y)

    for i, lg in enumerate(grads.layers):
        for field in ("weight", "bias"):
            base = getattr(params.layers[i], field)
            num = numeric_grad(lambda a, i=i, f=field: scalar_at_layer(i, f, a), base, h=h)
            worst = max(worst, max_rel_err(getattr(lg, field), num))
    num_u = numeric_grad(
        lambda u: composed_scalar(loss_name, replace(params, projection_u=u), inputs, cfg, y=y),
        params.projection_u,
        h=h,
    )
    worst = max(worst, max_rel_err(grads.projection_u, num_u))
    num_x = numeric_grad(
        lambda x: composed_scalar(loss_name, params, x, cfg, y=y), inputs, h=h
    )
    worst = max(worst, max_rel_err(grads.inputs, num_x))
    return worst
