"""Feedforward Siamese backbone with manual backpropagation.

The network is a stack of affine+ReLU layers ending in a q-dimensional
latent embedding ``o``, followed by a bias-free linear projection
``f(x) = U^T o`` into the p-dimensional feature space.  All Siamese
branches share one NetworkParams object by construction; batches for the
branches are concatenated column-wise and split after the forward pass.

Checkpoints use a flat binary container: the magic string ``FDLNET1``,
little-endian uint32 header (layer count, per-layer dims and activation
tags, projection dims), then all parameters as little-endian float64 in
declaration order.  Round-trips are bit-exact.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rng import Xoshiro256

CHECKPOINT_MAGIC = b"FDLNET1"
_ACT_TAGS = {"linear": 0, "relu": 1}
_TAG_ACTS = {v: k for k, v in _ACT_TAGS.items()}


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray    # (out,)
    activation: str     # "relu" or "linear"

    def __post_init__(self):
        if self.activation not in _ACT_TAGS:
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class NetworkParams:
    layers: tuple[Layer, ...]
    projection_u: np.ndarray  # (q, p), bias-free, linear

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        for i in range(1, len(self.layers)):
            prev_out = self.layers[i - 1].weight.shape[0]
            cur_in = self.layers[i].weight.shape[1]
            if prev_out != cur_in:
                raise ValueError(
                    f"layer {i} expects input dim {cur_in} but layer {i - 1} outputs {prev_out}"
                )
        q = self.layers[-1].weight.shape[0]
        if self.projection_u.shape[0] != q:
            raise ValueError(
                f"projection rows {self.projection_u.shape[0]} must equal latent dim {q}"
            )

    @property
    def input_dim(self) -> int:
        return self.layers[0].weight.shape[1]

    @property
    def latent_dim(self) -> int:
        return self.layers[-1].weight.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.projection_u.shape[1]


@dataclass(frozen=True)
class ForwardTrace:
    inputs: np.ndarray
    pre_activations: tuple[np.ndarray, ...]
    activations: tuple[np.ndarray, ...]
    latent: np.ndarray    # (q, b)
    features: np.ndarray  # (p, b) = U^T latent, exactly


@dataclass(frozen=True)
class LayerGrads:
    weight: np.ndarray
    bias: np.ndarray


@dataclass(frozen=True)
class ParamGrads:
    layers: tuple[LayerGrads, ...]
    projection_u: np.ndarray
    inputs: np.ndarray | None = None  # gradient w.r.t. the forward's input batch


def forward(params: NetworkParams, inputs) -> ForwardTrace:
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != params.input_dim:
        raise ValueError(
            f"inputs must be ({params.input_dim}, b), got {x.shape}"
        )
    pre_acts = []
    acts = []
    a = x
    for layer in params.layers:
        z = layer.weight @ a + layer.bias[:, None]
        a = np.maximum(z, 0.0) if layer.activation == "relu" else z
        pre_acts.append(z)
        acts.append(a)
    latent = acts[-1]
    return ForwardTrace(
        inputs=x,
        pre_activations=tuple(pre_acts),
        activations=tuple(acts),
        latent=latent,
        features=params.projection_u.T @ latent,
    )


def backward(
    params: NetworkParams,
    trace: ForwardTrace,
    grad_latent: np.ndarray | None = None,
    grad_u_direct: np.ndarray | None = None,
    grad_features: np.ndarray | None = None,
) -> ParamGrads:
    """Backpropagate loss gradients to every parameter.

    grad_latent and grad_features are gradients w.r.t. the latent/feature
    columns of this trace; grad_u_direct is a loss gradient taken directly
    w.r.t. U (the FDT/FDC path).  The returned projection gradient sums the
    direct term with the path through the features.
    """
    b = trace.latent.shape[1]
    g = np.zeros_like(trace.latent)
    if grad_latent is not None:
        if grad_latent.shape != trace.latent.shape:
            raise ValueError(
                f"grad_latent shape {grad_latent.shape} does not match latent {trace.latent.shape}"
            )
        g = g + grad_latent
    grad_u = np.zeros_like(params.projection_u)
    if grad_u_direct is not None:
        if grad_u_direct.shape != params.projection_u.shape:
            raise ValueError(
                f"grad_u_direct shape {grad_u_direct.shape} does not match "
                f"projection {params.projection_u.shape}"
            )
        grad_u = grad_u + grad_u_direct
    if grad_features is not None:
        if grad_features.shape != trace.features.shape:
            raise ValueError(
                f"grad_features shape {grad_features.shape} does not match "
                f"features {trace.features.shape}"
            )
        g = g + params.projection_u @ grad_features
        grad_u = grad_u + trace.latent @ grad_features.T

    layer_grads: list[LayerGrads] = []
    for i in reversed(range(len(params.layers))):
        layer = params.layers[i]
        if layer.activation == "relu":
            g = g * (trace.pre_activations[i] > 0.0)
        prev = trace.activations[i - 1] if i > 0 else trace.inputs
        if prev.shape[1] != b:
            raise ValueError("stale trace: batch size mismatch")
        layer_grads.append(LayerGrads(weight=g @ prev.T, bias=g.sum(axis=1)))
        g = layer.weight.T @ g
    return ParamGrads(layers=tuple(reversed(layer_grads)), projection_u=grad_u, inputs=g)


def sgd_step(params: NetworkParams, grads: ParamGrads, learning_rate: float) -> NetworkParams:
    """params - lr * grads, elementwise, as a new NetworkParams."""
    if len(grads.layers) != len(params.layers):
        raise ValueError("gradient/parameter layer count mismatch")
    new_layers = []
    for layer, lg in zip(params.layers, grads.layers):
        if lg.weight.shape != layer.weight.shape or lg.bias.shape != layer.bias.shape:
            raise ValueError("gradient/parameter shape mismatch")
        new_layers.append(
            Layer(
                weight=layer.weight - learning_rate * lg.weight,
                bias=layer.bias - learning_rate * lg.bias,
                activation=layer.activation,
            )
        )
    if grads.projection_u.shape != params.projection_u.shape:
        raise ValueError("gradient/parameter shape mismatch for projection")
    return NetworkParams(
        layers=tuple(new_layers),
        projection_u=params.projection_u - learning_rate * grads.projection_u,
    )


def init_params(layer_sizes: Sequence[int], p: int, seed: int) -> NetworkParams:
    """He-uniform ReLU layers over the size chain, Xavier-uniform projection.

    layer_sizes runs (d, hidden..., q); biases start at zero.  Deterministic
    for a fixed seed.
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError(f"layer_sizes needs at least input and output dims, got {sizes}")
    if min(sizes) < 1 or p < 1:
        raise ValueError(f"all dimensions must be >= 1, got sizes {sizes}, p {p}")
    rng = Xoshiro256(seed)

    def uniform(rows: int, cols: int, bound: float) -> np.ndarray:
        flat = rng.fill_uniform(rows * cols)
        return (2.0 * bound * flat - bound).reshape(rows, cols)

    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        layers.append(
            Layer(
                weight=uniform(fan_out, fan_in, bound),
                bias=np.zeros(fan_out),
                activation="relu",
            )
        )
    q = sizes[-1]
    proj_bound = np.sqrt(6.0 / (q + p))
    return NetworkParams(layers=tuple(layers), projection_u=uniform(q, p, proj_bound))


def save_checkpoint(params: NetworkParams, path: str) -> None:
    parts = [CHECKPOINT_MAGIC, struct.pack("<I", len(params.layers))]
    for layer in params.layers:
        out_dim, in_dim = layer.weight.shape
        parts.append(struct.pack("<III", in_dim, out_dim, _ACT_TAGS[layer.activation]))
    q, p = params.projection_u.shape
    parts.append(struct.pack("<II", q, p))
    for layer in params.layers:
        parts.append(layer.weight.astype("<f8").tobytes())
        parts.append(layer.bias.astype("<f8").tobytes())
    parts.append(params.projection_u.astype("<f8").tobytes())
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "wb") as f:
        f.write(b"".join(parts))


def load_checkpoint(path: str) -> NetworkParams:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as f:
        blob = f.read()
    if blob[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise ValueError(f"bad checkpoint magic in {path}")
    offset = len(CHECKPOINT_MAGIC)

    def read_u32(count: int) -> tuple[int, ...]:
        nonlocal offset
        end = offset + 4 * count
        if end > len(blob):
            raise ValueError(f"truncated checkpoint header in {path}")
        vals = struct.unpack(f"<{count}I", blob[offset:end])
        offset = end
        return vals

    (layer_count,) = read_u32(1)
    dims = [read_u32(3) for _ in range(layer_count)]
    q, p = read_u32(2)

    def read_floats(count: int) -> np.ndarray:
        nonlocal offset
        end = offset + 8 * count
        if end > len(blob):
            raise ValueError(f"truncated checkpoint payload in {path}")
        arr = np.frombuffer(blob[offset:end], dtype="<f8").astype(np.float64)
        offset = end
        return arr

    layers = []
    for in_dim, out_dim, act_tag in dims:
        if act_tag not in _TAG_ACTS:
            raise ValueError(f"unknown activation tag {act_tag} in {path}")
        weight = read_floats(in_dim * out_dim).reshape(out_dim, in_dim)
        bias = read_floats(out_dim)
        layers.append(Layer(weight=weight, bias=bias, activation=_TAG_ACTS[act_tag]))
    projection = read_floats(q * p).reshape(q, p)
    if offset != len(blob):
        raise ValueError(f"trailing bytes in checkpoint {path}")
    return NetworkParams(layers=tuple(layers), projection_u=projection)
