"""Network container, standard architectures, and forward/backward passes.

Three front-ends share the same machinery:

* landmark: 42-float feature vector -> dense 64 -> 64 -> 6
* raster:   32x32x1 grayscale -> 4x (conv3x3 + pool), widths [8,16,32,32],
            -> dense 64 -> 6
* full:     224x224x3, the same 4-conv/2-dense family at camera resolution
            (constructed for smoke testing, not trained at desk scale)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import layers

N_CLASSES = 6


@dataclass
class ConvLayer:
    kernels: np.ndarray  # (kh, kw, c_in, c_out)
    bias: np.ndarray  # (c_out,)


@dataclass
class DenseLayer:
    weights: np.ndarray  # (d_in, d_out)
    bias: np.ndarray  # (d_out,)


@dataclass
class NetworkParams:
    input_shape: tuple[int, ...]  # (H, W, C) or (D,)
    conv_layers: list[ConvLayer] = field(default_factory=list)
    dense_layers: list[DenseLayer] = field(default_factory=list)
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        if not self.dense_layers:
            raise ValueError("at least one dense layer required")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate outside [0,1): {self.dropout_rate}")
        if self.conv_layers and len(self.input_shape) != 3:
            raise ValueError("conv layers require an (H, W, C) input shape")
        c = self.input_shape[-1] if len(self.input_shape) == 3 else None
        for i, layer in enumerate(self.conv_layers):
            if layer.kernels.shape[2] != c:
                raise ValueError(
                    f"conv layer {i} expects {layer.kernels.shape[2]} channels, gets {c}"
                )
            c = layer.kernels.shape[3]
            if layer.bias.shape != (c,):
                raise ValueError(f"conv layer {i} bias shape {layer.bias.shape}")
        for i in range(1, len(self.dense_layers)):
            prev_out = self.dense_layers[i - 1].weights.shape[1]
            if self.dense_layers[i].weights.shape[0] != prev_out:
                raise ValueError(f"dense layers {i - 1}->{i} widths do not chain")
        if self.dense_layers[-1].weights.shape[1] != N_CLASSES:
            raise ValueError(f"output width must be {N_CLASSES}")

    def tensors(self) -> list[np.ndarray]:
        """All parameter tensors in declaration order."""
        out: list[np.ndarray] = []
        for layer in self.conv_layers:
            out += [layer.kernels, layer.bias]
        for layer in self.dense_layers:
            out += [layer.weights, layer.bias]
        return out

    def clone(self) -> "NetworkParams":
        return NetworkParams(
            input_shape=self.input_shape,
            conv_layers=[ConvLayer(l.kernels.copy(), l.bias.copy()) for l in self.conv_layers],
            dense_layers=[DenseLayer(l.weights.copy(), l.bias.copy()) for l in self.dense_layers],
            dropout_rate=self.dropout_rate,
        )

    def zeros_like(self) -> "NetworkParams":
        return NetworkParams(
            input_shape=self.input_shape,
            conv_layers=[
                ConvLayer(np.zeros_like(l.kernels), np.zeros_like(l.bias))
                for l in self.conv_layers
            ],
            dense_layers=[
                DenseLayer(np.zeros_like(l.weights), np.zeros_like(l.bias))
                for l in self.dense_layers
            ],
            dropout_rate=self.dropout_rate,
        )


@dataclass(frozen=True)
class Prediction:
    probs: np.ndarray  # (6,)
    argmax_class: int
    confidence: float


def _he_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def _build(
    input_shape: tuple[int, ...],
    conv_widths: list[int],
    dense_widths: list[int],
    dropout_rate: float,
    rng: np.random.Generator,
    kernel: int = 3,
) -> NetworkParams:
    conv_layers = []
    if conv_widths:
        h, w, c = input_shape
        for width in conv_widths:
            fan_in = kernel * kernel * c
            conv_layers.append(
                ConvLayer(
                    kernels=_he_uniform(rng, (kernel, kernel, c, width), fan_in),
                    bias=np.zeros(width),
                )
            )
            h, w = h - kernel + 1, w - kernel + 1
            h, w = (h + h % 2) // 2, (w + w % 2) // 2
            c = width
        flat = h * w * c
    else:
        (flat,) = input_shape
    dense_layers = []
    d_in = flat
    for width in dense_widths + [N_CLASSES]:
        dense_layers.append(
            DenseLayer(weights=_he_uniform(rng, (d_in, width), d_in), bias=np.zeros(width))
        )
        d_in = width
    return NetworkParams(
        input_shape=input_shape,
        conv_layers=conv_layers,
        dense_layers=dense_layers,
        dropout_rate=dropout_rate,
    )


def landmark_network(seed: int, dropout_rate: float = 0.4) -> NetworkParams:
    rng = np.random.default_rng(seed)
    return _build((42,), [], [64, 64], dropout_rate, rng)


def raster_network(seed: int, side: int = 32, dropout_rate: float = 0.4) -> NetworkParams:
    rng = np.random.default_rng(seed)
    return _build((side, side, 1), [8, 16, 32, 32], [64], dropout_rate, rng)


def full_resolution_network(seed: int, dropout_rate: float = 0.4) -> NetworkParams:
    rng = np.random.default_rng(seed)
    return _build((224, 224, 3), [8, 16, 32, 32], [64], dropout_rate, rng)


def tiny_test_network(seed: int) -> NetworkParams:
    """8x8x1 input, 2 conv + 2 dense: small enough for exhaustive
    finite-difference gradient verification."""
    rng = np.random.default_rng(seed)
    return _build((8, 8, 1), [2, 3], [8], 0.0, rng)


def forward_batch(
    params: NetworkParams,
    x: np.ndarray,
    train: bool = False,
    rng: np.random.Generator | None = None,
):
    """Probabilities (N, 6) plus the cache backward_batch consumes.

    Dropout is applied to hidden dense activations only in train mode and
    needs the caller's rng stream.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == len(params.input_shape):
        x = x[None, ...]
    if x.shape[1:] != params.input_shape:
        raise ValueError(f"input shape {x.shape[1:]} != expected {params.input_shape}")
    if train and params.dropout_rate > 0.0 and rng is None:
        raise ValueError("train-mode forward with dropout needs an rng")
    conv_caches = []
    for layer in params.conv_layers:
        x, ccache = layers.conv_forward(x, layer.kernels, layer.bias)
        x, pcache = layers.max_pool(x)
        conv_caches.append((ccache, pcache))
    flat_shape = x.shape
    x = x.reshape(x.shape[0], -1)
    dense_caches = []
    drop_keeps = []
    n_dense = len(params.dense_layers)
    for i, layer in enumerate(params.dense_layers):
        hidden = i < n_dense - 1
        x, dcache = layers.dense_forward(x, layer.weights, layer.bias, relu=hidden)
        dense_caches.append(dcache)
        if hidden and train:
            x, keep = layers.dropout_forward(x, params.dropout_rate, rng)
            drop_keeps.append(keep)
        elif hidden:
            drop_keeps.append(None)
    probs = layers.softmax(x)
    if not np.all(np.isfinite(probs)):
        raise FloatingPointError("non-finite activations in forward pass")
    cache = (conv_caches, flat_shape, dense_caches, drop_keeps, probs)
    return probs, cache


def predict(params: NetworkParams, x: np.ndarray) -> Prediction:
    """Single-sample inference-mode prediction."""
    probs, _ = forward_batch(params, x, train=False)
    p = probs[0]
    cls = int(p.argmax())
    return Prediction(probs=p, argmax_class=cls, confidence=float(p[cls]))


def backward_batch(params: NetworkParams, cache, labels: np.ndarray) -> NetworkParams:
    """Exact gradients of mean cross-entropy w.r.t. every parameter.

    Cross-entropy is -log(p_label + eps); the eps guard contributes the
    p/(p+eps) factor so gradients stay exact for the loss actually used.
    """
    from .training import CE_EPS

    conv_caches, flat_shape, dense_caches, drop_keeps, probs = cache
    n = probs.shape[0]
    labels = np.asarray(labels)
    p_true = probs[np.arange(n), labels]
    scale = p_true / (p_true + CE_EPS)
    dz = probs.copy()
    dz[np.arange(n), labels] -= 1.0
    dz *= (scale / n)[:, None]

    grads = params.zeros_like()
    d = dz
    for i in range(len(params.dense_layers) - 1, -1, -1):
        hidden = i < len(params.dense_layers) - 1
        if hidden:
            d = layers.dropout_backward(d, drop_keeps[i])
        d, dw, db = layers.dense_backward(d, dense_caches[i])
        grads.dense_layers[i].weights[...] = dw
        grads.dense_layers[i].bias[...] = db
    d = d.reshape(flat_shape)
    for i in range(len(params.conv_layers) - 1, -1, -1):
        ccache, pcache = conv_caches[i]
        d = layers.max_pool_backward(d, pcache)
        d, dk, db = layers.conv_backward(d, ccache)
        grads.conv_layers[i].kernels[...] = dk
        grads.conv_layers[i].bias[...] = db
    return grads
