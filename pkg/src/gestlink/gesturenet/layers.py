"""Layer primitives for the gesture classifier, written on bare numpy.

Tensors are float64 numpy arrays. Spatial inputs are batch-first
(N, H, W, C); flat inputs are (N, D). Convolutions are valid (no padding)
cross-correlations with stride 1 followed by ReLU; pooling is 2x2 max with
edge-replication padding when a spatial dim is odd. Each forward returns
the cache its backward needs.
"""

from __future__ import annotations

import numpy as np

POOL = 2


def _as_batch(x: np.ndarray, rank: int) -> tuple[np.ndarray, bool]:
    if x.ndim == rank - 1:
        return x[None, ...], True
    if x.ndim == rank:
        return x, False
    raise ValueError(f"expected rank {rank - 1} or {rank} array, got shape {x.shape}")


def conv_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray):
    """ReLU(valid cross-correlation of x with kernels, stride 1) + cache.

    x: (N, H, W, Cin) or (H, W, Cin); kernels: (kh, kw, Cin, Cout).
    Output spatial dims are (H - kh + 1, W - kw + 1).
    """
    xb, squeeze = _as_batch(np.asarray(x, dtype=np.float64), 4)
    kh, kw, cin, cout = kernels.shape
    n, h, w, c = xb.shape
    if c != cin:
        raise ValueError(f"input has {c} channels, kernel expects {cin}")
    if h < kh or w < kw:
        raise ValueError(f"input {h}x{w} smaller than kernel {kh}x{kw}")
    ho, wo = h - kh + 1, w - kw + 1
    windows = np.lib.stride_tricks.sliding_window_view(xb, (kh, kw), axis=(1, 2))
    # windows: (N, Ho, Wo, Cin, kh, kw) -> columns (N*Ho*Wo, kh*kw*Cin)
    cols = windows.transpose(0, 1, 2, 4, 5, 3).reshape(n * ho * wo, kh * kw * cin)
    wmat = kernels.reshape(kh * kw * cin, cout)
    z = (cols @ wmat + bias).reshape(n, ho, wo, cout)
    out = np.maximum(z, 0.0)
    cache = (cols, wmat, z > 0.0, xb.shape, kernels.shape)
    return (out[0] if squeeze else out), cache


def conv_backward(d_out: np.ndarray, cache):
    """Gradients of the conv+ReLU layer: (dx, dkernels, dbias)."""
    cols, wmat, relu_mask, x_shape, k_shape = cache
    kh, kw, cin, cout = k_shape
    n, h, w, _ = x_shape
    ho, wo = h - kh + 1, w - kw + 1
    d_out_b = d_out if d_out.ndim == 4 else d_out[None, ...]
    dz = (d_out_b * relu_mask).reshape(n * ho * wo, cout)
    dbias = dz.sum(axis=0)
    dwmat = cols.T @ dz
    dkernels = dwmat.reshape(kh, kw, cin, cout)
    dcols = (dz @ wmat.T).reshape(n, ho, wo, kh, kw, cin)
    dx = np.zeros(x_shape, dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            dx[:, i : i + ho, j : j + wo, :] += dcols[:, :, :, i, j, :]
    return dx, dkernels, dbias


def _pad_even(x: np.ndarray) -> np.ndarray:
    _, h, w, _ = x.shape
    if h % POOL == 0 and w % POOL == 0:
        return x
    return np.pad(x, ((0, 0), (0, h % POOL), (0, w % POOL), (0, 0)), mode="edge")


def max_pool(x: np.ndarray):
    """2x2 max pooling; odd spatial dims are edge-replicated first."""
    xb, squeeze = _as_batch(np.asarray(x, dtype=np.float64), 4)
    n, h, w, c = xb.shape
    xp = _pad_even(xb)
    hp, wp = xp.shape[1], xp.shape[2]
    ho, wo = hp // POOL, wp // POOL
    win = xp.reshape(n, ho, POOL, wo, POOL, c).transpose(0, 1, 3, 2, 4, 5)
    flat = win.reshape(n, ho, wo, POOL * POOL, c)
    idx = flat.argmax(axis=3)
    out = np.take_along_axis(flat, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    cache = (idx, (n, h, w, c), (hp, wp))
    return (out[0] if squeeze else out), cache


def max_pool_backward(d_out: np.ndarray, cache) -> np.ndarray:
    idx, (n, h, w, c), (hp, wp) = cache
    ho, wo = hp // POOL, wp // POOL
    d_out_b = d_out if d_out.ndim == 4 else d_out[None, ...]
    dflat = np.zeros((n, ho, wo, POOL * POOL, c), dtype=np.float64)
    np.put_along_axis(dflat, idx[:, :, :, None, :], d_out_b[:, :, :, None, :], axis=3)
    dpad = (
        dflat.reshape(n, ho, wo, POOL, POOL, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(n, hp, wp, c)
    )
    dx = dpad[:, :h, :w, :].copy()
    # fold replicated-edge gradients back onto their source cells
    if hp > h:
        dx[:, h - 1, :, :] += dpad[:, h, :w, :]
    if wp > w:
        dx[:, :, w - 1, :] += dpad[:, :h, w, :]
    if hp > h and wp > w:
        dx[:, h - 1, w - 1, :] += dpad[:, h, w, :]
    return dx


def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray, relu: bool):
    z = x @ weights + bias
    out = np.maximum(z, 0.0) if relu else z
    cache = (x, weights, z > 0.0 if relu else None)
    return out, cache


def dense_backward(d_out: np.ndarray, cache):
    x, weights, relu_mask = cache
    dz = d_out * relu_mask if relu_mask is not None else d_out
    dweights = x.T @ dz
    dbias = dz.sum(axis=0)
    dx = dz @ weights.T
    return dx, dweights, dbias


def dropout_forward(x: np.ndarray, rate: float, rng: np.random.Generator):
    """Inverted dropout: activations are rescaled at train time so the
    expectation matches inference, which applies no mask at all."""
    if rate <= 0.0:
        return x, None
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * keep, keep


def dropout_backward(d_out: np.ndarray, keep) -> np.ndarray:
    return d_out if keep is None else d_out * keep


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)
