"""Versioned binary model checkpoints and training-history CSV export.

Checkpoint layout: magic "GNET", u32 format version, u32 descriptor
length, JSON architecture descriptor, then every parameter tensor in
declaration order as little-endian float64.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .network import ConvLayer, DenseLayer, NetworkParams
from .training import EpochRecord

MAGIC = b"GNET"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(params: NetworkParams, path: str | Path) -> None:
    descriptor = {
        "input_shape": list(params.input_shape),
        "conv": [list(l.kernels.shape) for l in params.conv_layers],
        "dense": [list(l.weights.shape) for l in params.dense_layers],
        "dropout_rate": params.dropout_rate,
    }
    blob = json.dumps(descriptor, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for tensor in params.tensors():
            fh.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> NetworkParams:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CheckpointError(f"bad magic {raw[:4]!r}")
    version, desc_len = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    pos = 12
    descriptor = json.loads(raw[pos : pos + desc_len].decode("utf-8"))
    pos += desc_len

    def take(shape: tuple[int, ...]) -> np.ndarray:
        nonlocal pos
        count = int(np.prod(shape))
        end = pos + 8 * count
        if end > len(raw):
            raise CheckpointError("checkpoint truncated")
        arr = np.frombuffer(raw[pos:end], dtype="<f8").reshape(shape).astype(np.float64)
        pos = end
        return arr

    conv_layers = []
    for kshape in descriptor["conv"]:
        kshape = tuple(kshape)
        conv_layers.append(ConvLayer(kernels=take(kshape), bias=take((kshape[3],))))
    dense_layers = []
    for wshape in descriptor["dense"]:
        wshape = tuple(wshape)
        dense_layers.append(DenseLayer(weights=take(wshape), bias=take((wshape[1],))))
    if pos != len(raw):
        raise CheckpointError(f"{len(raw) - pos} trailing bytes in checkpoint")
    return NetworkParams(
        input_shape=tuple(descriptor["input_shape"]),
        conv_layers=conv_layers,
        dense_layers=dense_layers,
        dropout_rate=descriptor["dropout_rate"],
    )


def save_history_csv(history: list[EpochRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "val_acc"])
        for rec in history:
            writer.writerow([rec.epoch, f"{rec.train_loss:.6f}", f"{rec.val_loss:.6f}", f"{rec.val_acc:.6f}"])
