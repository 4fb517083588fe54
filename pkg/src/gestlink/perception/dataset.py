"""Balanced synthetic datasets with reproducible export/import."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..gesturenet import split_dataset
from ..proto import FramePacket, decode_frame_packet, encode_frame_packet
from .detector import PROFILES, DetectorProfile
from .poses import GestureClass
from .synth import normalize_landmarks, synthesize


@dataclass(frozen=True)
class DatasetSpec:
    per_class: int = 1500
    distance_range: tuple[float, float] = (0.5, 10.0)
    profile: str = "baseline"
    background_noise: float = 0.0
    raster_side: int | None = None
    seed: int = 0


@dataclass
class Dataset:
    spec: DatasetSpec
    landmarks: np.ndarray  # (N, 21, 2)
    labels: np.ndarray  # (N,)
    distances: np.ndarray  # (N,)
    rasters: np.ndarray | None = None  # (N, side, side, 1)
    split: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.labels)

    def features(self, indices: np.ndarray | None = None) -> np.ndarray:
        idx = np.arange(len(self)) if indices is None else indices
        return np.stack([normalize_landmarks(self.landmarks[i]) for i in idx])

    def raster_tensors(self, indices: np.ndarray | None = None) -> np.ndarray:
        if self.rasters is None:
            raise ValueError("dataset was generated without rasters")
        idx = np.arange(len(self)) if indices is None else indices
        return self.rasters[idx]


def _sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def generate_dataset(spec: DatasetSpec) -> Dataset:
    """Balanced classes, distances uniform over the range, deterministic
    per seed; sample i depends only on (seed, i) so generation order is
    free. Detection is forced: a training corpus has no empty samples."""
    profile = PROFILES[spec.profile]
    n = spec.per_class * len(GestureClass)
    lo, hi = spec.distance_range
    landmarks = np.zeros((n, 21, 2), dtype=np.float64)
    labels = np.zeros(n, dtype=np.int64)
    distances = np.zeros(n, dtype=np.float64)
    rasters = None
    if spec.raster_side is not None:
        rasters = np.zeros((n, spec.raster_side, spec.raster_side, 1), dtype=np.float64)
    for i in range(n):
        cls = GestureClass(i % len(GestureClass))
        rng = _sample_rng(spec.seed, i)
        d = float(rng.uniform(lo, hi))
        obs = synthesize(
            cls,
            d,
            profile,
            rng,
            raster_side=spec.raster_side,
            background_noise=spec.background_noise,
            force_detect=True,
        )
        landmarks[i] = obs.landmarks
        labels[i] = int(cls)
        distances[i] = d
        if rasters is not None:
            rasters[i, :, :, 0] = obs.raster
    train_idx, val_idx, test_idx = split_dataset(n, spec.seed)
    return Dataset(
        spec=spec,
        landmarks=landmarks,
        labels=labels,
        distances=distances,
        rasters=rasters,
        split={"train": train_idx, "val": val_idx, "test": test_idx},
    )


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """FramePacket-encoded samples with a JSON sidecar next to them."""
    path = Path(path)
    with open(path, "wb") as fh:
        for i in range(len(ds)):
            raster = b""
            if ds.rasters is not None:
                raster = (
                    np.clip(ds.rasters[i, :, :, 0] * 255.0, 0, 255).astype(np.uint8).tobytes()
                )
            packet = FramePacket(
                seq=i,
                ts_ms=0,
                distance_m=float(np.float32(ds.distances[i])),
                det_conf=1.0,
                landmarks=tuple(
                    (float(np.float32(x)), float(np.float32(y))) for x, y in ds.landmarks[i]
                ),
                raster=raster,
            )
            blob = encode_frame_packet(packet)
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
    sidecar = {
        "labels": ds.labels.tolist(),
        "spec": {
            "per_class": ds.spec.per_class,
            "distance_range": list(ds.spec.distance_range),
            "profile": ds.spec.profile,
            "background_noise": ds.spec.background_noise,
            "raster_side": ds.spec.raster_side,
            "seed": ds.spec.seed,
        },
    }
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, sort_keys=True))


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    spec_d = sidecar["spec"]
    spec = DatasetSpec(
        per_class=spec_d["per_class"],
        distance_range=tuple(spec_d["distance_range"]),
        profile=spec_d["profile"],
        background_noise=spec_d["background_noise"],
        raster_side=spec_d["raster_side"],
        seed=spec_d["seed"],
    )
    labels = np.array(sidecar["labels"], dtype=np.int64)
    raw = path.read_bytes()
    pos = 0
    landmarks = []
    distances = []
    rasters = [] if spec.raster_side is not None else None
    while pos < len(raw):
        (length,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        packet = decode_frame_packet(raw[pos : pos + length])
        pos += length
        landmarks.append(packet.landmarks)
        distances.append(packet.distance_m)
        if rasters is not None:
            side = spec.raster_side
            arr = np.frombuffer(packet.raster, dtype=np.uint8).reshape(side, side)
            rasters.append(arr.astype(np.float64)[:, :, None] / 255.0)
    n = len(labels)
    train_idx, val_idx, test_idx = split_dataset(n, spec.seed)
    return Dataset(
        spec=spec,
        landmarks=np.array(landmarks, dtype=np.float64),
        labels=labels,
        distances=np.array(distances, dtype=np.float64),
        rasters=np.stack(rasters) if rasters else None,
        split={"train": train_idx, "val": val_idx, "test": test_idx},
    )


def negative_features(n: int, rng: np.random.Generator) -> np.ndarray:
    """Feature vectors from random non-hand point clouds: what a detector
    false-fire on clutter would hand the classifier."""
    out = np.zeros((n, 42))
    for i in range(n):
        pts = rng.random((21, 2))
        out[i] = normalize_landmarks(pts)
    return out
