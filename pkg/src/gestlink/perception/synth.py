"""Synthetic gesture observations: jittered landmarks, feature
normalization, and skeleton rasters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import DetectorProfile, p_detect
from .poses import HAND_EDGES, WRIST, GestureClass, canonical_pose


class DegenerateLandmarksError(ValueError):
    """All landmarks coincide; no scale can be recovered."""


@dataclass(frozen=True)
class Observation:
    """One synthesized detector output, FramePacket-shaped."""

    landmarks: np.ndarray | None  # (21, 2) float32-exact values, or None on miss
    det_conf: float
    raster: np.ndarray | None  # (side, side) floats in [0, 1], or None
    distance_m: float
    detected: bool


# Raw-frame degradation constants: the hand's apparent size falls as
# 1/d^FRAME_SCALE_POW, its frame position wanders by ±(0.05 + 0.03 d), and
# optics blur grows ~linearly in d. Calibration stand-ins tuned so the
# raster pipeline decays sharply past 2 m while landmark features do not.
FRAME_SCALE_POW = 1.2
FRAME_WANDER_BASE = 0.05
FRAME_WANDER_SLOPE = 0.03
BLUR_SLOPE = 0.8


def _augment(lm: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Global rotation/scale/translation, mimicking hand pose variation."""
    angle = rng.uniform(-0.21, 0.21)  # ~±12 degrees
    scale = rng.uniform(0.85, 1.10)
    shift = rng.uniform(-0.04, 0.04, size=2)
    center = lm.mean(axis=0)
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return (lm - center) @ rot.T * scale + center + shift


def _frame_project(lm: np.ndarray, rng: np.random.Generator, distance_m: float) -> np.ndarray:
    """Place crop-space landmarks into raw-frame space at distance:
    smaller, off-center, still inside the unit square."""
    fs = 1.0 / max(distance_m, 1.0) ** FRAME_SCALE_POW
    center = lm.mean(axis=0)
    rel = (lm - center) * fs
    ext = float(np.abs(rel).max()) + 0.02
    wander = FRAME_WANDER_BASE + FRAME_WANDER_SLOPE * distance_m
    lo, hi = max(ext, 0.5 - wander), min(1.0 - ext, 0.5 + wander)
    if lo >= hi:
        pos = np.array([0.5, 0.5])
    else:
        pos = rng.uniform(lo, hi, size=2)
    return np.clip(rel + pos, 0.0, 1.0)


def _box_blur(grid: np.ndarray, passes: int) -> np.ndarray:
    for _ in range(passes):
        p = np.pad(grid, 1, mode="edge")
        grid = (
            p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
            + p[1:-1, :-2] + p[1:-1, 1:-1] + p[1:-1, 2:]
            + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
        ) / 9.0
    return grid


def synthesize(
    c: GestureClass,
    distance_m: float,
    profile: DetectorProfile,
    rng: np.random.Generator,
    raster_side: int | None = None,
    background_noise: float = 0.0,
    force_detect: bool = False,
) -> Observation:
    """Draw one observation of gesture c at the given distance.

    On detection the canonical pose is augmented, jittered with
    sigma(distance), and clipped to the unit square; confidence falls with
    distance. On a miss there are no landmarks and confidence sits below
    the profile floor. Raster rendering degrades with distance through the
    effective crop resolution.
    """
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    p = p_detect(profile, distance_m)
    detected = force_detect or (rng.random() < p)
    if not detected:
        det_conf = float(rng.uniform(0.0, 0.95) * profile.conf_floor)
        return Observation(
            landmarks=None,
            det_conf=det_conf,
            raster=None,
            distance_m=distance_m,
            detected=False,
        )
    lm = _augment(canonical_pose(c), rng)
    lm = lm + rng.normal(0.0, profile.sigma(distance_m), size=lm.shape)
    lm = np.clip(lm, 0.0, 1.0).astype(np.float32).astype(np.float64)
    det_conf = float(
        min(1.0, profile.conf_floor + (1.0 - profile.conf_floor) * p * rng.uniform(0.9, 1.0))
    )
    raster = None
    if raster_side is not None:
        frame_lm = _frame_project(lm, rng, distance_m)
        raster = rasterize(frame_lm, raster_side, 0.0, rng)
        raster = _box_blur(raster, max(0, int(round(BLUR_SLOPE * (distance_m - 1.0)))))
        if background_noise > 0.0:
            raster = raster + rng.uniform(0.0, background_noise, size=raster.shape)
        raster = np.clip(raster, 0.0, 1.0)
    return Observation(
        landmarks=lm,
        det_conf=det_conf,
        raster=raster,
        distance_m=distance_m,
        detected=True,
    )


def normalize_landmarks(lm: np.ndarray, align_rotation: bool = False) -> np.ndarray:
    """42-float feature vector invariant to translation and uniform scale.

    The wrist moves to the origin and coordinates are divided by the
    maximum pairwise point distance. Rotation alignment (wrist-to-middle-
    knuckle axis pointing up) is available but off by default: it would
    erase the direction that separates the pointing gestures.
    """
    lm = np.asarray(lm, dtype=np.float64)
    if lm.shape != (21, 2):
        raise ValueError(f"expected (21, 2) landmarks, got {lm.shape}")
    centered = lm - lm[WRIST]
    diffs = lm[:, None, :] - lm[None, :, :]
    extent = float(np.sqrt((diffs**2).sum(axis=2)).max())
    if extent < 1e-9:
        raise DegenerateLandmarksError("all landmarks coincide")
    feats = centered / extent
    if align_rotation:
        axis = feats[9]  # middle-finger knuckle
        norm = float(np.hypot(axis[0], axis[1]))
        if norm > 1e-9:
            # rotate so the wrist->middle-MCP axis points straight up (-y)
            cos_a = -axis[1] / norm
            sin_a = -axis[0] / norm
            rot = np.array([[cos_a, -sin_a], [sin_a, cos_a]])
            feats = feats @ rot.T
    return feats.reshape(42)


def rasterize(
    lm: np.ndarray,
    side: int,
    background_noise: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Skeleton edges drawn into a side x side grayscale grid in [0, 1],
    plus additive uniform background noise, clipped to [0, 1]."""
    if side < 8:
        raise ValueError(f"side must be >= 8, got {side}")
    lm = np.asarray(lm, dtype=np.float64)
    grid = np.zeros((side, side), dtype=np.float64)
    pts = np.clip(lm, 0.0, 1.0) * (side - 1)
    for a, b in HAND_EDGES:
        pa, pb = pts[a], pts[b]
        steps = int(np.ceil(np.hypot(*(pb - pa)))) * 2 + 1
        ts = np.linspace(0.0, 1.0, steps)
        xs = np.rint(pa[0] + (pb[0] - pa[0]) * ts).astype(int)
        ys = np.rint(pa[1] + (pb[1] - pa[1]) * ts).astype(int)
        grid[ys, xs] = 1.0
    if background_noise > 0.0:
        grid = grid + rng.uniform(0.0, background_noise, size=grid.shape)
    return np.clip(grid, 0.0, 1.0)
