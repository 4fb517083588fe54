"""Gesture classes and their canonical 21-point hand templates.

Landmarks follow the standard hand-skeleton ordering: 0 = wrist, then four
joints per finger (thumb, index, middle, ring, pinky), knuckle to tip.
Coordinates are image-normalized, x right, y down, hand upright with the
wrist near the bottom. The templates are authored for this build: the six
classes differ in which fingers are extended and where they point, and all
pairwise distances stay well clear of the detector jitter floor.
"""

from __future__ import annotations

import enum

import numpy as np

WRIST = 0
THUMB = (1, 2, 3, 4)
INDEX = (5, 6, 7, 8)
MIDDLE = (9, 10, 11, 12)
RING = (13, 14, 15, 16)
PINKY = (17, 18, 19, 20)
FINGERS = (THUMB, INDEX, MIDDLE, RING, PINKY)

# Bone edges for skeleton rasterization: wrist->knuckles and finger chains.
HAND_EDGES: tuple[tuple[int, int], ...] = (
    (0, 1), (1, 2), (2, 3), (3, 4),
    (0, 5), (5, 6), (6, 7), (7, 8),
    (0, 9), (9, 10), (10, 11), (11, 12),
    (0, 13), (13, 14), (14, 15), (15, 16),
    (0, 17), (17, 18), (18, 19), (19, 20),
    (5, 9), (9, 13), (13, 17),
)


class GestureClass(enum.IntEnum):
    PALM = 0
    FIST = 1
    THUMB_UP = 2
    THUMB_DOWN = 3
    POINT_LEFT = 4
    POINT_RIGHT = 5


def _chain(start: tuple[float, float], step: tuple[float, float]) -> list[tuple[float, float]]:
    x, y = start
    dx, dy = step
    return [(x + i * dx, y + i * dy) for i in range(4)]


def _folded_fingers() -> dict[int, tuple[float, float]]:
    """Curled index..pinky: tips tucked in near the palm centroid, which for
    a wrist-at-(0.50, 0.85) hand with this knuckle row sits at (0.504, 0.61)."""
    cx, cy = 0.504, 0.61
    pts: dict[int, tuple[float, float]] = {}
    for finger, base_x in zip((INDEX, MIDDLE, RING, PINKY), (0.40, 0.47, 0.54, 0.61)):
        mcp = (base_x, 0.55)
        pip = (base_x + 0.01, 0.50)
        dip = ((base_x + cx) / 2, 0.555)
        tip = (cx + (base_x - cx) * 0.25, cy + 0.012)
        for idx, p in zip(finger, (mcp, pip, dip, tip)):
            pts[idx] = p
    return pts


def _template_palm() -> dict[int, tuple[float, float]]:
    pts = {WRIST: (0.50, 0.85)}
    for idx, p in zip(THUMB, [(0.36, 0.76), (0.29, 0.67), (0.24, 0.59), (0.20, 0.52)]):
        pts[idx] = p
    for finger, mcp, step in (
        (INDEX, (0.40, 0.55), (-0.012, -0.082)),
        (MIDDLE, (0.48, 0.53), (0.000, -0.088)),
        (RING, (0.56, 0.54), (0.012, -0.082)),
        (PINKY, (0.64, 0.57), (0.025, -0.068)),
    ):
        for idx, p in zip(finger, _chain(mcp, step)):
            pts[idx] = p
    return pts


def _template_fist() -> dict[int, tuple[float, float]]:
    pts = {WRIST: (0.50, 0.85)}
    pts.update(_folded_fingers())
    for idx, p in zip(THUMB, [(0.37, 0.76), (0.33, 0.68), (0.35, 0.61), (0.40, 0.58)]):
        pts[idx] = p
    return pts


def _template_thumb_up() -> dict[int, tuple[float, float]]:
    pts = {WRIST: (0.50, 0.85)}
    pts.update(_folded_fingers())
    for idx, p in zip(THUMB, [(0.38, 0.72), (0.355, 0.60), (0.34, 0.48), (0.33, 0.36)]):
        pts[idx] = p
    return pts


def _template_thumb_down() -> dict[int, tuple[float, float]]:
    pts = {WRIST: (0.52, 0.48)}
    base = _folded_fingers()
    # folded cluster sits above; thumb hangs well below it
    for idx, (x, y) in base.items():
        pts[idx] = (x, y - 0.16)
    for idx, p in zip(THUMB, [(0.38, 0.50), (0.355, 0.62), (0.34, 0.74), (0.33, 0.86)]):
        pts[idx] = p
    return pts


def _template_point_left() -> dict[int, tuple[float, float]]:
    pts = {WRIST: (0.60, 0.80)}
    base = _folded_fingers()
    for idx, (x, y) in base.items():
        pts[idx] = (x + 0.12, y)
    for idx, p in zip(INDEX, [(0.48, 0.53), (0.38, 0.52), (0.29, 0.515), (0.20, 0.51)]):
        pts[idx] = p
    for idx, p in zip(THUMB, [(0.49, 0.72), (0.45, 0.65), (0.47, 0.60), (0.51, 0.58)]):
        pts[idx] = p
    return pts


def _template_point_right() -> dict[int, tuple[float, float]]:
    left = _template_point_left()
    return {idx: (1.0 - x, y) for idx, (x, y) in left.items()}


_BUILDERS = {
    GestureClass.PALM: _template_palm,
    GestureClass.FIST: _template_fist,
    GestureClass.THUMB_UP: _template_thumb_up,
    GestureClass.THUMB_DOWN: _template_thumb_down,
    GestureClass.POINT_LEFT: _template_point_left,
    GestureClass.POINT_RIGHT: _template_point_right,
}

_TEMPLATES: dict[GestureClass, np.ndarray] = {}


def canonical_pose(c: GestureClass) -> np.ndarray:
    """Fixed 21x2 landmark template for a gesture class."""
    if c not in _TEMPLATES:
        pts = _BUILDERS[GestureClass(c)]()
        arr = np.array([pts[i] for i in range(21)], dtype=np.float64)
        arr.setflags(write=False)
        _TEMPLATES[GestureClass(c)] = arr
    return _TEMPLATES[GestureClass(c)]
