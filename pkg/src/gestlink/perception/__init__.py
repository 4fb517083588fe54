"""Synthetic gesture perception: pose templates, the distance/detection
model, landmark features, rasters, and dataset generation."""

from .detector import BASELINE, EXTENDED, PROFILES, DetectorProfile, p_detect
from .poses import HAND_EDGES, FINGERS, GestureClass, canonical_pose
from .synth import DegenerateLandmarksError, Observation, normalize_landmarks, rasterize, synthesize
from .dataset import (
    Dataset,
    DatasetSpec,
    generate_dataset,
    load_dataset,
    negative_features,
    save_dataset,
)

__all__ = [
    "BASELINE",
    "Dataset",
    "DatasetSpec",
    "DegenerateLandmarksError",
    "DetectorProfile",
    "EXTENDED",
    "FINGERS",
    "GestureClass",
    "HAND_EDGES",
    "Observation",
    "PROFILES",
    "canonical_pose",
    "generate_dataset",
    "load_dataset",
    "negative_features",
    "normalize_landmarks",
    "p_detect",
    "rasterize",
    "save_dataset",
    "synthesize",
]
