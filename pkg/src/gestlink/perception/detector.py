"""Distance-dependent detection and landmark degradation model.

Stands in for the hand detector: a logistic detection-probability curve
per profile (the baseline detector reaches ~5 m, the extended one ~10 m),
landmark jitter that grows linearly with distance, and a raster resolution
that shrinks with distance the way a fixed-resolution camera crop would.
All constants are desk-scale calibration stand-ins, not measured truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DetectorProfile:
    name: str
    d_reliable_m: float
    d_cutoff_m: float
    jitter_base: float = 0.004  # sigma at zero distance, normalized units
    jitter_slope: float = 0.006  # added sigma per meter
    conf_floor: float = 0.5

    def __post_init__(self) -> None:
        if not 0 < self.d_reliable_m < self.d_cutoff_m:
            raise ValueError("requires 0 < d_reliable < d_cutoff")
        if self.jitter_base < 0 or self.jitter_slope < 0:
            raise ValueError("jitter parameters must be >= 0")

    def sigma(self, distance_m: float) -> float:
        return self.jitter_base + self.jitter_slope * distance_m


BASELINE = DetectorProfile(name="baseline", d_reliable_m=4.5, d_cutoff_m=6.0)
EXTENDED = DetectorProfile(name="extended", d_reliable_m=9.5, d_cutoff_m=11.0)

PROFILES = {p.name: p for p in (BASELINE, EXTENDED)}


def p_detect(profile: DetectorProfile, d: float) -> float:
    """Detection probability at distance d: a logistic fall-off that is
    ~0.98 at d_reliable, 0.5 at the reliable/cutoff midpoint, and ~0 past
    the cutoff. Monotone non-increasing in d."""
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    mid = (profile.d_reliable_m + profile.d_cutoff_m) / 2.0
    width = (profile.d_cutoff_m - profile.d_reliable_m) / 8.0
    return float(1.0 / (1.0 + np.exp((d - mid) / width)))

