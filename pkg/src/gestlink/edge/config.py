"""Edge pipeline configuration."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ProcessModel:
    """Virtual per-frame processing time used for latency accounting.

    The classifier itself runs in well under a millisecond at desk scale;
    this model stands in for the full perception stack of the original
    system so the latency budget is realistic yet deterministic per seed.
    """

    kind: str = "uniform"  # fixed | uniform
    fixed_ms: float = 4.0
    lo_ms: float = 2.0
    hi_ms: float = 6.0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "uniform"):
            raise ValueError(f"unknown process model {self.kind!r}")


@dataclass(frozen=True)
class PipelineConfig:
    decision_slot_ms: int = 1000
    confidence_threshold: float = 0.75
    max_command_rate_hz: float = 10.0
    frame_queue_capacity: int = 4
    stale_frame_ms: int = 200
    link_timeout_ms: int = 1000  # must exceed the 67 ms frame interval or a healthy link looks dead
    geofence_radius_m: float = 10.0
    battery_land_pct: int = 15
    command_queue_capacity: int = 8
    supervisor_tick_ms: int = 100
    echo_interval_ms: int = 1000
    process_model: ProcessModel = field(default_factory=ProcessModel)
    seed: int = 0
    gesture_map: dict | None = None  # overrides for map_gesture

    def __post_init__(self) -> None:
        if min(
            self.decision_slot_ms,
            self.max_command_rate_hz,
            self.frame_queue_capacity,
            self.stale_frame_ms,
            self.link_timeout_ms,
            self.geofence_radius_m,
            self.battery_land_pct,
        ) <= 0:
            raise ValueError("all pipeline parameters must be positive")
        if self.decision_slot_ms < 1000.0 / self.max_command_rate_hz:
            raise ValueError("decision slot must cover at least one rate-limiter interval")
