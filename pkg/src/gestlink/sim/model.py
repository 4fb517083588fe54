"""Kinematic drone model: first-order velocity tracking, wind, battery.

The plant is deliberately kinematic. Commanded position setpoints are
tracked by a proportional controller that emits a velocity setpoint; the
velocity itself relaxes toward that setpoint exponentially with the
configured lag, which makes the step response exactly first-order. Wind
enters as a velocity disturbance scaled by a coupling factor (a 1.5 m/s
drone does not get blown sideways at full wind speed; it tilts against
it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..proto import DroneMode


class ModeError(RuntimeError):
    """An illegal mode transition was attempted."""


# transitions the state machine may ever take
LEGAL_TRANSITIONS: frozenset[tuple[DroneMode, DroneMode]] = frozenset(
    {
        (DroneMode.GROUNDED, DroneMode.HOVER),
        (DroneMode.HOVER, DroneMode.FLYING),
        (DroneMode.FLYING, DroneMode.HOVER),
        (DroneMode.HOVER, DroneMode.LANDING),
        (DroneMode.FLYING, DroneMode.LANDING),
        (DroneMode.RTH, DroneMode.LANDING),
        (DroneMode.HOVER, DroneMode.RTH),
        (DroneMode.FLYING, DroneMode.RTH),
        (DroneMode.LANDING, DroneMode.GROUNDED),
    }
)

AIRBORNE = (DroneMode.HOVER, DroneMode.FLYING, DroneMode.RTH)


@dataclass(frozen=True)
class WindModel:
    mean_speed: float = 0.0  # m/s
    gust_std: float = 0.0  # m/s
    direction_deg: float = 0.0
    correlation_time_s: float = 2.0

    def __post_init__(self) -> None:
        if self.mean_speed < 0:
            raise ValueError("mean_speed must be >= 0")
        if self.correlation_time_s <= 0:
            raise ValueError("correlation_time must be > 0")

    def mean_vector(self) -> np.ndarray:
        rad = math.radians(self.direction_deg)
        return np.array([math.cos(rad), math.sin(rad), 0.0]) * self.mean_speed


class WindProcess:
    """Ornstein-Uhlenbeck gusts around the mean wind vector."""

    def __init__(self, model: WindModel, rng: np.random.Generator) -> None:
        self.model = model
        self._rng = rng
        self._wind = model.mean_vector()

    def sample(self, dt: float) -> np.ndarray:
        m = self.model
        alpha = dt / m.correlation_time_s
        noise = self._rng.normal(0.0, 1.0, size=3) * np.array([1.0, 1.0, 0.3])
        self._wind = (
            self._wind
            + alpha * (m.mean_vector() - self._wind)
            + m.gust_std * math.sqrt(2.0 * alpha) * noise
        )
        return self._wind.copy()


@dataclass(frozen=True)
class SimConfig:
    tick_hz: float = 50.0
    v_max: float = 1.5  # m/s
    velocity_lag_s: float = 0.3
    battery_drain_flying: float = 3.0  # percent per minute
    battery_drain_hover: float = 2.0
    altitude_band: tuple[float, float] = (1.0, 3.0)
    seed: int = 0
    # controller and behavior constants
    kp_pos: float = 2.0  # 1/s, position error -> velocity setpoint
    yaw_lag_s: float = 0.4
    takeoff_alt_m: float = 1.0
    land_speed: float = 0.5  # m/s descent
    rth_speed_frac: float = 0.5  # of v_max
    wind_coupling: float = 0.05
    battery_land_pct: float = 15.0
    settle_enter_m: float = 0.10
    settle_exit_m: float = 0.20
    telemetry_hz: float = 10.0
    frame_fps: float = 15.0

    def __post_init__(self) -> None:
        if self.tick_hz <= 0:
            raise ValueError("tick_hz must be > 0")
        lo, hi = self.altitude_band
        if not (1.0 <= lo < hi <= 3.0):
            raise ValueError("altitude band must sit within the 1-3 m operating range")


@dataclass
class DroneState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw_deg: float = 0.0
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    setpoint: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw_setpoint_deg: float = 0.0
    battery_pct: float = 100.0
    mode: DroneMode = DroneMode.GROUNDED
    home: np.ndarray = field(default_factory=lambda: np.zeros(3))
    sim_time_ms: int = 0

    def transition(self, new_mode: DroneMode) -> None:
        if new_mode == self.mode:
            return
        if (self.mode, new_mode) not in LEGAL_TRANSITIONS:
            raise ModeError(f"illegal transition {self.mode.value} -> {new_mode.value}")
        self.mode = new_mode


def drain_rate(mode: DroneMode, config: SimConfig) -> float:
    """Battery percent per minute for a mode."""
    if mode in (DroneMode.FLYING, DroneMode.RTH, DroneMode.LANDING):
        return config.battery_drain_flying
    if mode == DroneMode.HOVER:
        return config.battery_drain_hover
    return 0.0


def step(s: DroneState, wind_vector: np.ndarray, dt: float, config: SimConfig) -> DroneState:
    """Advance one tick: track setpoints, integrate, drain battery.

    Mutates and returns s (the sim owns a single state instance); the
    caller stamps sim_time_ms. Grounded drones do not move; landing/rth
    override the setpoint tracking with their own behavior targets.
    """
    mode = s.mode
    if mode == DroneMode.GROUNDED:
        s.velocity[:] = 0.0
        s.battery_pct = max(0.0, s.battery_pct - drain_rate(mode, config) * dt / 60.0)
        return s

    target = s.setpoint
    if mode == DroneMode.RTH:
        target = np.array([s.home[0], s.home[1], max(s.position[2], config.takeoff_alt_m)])
    elif mode == DroneMode.LANDING:
        target = np.array([s.position[0], s.position[1], 0.0])

    err = target - s.position
    v_sp = config.kp_pos * err
    speed = float(np.linalg.norm(v_sp))
    limit = config.v_max
    if mode == DroneMode.RTH:
        limit = config.v_max * config.rth_speed_frac
    elif mode == DroneMode.LANDING:
        limit = config.land_speed
    if speed > limit:
        v_sp *= limit / speed

    # exact first-order relaxation toward the velocity setpoint
    decay = math.exp(-dt / config.velocity_lag_s)
    s.velocity[:] = v_sp + (s.velocity - v_sp) * decay
    ground_v = s.velocity + config.wind_coupling * wind_vector
    s.position += ground_v * dt
    if s.position[2] < 0.0:
        s.position[2] = 0.0

    # yaw: same first-order shape
    yaw_err = ((s.yaw_setpoint_deg - s.yaw_deg + 180.0) % 360.0) - 180.0
    s.yaw_deg += yaw_err * (1.0 - math.exp(-dt / config.yaw_lag_s))

    s.battery_pct = max(0.0, s.battery_pct - drain_rate(mode, config) * dt / 60.0)
    return s
