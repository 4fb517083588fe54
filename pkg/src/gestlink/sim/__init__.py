"""Simulated Tello-class drone: kinematics, behaviors, and I/O ticks."""

from .model import (
    AIRBORNE,
    LEGAL_TRANSITIONS,
    DroneState,
    ModeError,
    SimConfig,
    WindModel,
    WindProcess,
    drain_rate,
    step,
)
from .drone import DroneSim, GestureWindow, ScheduledGestures

__all__ = [
    "AIRBORNE",
    "DroneSim",
    "DroneState",
    "GestureWindow",
    "LEGAL_TRANSITIONS",
    "ModeError",
    "ScheduledGestures",
    "SimConfig",
    "WindModel",
    "WindProcess",
    "drain_rate",
    "step",
]
