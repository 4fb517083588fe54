"""Edge-computing node: classification pipeline, slot decisions,
rate-limited dispatch, and failsafe supervision."""

from .config import PipelineConfig, ProcessModel
from .dispatch import Dispatcher
from .pipeline import (
    DEFAULT_GESTURE_MAP,
    Decision,
    DecisionKind,
    GestureEvent,
    command_for,
    decide,
    map_gesture,
)
from .server import EdgeServer
from .supervisor import PRIORITY, FailsafeMode, FailsafeState, Supervisor

__all__ = [
    "DEFAULT_GESTURE_MAP",
    "Decision",
    "DecisionKind",
    "Dispatcher",
    "EdgeServer",
    "FailsafeMode",
    "FailsafeState",
    "GestureEvent",
    "PRIORITY",
    "PipelineConfig",
    "ProcessModel",
    "Supervisor",
    "command_for",
    "decide",
    "map_gesture",
]
