"""Slot aggregation and gesture-to-command mapping (pure logic)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..perception import GestureClass
from ..proto import ControlCommand, Origin, Verb
from .config import PipelineConfig


@dataclass(frozen=True)
class GestureEvent:
    cls: GestureClass
    confidence: float
    frame_seq: int
    t_captured_us: int
    t_received_us: int
    t_classified_us: int
    distance_m: float

    def __post_init__(self) -> None:
        if not self.t_captured_us <= self.t_received_us <= self.t_classified_us:
            raise ValueError("event timestamps must be ordered captured <= received <= classified")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence outside [0,1]: {self.confidence}")


class DecisionKind(enum.Enum):
    COMMAND = "command"
    HOVER_FAILSAFE = "hover_failsafe"
    NONE = "none"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    winner: GestureClass | None = None
    weight: float = 0.0
    n_events: int = 0
    n_confident: int = 0
    source_event: GestureEvent | None = None


DEFAULT_GESTURE_MAP: dict[GestureClass, ControlCommand] = {
    GestureClass.PALM: ControlCommand(Verb.STOP),
    GestureClass.FIST: ControlCommand(Verb.LAND),
    GestureClass.THUMB_UP: ControlCommand(Verb.UP, 20),
    GestureClass.THUMB_DOWN: ControlCommand(Verb.DOWN, 20),
    GestureClass.POINT_LEFT: ControlCommand(Verb.LEFT, 20),
    GestureClass.POINT_RIGHT: ControlCommand(Verb.RIGHT, 20),
}


def map_gesture(c: GestureClass, overrides: dict | None = None) -> ControlCommand:
    if overrides and c in overrides:
        return overrides[c]
    return DEFAULT_GESTURE_MAP[c]


def decide(events: list[GestureEvent], config: PipelineConfig) -> Decision:
    """Confidence-weighted majority over one decision slot.

    Confident events vote with their confidence; the heaviest class wins
    (ties break to higher weight, then lower class index). Events present
    but none confident means the operator is gesturing unreadably: hover.
    An empty slot is silence, left to the link supervisor.
    """
    if not events:
        return Decision(kind=DecisionKind.NONE)
    confident = [e for e in events if e.confidence >= config.confidence_threshold]
    if not confident:
        return Decision(kind=DecisionKind.HOVER_FAILSAFE, n_events=len(events))
    weights: dict[GestureClass, float] = {}
    for e in confident:
        weights[e.cls] = weights.get(e.cls, 0.0) + e.confidence
    winner = min(weights, key=lambda c: (-weights[c], int(c)))
    # latency accounting pins the freshest contributing evidence
    source = max((e for e in confident if e.cls == winner), key=lambda e: e.t_classified_us)
    return Decision(
        kind=DecisionKind.COMMAND,
        winner=winner,
        weight=weights[winner],
        n_events=len(events),
        n_confident=len(confident),
        source_event=source,
    )


def command_for(decision: Decision, config: PipelineConfig) -> ControlCommand | None:
    if decision.kind == DecisionKind.COMMAND:
        base = map_gesture(decision.winner, config.gesture_map)
        return ControlCommand(base.verb, base.magnitude, Origin.GESTURE)
    if decision.kind == DecisionKind.HOVER_FAILSAFE:
        return ControlCommand(Verb.STOP, origin=Origin.FAILSAFE)
    return None
