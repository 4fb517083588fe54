"""JSON messages spoken between the edge server and the operator console."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any


class BridgeKind(str, enum.Enum):
    TELEMETRY = "telemetry"
    GESTURE_EVENT = "gesture_event"
    LATENCY_SAMPLE = "latency_sample"
    FAILSAFE_EVENT = "failsafe_event"
    INJECT_GESTURE = "inject_gesture"
    SET_CHANNEL = "set_channel"


class BridgeError(ValueError):
    """Raised for unknown kinds or malformed bridge JSON."""


@dataclass(frozen=True)
class BridgeMessage:
    kind: BridgeKind
    payload: dict[str, Any] = field(default_factory=dict)


def serialize_bridge_message(m: BridgeMessage) -> str:
    return json.dumps({"kind": m.kind.value, "payload": m.payload}, sort_keys=True)


def parse_bridge_message(text: str) -> BridgeMessage:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BridgeError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise BridgeError(f"expected object, got {type(obj).__name__}")
    if "kind" not in obj:
        raise BridgeError("missing kind")
    try:
        kind = BridgeKind(obj["kind"])
    except (ValueError, TypeError):
        raise BridgeError(f"unknown kind {obj.get('kind')!r}") from None
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise BridgeError("payload must be an object")
    return BridgeMessage(kind=kind, payload=payload)
