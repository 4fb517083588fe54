"""Drone state string broadcast on the telemetry channel.

Fixed field order, Tello-state flavoured:

    x:%d;y:%d;z:%d;yaw:%d;vgx:%d;vgy:%d;vgz:%d;bat:%d;mode:%s;time:%d\r\n

Positions in cm, velocities in cm/s, battery percent, time in sim ms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class DroneMode(str, enum.Enum):
    GROUNDED = "grounded"
    HOVER = "hover"
    FLYING = "flying"
    LANDING = "landing"
    RTH = "rth"


_FIELDS = ("x", "y", "z", "yaw", "vgx", "vgy", "vgz", "bat", "mode", "time")


class TelemetryError(ValueError):
    """Raised when telemetry text is malformed or out of range."""


@dataclass(frozen=True)
class Telemetry:
    x_cm: int
    y_cm: int
    z_cm: int
    yaw_deg: int
    vgx: int
    vgy: int
    vgz: int
    bat: int
    mode: DroneMode
    time_ms: int

    def __post_init__(self) -> None:
        if not 0 <= self.bat <= 100:
            raise TelemetryError(f"bat outside [0,100]: {self.bat}")
        if self.time_ms < 0:
            raise TelemetryError(f"negative time_ms: {self.time_ms}")


def encode_telemetry(t: Telemetry) -> str:
    return (
        f"x:{t.x_cm};y:{t.y_cm};z:{t.z_cm};yaw:{t.yaw_deg};"
        f"vgx:{t.vgx};vgy:{t.vgy};vgz:{t.vgz};bat:{t.bat};"
        f"mode:{t.mode.value};time:{t.time_ms}\r\n"
    )


def _parse_int(name: str, raw: str) -> int:
    stripped = raw[1:] if raw.startswith("-") else raw
    if not stripped or not all("0" <= ch <= "9" for ch in stripped):
        raise TelemetryError(f"bad integer for {name}: {raw!r}")
    return int(raw)


def parse_telemetry(text: str) -> Telemetry:
    body = text
    if body.endswith("\r\n"):
        body = body[:-2]
    elif body.endswith("\n"):
        body = body[:-1]
    pairs = body.split(";")
    if len(pairs) != len(_FIELDS):
        raise TelemetryError(f"expected {len(_FIELDS)} fields, got {len(pairs)}")
    values: dict[str, str] = {}
    for expected, pair in zip(_FIELDS, pairs):
        key, sep, value = pair.partition(":")
        if not sep or key != expected:
            raise TelemetryError(f"expected field {expected!r}, got {pair!r}")
        values[key] = value
    try:
        mode = DroneMode(values["mode"])
    except ValueError:
        raise TelemetryError(f"unknown mode {values['mode']!r}") from None
    t = Telemetry(
        x_cm=_parse_int("x", values["x"]),
        y_cm=_parse_int("y", values["y"]),
        z_cm=_parse_int("z", values["z"]),
        yaw_deg=_parse_int("yaw", values["yaw"]),
        vgx=_parse_int("vgx", values["vgx"]),
        vgy=_parse_int("vgy", values["vgy"]),
        vgz=_parse_int("vgz", values["vgz"]),
        bat=_parse_int("bat", values["bat"]),
        mode=mode,
        time_ms=_parse_int("time", values["time"]),
    )
    return t
