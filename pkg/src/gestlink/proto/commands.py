"""Tello-style ASCII control commands, one per datagram.

Wire form: verb, optional space + integer magnitude, trailing newline.
Translations carry centimeters, rotations degrees. "rth" is a custom
extension verb for return-to-home. The origin field is local metadata
(who asked for the command) and never crosses the wire.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Verb(str, enum.Enum):
    TAKEOFF = "takeoff"
    LAND = "land"
    STOP = "stop"
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    FORWARD = "forward"
    BACK = "back"
    CW = "cw"
    CCW = "ccw"
    RTH = "rth"


class Origin(str, enum.Enum):
    GESTURE = "gesture"
    FAILSAFE = "failsafe"
    OPERATOR = "operator"


# Verbs that carry a magnitude (cm for translations, degrees for rotations).
MAGNITUDE_VERBS = frozenset(
    {Verb.UP, Verb.DOWN, Verb.LEFT, Verb.RIGHT, Verb.FORWARD, Verb.BACK, Verb.CW, Verb.CCW}
)
BARE_VERBS = frozenset({Verb.TAKEOFF, Verb.LAND, Verb.STOP, Verb.RTH})


class CommandError(ValueError):
    """Raised for malformed command text or inconsistent verb/magnitude."""


@dataclass(frozen=True)
class ControlCommand:
    verb: Verb
    magnitude: int | None = None
    origin: Origin = Origin.GESTURE

    def __post_init__(self) -> None:
        if self.verb in MAGNITUDE_VERBS:
            if self.magnitude is None:
                raise CommandError(f"{self.verb.value} requires a magnitude")
            if self.magnitude < 0:
                raise CommandError(f"negative magnitude {self.magnitude}")
        elif self.magnitude is not None:
            raise CommandError(f"{self.verb.value} does not take a magnitude")


def encode_command(c: ControlCommand) -> str:
    if c.magnitude is not None:
        return f"{c.verb.value} {c.magnitude}\n"
    return f"{c.verb.value}\n"


def parse_command(t: str, origin: Origin = Origin.GESTURE) -> ControlCommand:
    """Inverse of encode_command; origin is attached locally by the caller."""
    body = t[:-1] if t.endswith("\n") else t
    parts = body.split(" ")
    if not parts or not parts[0]:
        raise CommandError("empty command")
    try:
        verb = Verb(parts[0])
    except ValueError:
        raise CommandError(f"unknown verb {parts[0]!r}") from None
    if len(parts) == 1:
        if verb in MAGNITUDE_VERBS:
            raise CommandError(f"{verb.value} is missing its magnitude")
        return ControlCommand(verb=verb, origin=origin)
    if len(parts) > 2:
        raise CommandError(f"too many fields in {body!r}")
    if verb in BARE_VERBS:
        raise CommandError(f"{verb.value} does not take a magnitude")
    digits = parts[1]
    if not digits or not all("0" <= ch <= "9" for ch in digits):
        raise CommandError(f"non-integer magnitude {digits!r}")
    return ControlCommand(verb=verb, magnitude=int(digits), origin=origin)
