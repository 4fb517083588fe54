"""Failsafe supervision: battery, link loss, geofence, low confidence.

One mode at a time with a strict priority order; a lower-priority
condition never preempts a higher one. Recovery back to normal requires
one clean decision slot of the triggering condition being absent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..proto import ControlCommand, Origin, Verb
from ..runtime import EventLog
from .config import PipelineConfig


class FailsafeMode(enum.Enum):
    NORMAL = "normal"
    HOVER_LOWCONF = "hover_lowconf"
    GEOFENCE_HOLD = "geofence_hold"
    RTH_LINKLOSS = "rth_linkloss"
    BATTERY_LANDING = "battery_landing"


PRIORITY = {
    FailsafeMode.NORMAL: 0,
    FailsafeMode.HOVER_LOWCONF: 1,
    FailsafeMode.GEOFENCE_HOLD: 2,
    FailsafeMode.RTH_LINKLOSS: 3,
    FailsafeMode.BATTERY_LANDING: 4,
}


@dataclass
class FailsafeState:
    mode: FailsafeMode = FailsafeMode.NORMAL
    entered_at_us: int = 0
    cause: str = ""


class Supervisor:
    def __init__(self, loop, config: PipelineConfig, dispatcher, log: EventLog) -> None:
        self.loop = loop
        self.config = config
        self.dispatcher = dispatcher
        self.log = log
        self.state = FailsafeState()
        self.last_frame_us: int | None = None
        self.last_telemetry_us: int | None = None
        self.last_battery: int | None = None
        self.last_position_cm: tuple[int, int] | None = None
        self.home_cm: tuple[int, int] | None = None
        self.airborne = False
        self._lowconf_requested = False
        self._geofence_rth_sent = False
        self._clean_since_us: int | None = None
        self._running = False

    # observations ---------------------------------------------------------
    def note_frame(self) -> None:
        self.last_frame_us = self.loop.now_us

    def note_telemetry(self, x_cm: int, y_cm: int, bat: int, mode: str) -> None:
        self.last_telemetry_us = self.loop.now_us
        self.last_battery = bat
        self.last_position_cm = (x_cm, y_cm)
        if self.home_cm is None:
            self.home_cm = (x_cm, y_cm)
        self.airborne = mode in ("hover", "flying", "rth")

    def note_lowconf_slot(self) -> None:
        """The decider saw gestures but none were confident this slot."""
        self._lowconf_requested = True

    # supervision ------------------------------------------------------------
    def start(self) -> None:
        self._running = True
        self._schedule()

    def stop(self) -> None:
        self._running = False

    def _schedule(self) -> None:
        if self._running:
            self.loop.call_later(self.config.supervisor_tick_ms * 1000, self._tick)

    def _tick(self) -> None:
        if not self._running:
            return
        self.evaluate()
        self._schedule()

    def _condition(self) -> tuple[FailsafeMode, str]:
        """Highest-priority condition currently true."""
        cfg = self.config
        now = self.loop.now_us
        if self.last_battery is not None and self.last_battery <= cfg.battery_land_pct:
            return FailsafeMode.BATTERY_LANDING, f"battery {self.last_battery}%"
        seen = [t for t in (self.last_frame_us, self.last_telemetry_us) if t is not None]
        newest = max(seen) if seen else 0
        if now - newest > cfg.link_timeout_ms * 1000:
            return FailsafeMode.RTH_LINKLOSS, f"silence {(now - newest) // 1000} ms"
        if self.last_position_cm is not None and self.home_cm is not None and self.airborne:
            dx = (self.last_position_cm[0] - self.home_cm[0]) / 100.0
            dy = (self.last_position_cm[1] - self.home_cm[1]) / 100.0
            if math.hypot(dx, dy) > cfg.geofence_radius_m:
                return FailsafeMode.GEOFENCE_HOLD, f"range {math.hypot(dx, dy):.1f} m"
        if self._lowconf_requested:
            return FailsafeMode.HOVER_LOWCONF, "low-confidence slot"
        return FailsafeMode.NORMAL, ""

    def evaluate(self) -> None:
        cond, cause = self._condition()
        self._lowconf_requested = False
        now = self.loop.now_us
        current = self.state.mode
        if PRIORITY[cond] > PRIORITY[current]:
            self._enter(cond, cause)
            return
        if cond == current:
            self._clean_since_us = None
            if (
                current == FailsafeMode.GEOFENCE_HOLD
                and not self._geofence_rth_sent
                and now - self.state.entered_at_us >= self.config.decision_slot_ms * 1000
            ):
                # still outside after a slot: stop did not cut it, go home
                self._geofence_rth_sent = True
                self._dispatch(ControlCommand(Verb.RTH, origin=Origin.FAILSAFE), "geofence_rth")
            return
        # condition is lower priority than the active state: recovery path
        if current == FailsafeMode.NORMAL:
            return
        if self._clean_since_us is None:
            self._clean_since_us = now
        elif now - self._clean_since_us >= self.config.decision_slot_ms * 1000:
            self._clean_since_us = None
            self.state = FailsafeState(mode=FailsafeMode.NORMAL, entered_at_us=now, cause="recovered")
            self.log.append(now, "failsafe", mode=self.state.mode.value, cause="recovered")

    def _enter(self, mode: FailsafeMode, cause: str) -> None:
        now = self.loop.now_us
        self.state = FailsafeState(mode=mode, entered_at_us=now, cause=cause)
        self._clean_since_us = None
        self.log.append(now, "failsafe", mode=mode.value, cause=cause)
        if mode == FailsafeMode.BATTERY_LANDING:
            self._dispatch(ControlCommand(Verb.LAND, origin=Origin.FAILSAFE), "battery")
        elif mode == FailsafeMode.RTH_LINKLOSS:
            self._dispatch(ControlCommand(Verb.RTH, origin=Origin.FAILSAFE), "linkloss")
        elif mode == FailsafeMode.GEOFENCE_HOLD:
            self._geofence_rth_sent = False
            self._dispatch(ControlCommand(Verb.STOP, origin=Origin.FAILSAFE), "geofence")
        # HOVER_LOWCONF's stop command is dispatched by the decider itself

    def _dispatch(self, command: ControlCommand, reason: str) -> None:
        self.dispatcher.submit(command, failsafe=reason)
