"""Loop-driven drone component: mailbox, behaviors, telemetry, frames.

State is owned by the tick callback alone. Inbound command datagrams only
append to a mailbox (or echo straight back); the mailbox is drained once
per tick, so the component behaves identically on the virtual and the
wall-clock loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..perception import DetectorProfile, GestureClass, synthesize
from ..proto import (
    CommandError,
    ControlCommand,
    DroneMode,
    FramePacket,
    Telemetry,
    Verb,
    encode_frame_packet,
    encode_telemetry,
    parse_command,
)
from ..runtime import EventLog
from .model import AIRBORNE, DroneState, SimConfig, WindModel, WindProcess, drain_rate, step

ECHO_PREFIX = "echo "

TRANSLATIONS = {
    Verb.UP: (0.0, 0.0, 1.0),
    Verb.DOWN: (0.0, 0.0, -1.0),
    Verb.FORWARD: (1.0, 0.0, 0.0),
    Verb.BACK: (-1.0, 0.0, 0.0),
    Verb.LEFT: (0.0, 1.0, 0.0),
    Verb.RIGHT: (0.0, -1.0, 0.0),
}


@dataclass(frozen=True)
class GestureWindow:
    start_s: float
    end_s: float
    gesture: GestureClass
    distance_m: float


class ScheduledGestures:
    """Time-windowed gesture feed for scripted scenarios."""

    def __init__(self, windows: list[GestureWindow], default_distance_m: float = 1.5) -> None:
        self.windows = sorted(windows, key=lambda w: w.start_s)
        self.default_distance_m = default_distance_m

    def active(self, t_s: float) -> tuple[GestureClass, float] | None:
        for w in self.windows:
            if w.start_s <= t_s < w.end_s:
                return w.gesture, w.distance_m
        return None


class DroneSim:
    def __init__(
        self,
        loop,
        config: SimConfig,
        wind: WindModel,
        log: EventLog,
        profile: DetectorProfile,
        gestures: ScheduledGestures | None = None,
        battery_start: float = 100.0,
        raster_side: int | None = None,
        background_noise: float = 0.0,
    ) -> None:
        self.loop = loop
        self.config = config
        self.log = log
        self.profile = profile
        self.gestures = gestures or ScheduledGestures([])
        self.raster_side = raster_side
        self.background_noise = background_noise
        self.state = DroneState(battery_pct=battery_start)
        seeds = np.random.SeedSequence(config.seed).spawn(3)
        self._wind = WindProcess(wind, np.random.default_rng(seeds[0]))
        self._frame_rng = np.random.default_rng(seeds[1])
        self._mailbox: list[str] = []
        self._frame_seq = 0
        self._frame_index = 0
        self._tick_index = 0
        self._telemetry_index = 0
        self._battery_landed = False
        self._t0_us = 0
        self.frame_tx = None  # callables set by the wiring layer
        self.telemetry_tx = None
        self.reply_tx = None
        self._running = False

    # wiring -------------------------------------------------------------
    def start(self) -> None:
        self._running = True
        self._t0_us = self.loop.now_us
        self._schedule_tick()
        self._schedule_telemetry()
        self._schedule_frame()

    def stop(self) -> None:
        self._running = False

    # inbound ------------------------------------------------------------
    def on_command_datagram(self, text: str) -> None:
        """Socket-side entry: echoes answer immediately, commands queue."""
        if text.startswith(ECHO_PREFIX):
            if self.reply_tx:
                self.reply_tx(text)
            return
        self._mailbox.append(text)

    # scheduling ---------------------------------------------------------
    def _schedule_tick(self) -> None:
        if not self._running:
            return
        self._tick_index += 1
        t_us = self._t0_us + int(round(self._tick_index * 1e6 / self.config.tick_hz))
        self.loop.call_at(t_us, self._tick)

    def _schedule_telemetry(self) -> None:
        if not self._running:
            return
        self._telemetry_index += 1
        t_us = self._t0_us + int(round(self._telemetry_index * 1e6 / self.config.telemetry_hz))
        self.loop.call_at(t_us, self._telemetry_tick)

    def _schedule_frame(self) -> None:
        if not self._running:
            return
        self._frame_index += 1
        t_us = self._t0_us + int(round(self._frame_index * 1e6 / self.config.frame_fps))
        self.loop.call_at(t_us, self._frame_tick)

    # core tick ----------------------------------------------------------
    def _tick(self) -> None:
        if not self._running:
            return
        for text in self._mailbox:
            self._execute(text)
        self._mailbox.clear()
        self._battery_guard()
        dt = 1.0 / self.config.tick_hz
        wind_vec = self._wind.sample(dt)
        step(self.state, wind_vec, dt, self.config)
        self.state.sim_time_ms = self.loop.now_ms
        self._update_mode()
        self._schedule_tick()

    def _update_mode(self) -> None:
        s, cfg = self.state, self.config
        err = float(np.linalg.norm(s.setpoint - s.position))
        speed = float(np.linalg.norm(s.velocity))
        if s.mode == DroneMode.FLYING and err < cfg.settle_enter_m and speed < 0.15:
            s.transition(DroneMode.HOVER)
            self.log.append(self.loop.now_us, "mode", mode=s.mode.value)
        elif s.mode == DroneMode.HOVER and err > cfg.settle_exit_m:
            s.transition(DroneMode.FLYING)
            self.log.append(self.loop.now_us, "mode", mode=s.mode.value)
        elif s.mode == DroneMode.RTH:
            horiz = math.hypot(s.position[0] - s.home[0], s.position[1] - s.home[1])
            if horiz < 0.1:
                s.transition(DroneMode.LANDING)
                self.log.append(self.loop.now_us, "mode", mode=s.mode.value)
        elif s.mode == DroneMode.LANDING and s.position[2] <= 0.02:
            s.position[2] = 0.0
            s.velocity[:] = 0.0
            s.setpoint[:] = s.position
            s.transition(DroneMode.GROUNDED)
            self.log.append(self.loop.now_us, "mode", mode=s.mode.value)

    def _battery_guard(self) -> None:
        s = self.state
        if (
            not self._battery_landed
            and s.mode in AIRBORNE
            and s.battery_pct <= self.config.battery_land_pct
        ):
            self._battery_landed = True
            self._mailbox.clear()
            s.transition(DroneMode.LANDING)
            self.log.append(
                self.loop.now_us,
                "failsafe_drone",
                cause="battery",
                battery_pct=round(s.battery_pct, 3),
            )

    # command execution ----------------------------------------------------
    def _execute(self, text: str) -> None:
        try:
            cmd = parse_command(text)
        except CommandError as exc:
            self._reply(f"error {exc}")
            self.log.append(self.loop.now_us, "cmd_applied", verb="?", raw=text.strip(),
                            result="nak", reason=str(exc))
            return
        ok, reason = self._apply(cmd)
        self.log.append(
            self.loop.now_us,
            "cmd_applied",
            verb=cmd.verb.value,
            magnitude=cmd.magnitude,
            result="ok" if ok else "nak",
            reason=reason,
            mode=self.state.mode.value,
        )
        self._reply("ok" if ok else f"error {reason}")

    def _apply(self, cmd: ControlCommand) -> tuple[bool, str]:
        s, cfg = self.state, self.config
        verb = cmd.verb
        if verb == Verb.TAKEOFF:
            if s.mode != DroneMode.GROUNDED:
                return False, "not grounded"
            if s.battery_pct <= cfg.battery_land_pct:
                return False, "battery low"
            s.home = s.position.copy()
            s.setpoint = s.position + np.array([0.0, 0.0, cfg.takeoff_alt_m])
            s.transition(DroneMode.HOVER)
            self._battery_landed = False
            return True, ""
        if verb == Verb.LAND:
            if s.mode not in AIRBORNE:
                return False, f"cannot land while {s.mode.value}"
            s.transition(DroneMode.LANDING)
            return True, ""
        if verb == Verb.STOP:
            if s.mode not in (DroneMode.HOVER, DroneMode.FLYING):
                return False, f"cannot stop while {s.mode.value}"
            s.setpoint = s.position.copy()
            s.setpoint[2] = min(max(s.setpoint[2], cfg.altitude_band[0]), cfg.altitude_band[1])
            return True, ""
        if verb == Verb.RTH:
            if s.mode not in (DroneMode.HOVER, DroneMode.FLYING):
                return False, f"cannot rth while {s.mode.value}"
            s.transition(DroneMode.RTH)
            return True, ""
        if verb in (Verb.CW, Verb.CCW):
            if s.mode not in (DroneMode.HOVER, DroneMode.FLYING):
                return False, f"cannot rotate while {s.mode.value}"
            sign = -1.0 if verb == Verb.CW else 1.0
            s.yaw_setpoint_deg += sign * float(cmd.magnitude)
            return True, ""
        if verb in TRANSLATIONS:
            if s.mode not in (DroneMode.HOVER, DroneMode.FLYING):
                return False, f"cannot translate while {s.mode.value}"
            dist = float(cmd.magnitude) / 100.0
            bx, by, bz = TRANSLATIONS[verb]
            yaw = math.radians(s.yaw_deg)
            cos_y, sin_y = math.cos(yaw), math.sin(yaw)
            world = np.array(
                [bx * cos_y - by * sin_y, bx * sin_y + by * cos_y, bz]
            )
            s.setpoint = s.setpoint + world * dist
            s.setpoint[2] = min(max(s.setpoint[2], cfg.altitude_band[0]), cfg.altitude_band[1])
            if s.mode == DroneMode.HOVER:
                s.transition(DroneMode.FLYING)
            return True, ""
        return False, f"unsupported verb {verb.value}"

    def _reply(self, text: str) -> None:
        if self.reply_tx:
            self.reply_tx(text + "\n" if not text.endswith("\n") else text)

    # outbound ticks -------------------------------------------------------
    def _telemetry_tick(self) -> None:
        if not self._running:
            return
        s = self.state
        t = Telemetry(
            x_cm=int(round(s.position[0] * 100)),
            y_cm=int(round(s.position[1] * 100)),
            z_cm=int(round(s.position[2] * 100)),
            yaw_deg=int(round(s.yaw_deg)) % 360,
            vgx=int(round(s.velocity[0] * 100)),
            vgy=int(round(s.velocity[1] * 100)),
            vgz=int(round(s.velocity[2] * 100)),
            bat=int(min(100, max(0, math.floor(s.battery_pct)))),
            mode=s.mode,
            time_ms=self.loop.now_ms,
        )
        self.log.append(
            self.loop.now_us,
            "telem",
            x_cm=t.x_cm,
            y_cm=t.y_cm,
            z_cm=t.z_cm,
            yaw_deg=t.yaw_deg,
            bat=t.bat,
            mode=t.mode.value,
            sp_x_cm=int(round(s.setpoint[0] * 100)),
            sp_y_cm=int(round(s.setpoint[1] * 100)),
            sp_z_cm=int(round(s.setpoint[2] * 100)),
            yaw_sp_deg=int(round(s.yaw_setpoint_deg)) % 360,
        )
        if self.telemetry_tx:
            self.telemetry_tx(encode_telemetry(t))
        self._schedule_telemetry()

    def _frame_tick(self) -> None:
        if not self._running:
            return
        now_s = (self.loop.now_us - self._t0_us) / 1e6
        active = self.gestures.active(now_s)
        seq = self._frame_seq
        self._frame_seq += 1
        if active is None:
            distance = self.gestures.default_distance_m
            det_conf = float(self._frame_rng.uniform(0.0, 0.95) * self.profile.conf_floor)
            packet = FramePacket(
                seq=seq,
                ts_ms=self.loop.now_ms,
                distance_m=float(np.float32(distance)),
                det_conf=float(np.float32(det_conf)),
            )
            cls_val = -1
        else:
            gesture, distance = active
            obs = synthesize(
                gesture,
                distance,
                self.profile,
                self._frame_rng,
                raster_side=self.raster_side,
                background_noise=self.background_noise,
            )
            raster = b""
            if obs.detected and obs.raster is not None:
                raster = np.clip(obs.raster * 255.0, 0, 255).astype(np.uint8).tobytes()
            landmarks = ()
            if obs.detected:
                landmarks = tuple(
                    (float(np.float32(x)), float(np.float32(y))) for x, y in obs.landmarks
                )
            packet = FramePacket(
                seq=seq,
                ts_ms=self.loop.now_ms,
                distance_m=float(np.float32(distance)),
                det_conf=float(np.float32(obs.det_conf)),
                landmarks=landmarks,
                raster=raster,
            )
            cls_val = int(gesture)
        self.log.append(
            self.loop.now_us,
            "frame_sent",
            seq=seq,
            cls=cls_val,
            detected=packet.n_landmarks > 0,
            distance_m=round(packet.distance_m, 4),
        )
        if self.frame_tx:
            self.frame_tx(encode_frame_packet(packet))
        self._schedule_frame()
