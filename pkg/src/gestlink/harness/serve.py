"""Interactive live mode: the closed loop paced against the wall clock,
with the console bridge attached.

The simulation still runs on the deterministic virtual loop; a pacer
thread advances virtual time in step with real time. A session with a
connected console that never injects anything therefore produces the
same event log, byte for byte, as a headless run of the same scenario.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..edge.bridge import BridgeServer
from ..gesturenet import NetworkParams
from ..perception import PROFILES, GestureClass, synthesize
from ..proto import FramePacket, Origin, parse_command
from ..runtime import ChannelConfig
from .experiment import System, build_system
from .scenarios import Scenario

INJECT_SEQ_BASE = 1 << 31


@dataclass
class LiveSession:
    system: System
    bridge: BridgeServer | None
    thread: threading.Thread
    stop_flag: threading.Event
    record: str | Path | None = None

    @property
    def bridge_port(self) -> int | None:
        return self.bridge.port if self.bridge else None

    def stop(self) -> None:
        self.stop_flag.set()
        self.thread.join(timeout=10)
        if self.bridge:
            self.bridge.stop()
        if self.record is not None:
            self.system.log.dump(self.record)

    def wait(self, timeout: float | None = None) -> None:
        self.thread.join(timeout=timeout)


def _pace(system: System, duration_s: float, stop_flag: threading.Event, speed: float) -> None:
    start = time.monotonic()
    limit_us = int(duration_s * 1e6)
    system.drone.start()
    system.edge.start()
    while not stop_flag.is_set():
        elapsed = (time.monotonic() - start) * speed
        target_us = min(limit_us, int(elapsed * 1e6))
        system.loop.run_until(target_us)
        if target_us >= limit_us:
            break
        time.sleep(0.01)
    system.edge.stop()
    system.drone.stop()
    stop_flag.set()


def start_serve(
    scenario: Scenario,
    model: NetworkParams,
    bridge_port: int = 8080,
    static_dir: str | Path | None = None,
    headless: bool = False,
    record: str | Path | None = None,
    speed: float = 1.0,
) -> LiveSession:
    system = build_system(scenario, model)
    profile = PROFILES[scenario.profile]
    inject_rng = np.random.default_rng(scenario.seed + 0x1E57)
    inject_seq = [INJECT_SEQ_BASE]

    def on_inject(payload: dict) -> None:
        raw_cls = payload.get("class", "palm")
        cls = (
            GestureClass(int(raw_cls))
            if isinstance(raw_cls, (int, float))
            else GestureClass[str(raw_cls).upper()]
        )
        distance = float(payload.get("distance_m", 1.5))
        obs = synthesize(cls, distance, profile, inject_rng)
        seq = inject_seq[0]
        inject_seq[0] += 1
        landmarks = ()
        det_conf = obs.det_conf
        if obs.detected:
            landmarks = tuple(
                (float(np.float32(x)), float(np.float32(y))) for x, y in obs.landmarks
            )
            if "confidence" in payload:
                det_conf = float(payload["confidence"])
        packet = FramePacket(
            seq=seq,
            ts_ms=system.loop.now_ms,
            distance_m=float(np.float32(distance)),
            det_conf=float(np.float32(min(1.0, max(0.0, det_conf)))),
            landmarks=landmarks,
        )
        system.log.append(system.loop.now_us, "inject", seq=seq, cls=int(cls),
                          distance_m=distance, detected=obs.detected)
        system.edge.supervisor.note_frame()
        system.edge.ingest(packet)

    def on_set_channel(payload: dict) -> None:
        name = payload.get("channel", "video")
        if name not in system.channels:
            return
        current = system.channels[name].config
        if "delay_lo_ms" in payload or "delay_hi_ms" in payload:
            cfg = ChannelConfig.uniform(
                float(payload.get("delay_lo_ms", 0.0)),
                float(payload.get("delay_hi_ms", 0.0)),
                drop_prob=float(payload.get("drop_prob", current.drop_prob)),
                seed=current.seed,
            )
        else:
            cfg = ChannelConfig.fixed(
                float(payload.get("delay_ms", current.delay_ms)),
                drop_prob=float(payload.get("drop_prob", current.drop_prob)),
                seed=current.seed,
            )
        system.channels[name].configure(cfg)
        system.log.append(system.loop.now_us, "set_channel", channel=name,
                          delay=cfg.delay, drop_prob=cfg.drop_prob)

    bridge = None
    if not headless:
        bridge = BridgeServer(
            system.loop,
            system.log,
            port=bridge_port,
            static_dir=static_dir,
            on_inject=on_inject,
            on_set_channel=on_set_channel,
            context={
                "name": scenario.name,
                "planned_waypoints": [list(w) for w in scenario.planned_waypoints],
                "geofence_radius_m": scenario.pipeline.geofence_radius_m,
                "duration_s": scenario.duration_s,
                "decision_slot_ms": scenario.pipeline.decision_slot_ms,
            },
        )
        bridge.start()

    for t_s, text in scenario.operator_commands:
        cmd = parse_command(text, origin=Origin.OPERATOR)
        system.loop.call_at(
            int(t_s * 1e6), lambda c=cmd: system.edge.dispatcher.submit(c, operator=True)
        )

    stop_flag = threading.Event()
    thread = threading.Thread(
        target=_pace, args=(system, scenario.duration_s, stop_flag, speed), daemon=True
    )
    thread.start()
    return LiveSession(
        system=system, bridge=bridge, thread=thread, stop_flag=stop_flag, record=record
    )
