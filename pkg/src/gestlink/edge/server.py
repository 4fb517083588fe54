"""The edge node: frame intake, classification, slot decisions, failsafes.

Roles communicate only through the loop: the receiver enqueues decoded
frames, one classifier worker drains the queue (its virtual processing
time comes from the seeded process model), the slot timer decides once a
second, the dispatcher rate-limits sends, and the supervisor watches
timestamps. All state is touched from loop callbacks only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gesturenet import NetworkParams, forward_batch
from ..perception import GestureClass, normalize_landmarks
from ..proto import (
    DecodeError,
    FramePacket,
    TelemetryError,
    decode_frame_packet,
    parse_telemetry,
)
from ..runtime import EventLog
from .config import PipelineConfig
from .dispatch import Dispatcher
from .pipeline import Decision, DecisionKind, GestureEvent, command_for, decide
from .supervisor import Supervisor

ECHO_PREFIX = "echo "


@dataclass
class QueuedFrame:
    packet: FramePacket
    t_received_us: int


class EdgeServer:
    def __init__(
        self,
        loop,
        config: PipelineConfig,
        model: NetworkParams,
        log: EventLog,
        raster_model: NetworkParams | None = None,
    ) -> None:
        # a wrong model shape must fail here, not on the first frame
        if model.input_shape != (42,):
            raise ValueError(
                f"edge pipeline needs the 42-feature landmark front-end, "
                f"got input shape {model.input_shape}"
            )
        self.loop = loop
        self.config = config
        self.model = model
        self.raster_model = raster_model
        self.log = log
        self.command_tx = None  # set by wiring
        self.dispatcher: Dispatcher | None = None
        self.supervisor: Supervisor | None = None
        self.queue: list[QueuedFrame] = []
        self.slot_events: list[GestureEvent] = []
        self.drop_counts = {"stale": 0, "queue_full": 0, "decode_error": 0}
        self.frames_received = 0
        self.no_detections = 0
        self._busy = False
        self._slot_index = 0
        self._echo_index = 0
        self._echo_sent_us: dict[int, int] = {}
        self._t0_us = 0
        self._rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
        self._running = False
        self._gesture_listeners: list = []

    # wiring ---------------------------------------------------------------
    def attach(self, command_tx) -> None:
        self.command_tx = command_tx
        self.dispatcher = Dispatcher(
            self.loop,
            command_tx,
            self.log,
            max_rate_hz=self.config.max_command_rate_hz,
            queue_capacity=self.config.command_queue_capacity,
        )
        self.supervisor = Supervisor(self.loop, self.config, self.dispatcher, self.log)

    def start(self) -> None:
        self._running = True
        self._t0_us = self.loop.now_us
        self.supervisor.start()
        self._schedule_slot()
        self._schedule_echo()

    def stop(self) -> None:
        self._running = False
        self.supervisor.stop()

    def on_gesture_event(self, fn) -> None:
        self._gesture_listeners.append(fn)

    # frame path -----------------------------------------------------------
    def on_frame_datagram(self, blob: bytes) -> None:
        try:
            packet = decode_frame_packet(blob)
        except DecodeError as exc:
            self.drop_counts["decode_error"] += 1
            self.log.append(self.loop.now_us, "frame_drop", reason="decode_error", detail=str(exc))
            return
        self.frames_received += 1
        self.supervisor.note_frame()
        self.ingest(packet)

    def ingest(self, packet: FramePacket) -> None:
        now_ms = self.loop.now_ms
        age_ms = now_ms - packet.ts_ms
        if age_ms > self.config.stale_frame_ms:
            self.drop_counts["stale"] += 1
            self.log.append(self.loop.now_us, "frame_drop", reason="stale", seq=packet.seq,
                            age_ms=int(age_ms))
            return
        self.log.append(self.loop.now_us, "frame_recv", seq=packet.seq, ts_ms=packet.ts_ms)
        self.queue.append(QueuedFrame(packet=packet, t_received_us=self.loop.now_us))
        if len(self.queue) > self.config.frame_queue_capacity:
            victim = self.queue.pop(0)  # freshest wins: oldest queued goes
            self.drop_counts["queue_full"] += 1
            self.log.append(
                self.loop.now_us, "frame_drop", reason="queue_full", seq=victim.packet.seq
            )
        self._pump()

    def _pump(self) -> None:
        if self._busy or not self.queue:
            return
        self._busy = True
        item = self.queue.pop(0)
        process_us = self._draw_process_us()
        self.loop.call_later(process_us, lambda: self._finish_classify(item, process_us))

    def _draw_process_us(self) -> int:
        pm = self.config.process_model
        if pm.kind == "fixed":
            ms = pm.fixed_ms
        else:
            ms = float(self._rng.uniform(pm.lo_ms, pm.hi_ms))
        return int(round(ms * 1000))

    def classify(self, packet: FramePacket) -> tuple[GestureClass, float] | None:
        """Inference on one packet; None when there is nothing to classify."""
        if packet.n_landmarks == 0:
            return None
        feats = normalize_landmarks(np.array(packet.landmarks))
        probs, _ = forward_batch(self.model, feats[None, :])
        cls = int(probs[0].argmax())
        return GestureClass(cls), float(probs[0][cls])

    def _finish_classify(self, item: QueuedFrame, process_us: int) -> None:
        self._busy = False
        packet = item.packet
        result = self.classify(packet)
        if result is None:
            self.no_detections += 1
            self.log.append(self.loop.now_us, "no_detection", seq=packet.seq)
        else:
            cls, confidence = result
            event = GestureEvent(
                cls=cls,
                confidence=confidence,
                frame_seq=packet.seq,
                t_captured_us=packet.ts_ms * 1000,
                t_received_us=item.t_received_us,
                t_classified_us=self.loop.now_us,
                distance_m=packet.distance_m,
            )
            self.slot_events.append(event)
            self.log.append(
                self.loop.now_us,
                "classified",
                seq=packet.seq,
                cls=int(cls),
                confidence=round(confidence, 6),
                t_captured_us=event.t_captured_us,
                t_received_us=event.t_received_us,
                process_us=process_us,
                distance_m=round(packet.distance_m, 4),
            )
            for fn in self._gesture_listeners:
                fn(event)
        self._pump()

    # decision slots ---------------------------------------------------------
    def _schedule_slot(self) -> None:
        if not self._running:
            return
        self._slot_index += 1
        t_us = self._t0_us + self._slot_index * self.config.decision_slot_ms * 1000
        self.loop.call_at(t_us, self._slot_boundary)

    def _slot_boundary(self) -> None:
        if not self._running:
            return
        events = self.slot_events
        self.slot_events = []
        decision = decide(events, self.config)
        self.log.append(
            self.loop.now_us,
            "decision",
            slot=self._slot_index,
            kind=decision.kind.value,
            winner=int(decision.winner) if decision.winner is not None else -1,
            n_events=decision.n_events,
            n_confident=decision.n_confident,
        )
        command = command_for(decision, self.config)
        if command is not None:
            meta = {}
            if decision.kind == DecisionKind.COMMAND:
                src = decision.source_event
                meta = dict(
                    gesture_seq=src.frame_seq,
                    t_captured_us=src.t_captured_us,
                    t_received_us=src.t_received_us,
                    t_classified_us=src.t_classified_us,
                )
            else:
                self.supervisor.note_lowconf_slot()
                self.supervisor.evaluate()
                meta = dict(failsafe="lowconf")
            self.dispatcher.submit(command, **meta)
        self._schedule_slot()

    # telemetry + echo ---------------------------------------------------------
    def on_telemetry_datagram(self, text: str) -> None:
        try:
            t = parse_telemetry(text)
        except TelemetryError as exc:
            self.log.append(self.loop.now_us, "telemetry_error", detail=str(exc))
            return
        self.supervisor.note_telemetry(t.x_cm, t.y_cm, t.bat, t.mode.value)
        self.log.append(
            self.loop.now_us, "telem_recv", x_cm=t.x_cm, y_cm=t.y_cm, z_cm=t.z_cm,
            bat=t.bat, mode=t.mode.value, time_ms=t.time_ms,
        )

    def on_reply_datagram(self, text: str) -> None:
        text = text.strip()
        if text.startswith(ECHO_PREFIX):
            try:
                token = int(text[len(ECHO_PREFIX):])
            except ValueError:
                return
            sent = self._echo_sent_us.pop(token, None)
            if sent is not None:
                rtt_us = self.loop.now_us - sent
                self.log.append(self.loop.now_us, "echo_rtt", rtt_us=rtt_us)
            return
        self.log.append(self.loop.now_us, "cmd_reply", ok=text == "ok", text=text)

    def _schedule_echo(self) -> None:
        if not self._running:
            return
        self._echo_index += 1
        t_us = self._t0_us + self._echo_index * self.config.echo_interval_ms * 1000
        self.loop.call_at(t_us, self._echo_tick)

    def _echo_tick(self) -> None:
        if not self._running:
            return
        token = self._echo_index
        self._echo_sent_us[token] = self.loop.now_us
        if self.command_tx:
            self.command_tx(f"echo {token}\n")
        self._schedule_echo()
