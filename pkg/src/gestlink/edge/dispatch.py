"""Token-bucket command dispatcher: at most one datagram per interval."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..proto import ControlCommand, Origin, encode_command
from ..runtime import EventLog


@dataclass
class QueuedCommand:
    cmd_id: int
    command: ControlCommand
    meta: dict


class Dispatcher:
    """Spaces command sends >= the limiter interval, queues the excess.

    Failsafe-origin commands jump to the queue head; on overflow the
    oldest gesture-origin entry is discarded first (a stale gesture is
    worthless, a stale failsafe is not).
    """

    def __init__(
        self,
        loop,
        send_fn,
        log: EventLog,
        max_rate_hz: float = 10.0,
        queue_capacity: int = 8,
    ) -> None:
        self.loop = loop
        self.send_fn = send_fn
        self.log = log
        self.interval_us = int(round(1e6 / max_rate_hz))
        self.queue_capacity = queue_capacity
        self.queue: list[QueuedCommand] = []
        self.next_allowed_us = 0
        self.discarded = 0
        self.sent_times_us: list[int] = []
        self._ids = itertools.count()
        self._timer_set = False

    def submit(self, command: ControlCommand, **meta) -> str:
        """Returns 'sent', 'queued', or 'rejected'."""
        item = QueuedCommand(cmd_id=next(self._ids), command=command, meta=meta)
        now = self.loop.now_us
        if not self.queue and now >= self.next_allowed_us:
            self._send(item)
            return "sent"
        if command.origin == Origin.FAILSAFE:
            self.queue.insert(0, item)
        else:
            self.queue.append(item)
        result = "queued"
        if len(self.queue) > self.queue_capacity:
            victim_idx = next(
                (i for i, q in enumerate(self.queue) if q.command.origin != Origin.FAILSAFE),
                len(self.queue) - 1,
            )
            victim = self.queue.pop(victim_idx)
            self.discarded += 1
            self.log.append(
                self.loop.now_us,
                "cmd_discarded",
                cmd_id=victim.cmd_id,
                verb=victim.command.verb.value,
                origin=victim.command.origin.value,
            )
            if victim is item:
                result = "rejected"
        self._arm_timer()
        return result

    def _arm_timer(self) -> None:
        if self.queue and not self._timer_set:
            self._timer_set = True
            when = max(self.next_allowed_us, self.loop.now_us)
            self.loop.call_at(when, self._drain)

    def _drain(self) -> None:
        self._timer_set = False
        if not self.queue:
            return
        if self.loop.now_us < self.next_allowed_us:
            self._arm_timer()
            return
        self._send(self.queue.pop(0))
        self._arm_timer()

    def _send(self, item: QueuedCommand) -> None:
        now = self.loop.now_us
        self.next_allowed_us = now + self.interval_us
        self.sent_times_us.append(now)
        cmd = item.command
        self.log.append(
            now,
            "cmd_sent",
            cmd_id=item.cmd_id,
            verb=cmd.verb.value,
            magnitude=cmd.magnitude,
            origin=cmd.origin.value,
            **item.meta,
        )
        wire = encode_command(cmd)
        try:
            self.send_fn(wire)
        except OSError:
            # retry once after a beat; the link supervisor catches anything
            # persistent through the resulting traffic silence
            self.loop.call_later(50_000, lambda: self._retry(item.cmd_id, wire))

    def _retry(self, cmd_id: int, wire: str) -> None:
        try:
            self.send_fn(wire)
        except OSError as exc:
            self.log.append(
                self.loop.now_us, "cmd_send_failure", cmd_id=cmd_id, detail=str(exc)
            )
