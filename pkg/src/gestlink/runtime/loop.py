"""Event loops driving the closed-loop components.

Two interchangeable implementations share one scheduling interface, so the
drone sim and edge server run identically under both:

* SimLoop: deterministic discrete-event scheduler on a virtual clock
  (integer microseconds). Events fire in (time, insertion) order; a run
  with the same seeds replays bit-identically.
* RealtimeLoop: the same semantics against the wall clock, with a single
  dispatcher thread so component state stays single-owner. Socket reader
  threads hand work over with post().
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from typing import Callable


class Cancelled:
    __slots__ = ("flag",)

    def __init__(self) -> None:
        self.flag = False

    def cancel(self) -> None:
        self.flag = True


class SimLoop:
    def __init__(self) -> None:
        self._now_us = 0
        self._heap: list[tuple[int, int, Cancelled, Callable[[], None]]] = []
        self._seq = itertools.count()
        self._external: list[Callable[[], None]] = []
        self._external_lock = threading.Lock()

    @property
    def now_us(self) -> int:
        return self._now_us

    @property
    def now_ms(self) -> int:
        return self._now_us // 1000

    def call_at(self, t_us: int, fn: Callable[[], None]) -> Cancelled:
        if t_us < self._now_us:
            t_us = self._now_us
        handle = Cancelled()
        heapq.heappush(self._heap, (int(t_us), next(self._seq), handle, fn))
        return handle

    def call_later(self, delay_us: int, fn: Callable[[], None]) -> Cancelled:
        return self.call_at(self._now_us + max(0, int(delay_us)), fn)

    def post(self, fn: Callable[[], None]) -> Cancelled:
        return self.call_later(0, fn)

    def post_threadsafe(self, fn: Callable[[], None]) -> None:
        """Hand work in from another thread; it runs at the virtual 'now'
        the next time run_until is entered (used by the paced live mode)."""
        with self._external_lock:
            self._external.append(fn)

    def _drain_external(self) -> None:
        with self._external_lock:
            pending, self._external = self._external, []
        for fn in pending:
            self.post(fn)

    def run_until(self, t_us: int) -> None:
        """Execute every event scheduled at or before t_us, then land there."""
        self._drain_external()
        while self._heap and self._heap[0][0] <= t_us:
            when, _, handle, fn = heapq.heappop(self._heap)
            self._now_us = when
            if not handle.flag:
                fn()
        self._now_us = max(self._now_us, t_us)


class RealtimeLoop:
    """Wall-clock scheduler running callbacks on one dispatcher thread.

    Uses epoch time so two processes on one host (drone and edge in UDP
    mode) stamp packets against a shared clock base.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[int, int, Cancelled, Callable[[], None]]] = []
        self._seq = itertools.count()
        self._cond = threading.Condition()
        self._stopping = False
        self._thread = threading.Thread(target=self._run, name="loop", daemon=True)
        self._thread.start()

    @property
    def now_us(self) -> int:
        return time.time_ns() // 1000

    @property
    def now_ms(self) -> int:
        return self.now_us // 1000

    def call_at(self, t_us: int, fn: Callable[[], None]) -> Cancelled:
        handle = Cancelled()
        with self._cond:
            heapq.heappush(self._heap, (int(t_us), next(self._seq), handle, fn))
            self._cond.notify()
        return handle

    def call_later(self, delay_us: int, fn: Callable[[], None]) -> Cancelled:
        return self.call_at(self.now_us + max(0, int(delay_us)), fn)

    def post(self, fn: Callable[[], None]) -> Cancelled:
        return self.call_later(0, fn)

    def post_threadsafe(self, fn: Callable[[], None]) -> None:
        self.post(fn)

    def _run(self) -> None:
        while True:
            with self._cond:
                while True:
                    if self._stopping:
                        return
                    if not self._heap:
                        self._cond.wait()
                        continue
                    wait_us = self._heap[0][0] - self.now_us
                    if wait_us <= 0:
                        _, _, handle, fn = heapq.heappop(self._heap)
                        break
                    self._cond.wait(timeout=wait_us / 1e6)
            if not handle.flag:
                try:
                    fn()
                except Exception:  # keep the dispatcher alive; components log their own errors
                    import traceback

                    traceback.print_exc()

    def stop(self) -> None:
        with self._cond:
            self._stopping = True
            self._cond.notify()
        self._thread.join(timeout=5)
