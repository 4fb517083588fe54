"""Replayable JSON-lines event log.

Every run appends events as one compact JSON object per line with sorted
keys; identical event sequences therefore produce byte-identical files.
Metrics are computed from these events only, which is what makes offline
replay exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterator


class EventLogError(ValueError):
    pass


class EventLog:
    def __init__(self) -> None:
        self.events: list[dict[str, Any]] = []
        self._subscribers: list = []

    def append(self, t_us: int, ev: str, **fields: Any) -> dict[str, Any]:
        record = {"t_us": int(t_us), "ev": ev, **fields}
        self.events.append(record)
        for fn in self._subscribers:
            fn(record)
        return record

    def subscribe(self, fn) -> None:
        """fn(record) runs synchronously on every append."""
        self._subscribers.append(fn)

    def dump(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for record in self.events:
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
                fh.write("\n")

    def dumps(self) -> str:
        return "".join(
            json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in self.events
        )


def read_event_log(path: str | Path) -> list[dict[str, Any]]:
    events = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EventLogError(f"corrupt event log at line {lineno}: {exc}") from None
            if not isinstance(record, dict) or "ev" not in record or "t_us" not in record:
                raise EventLogError(f"corrupt event log at line {lineno}: not an event record")
            events.append(record)
    return events


def iter_events(events: list[dict[str, Any]], ev: str) -> Iterator[dict[str, Any]]:
    return (r for r in events if r["ev"] == ev)
