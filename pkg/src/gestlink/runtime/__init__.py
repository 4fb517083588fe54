"""Shared runtime: event loops, impaired channels, and the event log."""

from .loop import RealtimeLoop, SimLoop
from .channel import Channel, ChannelConfig
from .eventlog import EventLog, EventLogError, iter_events, read_event_log

__all__ = [
    "Channel",
    "ChannelConfig",
    "EventLog",
    "EventLogError",
    "RealtimeLoop",
    "SimLoop",
    "iter_events",
    "read_event_log",
]
