"""Event loop, channels, and the event log."""

import numpy as np
import pytest

from gestlink.runtime import (
    Channel,
    ChannelConfig,
    EventLog,
    EventLogError,
    RealtimeLoop,
    SimLoop,
    read_event_log,
)


class TestSimLoop:
    def test_events_fire_in_time_order(self):
        loop = SimLoop()
        fired = []
        loop.call_at(300, lambda: fired.append(3))
        loop.call_at(100, lambda: fired.append(1))
        loop.call_at(200, lambda: fired.append(2))
        loop.run_until(1000)
        assert fired == [1, 2, 3]

    def test_ties_fire_in_insertion_order(self):
        loop = SimLoop()
        fired = []
        loop.call_at(100, lambda: fired.append("a"))
        loop.call_at(100, lambda: fired.append("b"))
        loop.run_until(100)
        assert fired == ["a", "b"]

    def test_cancel(self):
        loop = SimLoop()
        fired = []
        handle = loop.call_at(100, lambda: fired.append(1))
        handle.cancel()
        loop.run_until(1000)
        assert fired == []

    def test_nested_scheduling(self):
        loop = SimLoop()
        fired = []
        loop.call_at(100, lambda: loop.call_later(50, lambda: fired.append(loop.now_us)))
        loop.run_until(1000)
        assert fired == [150]

    def test_threadsafe_post_runs_on_drain(self):
        loop = SimLoop()
        fired = []
        loop.post_threadsafe(lambda: fired.append(loop.now_us))
        loop.run_until(10)
        assert fired == [0]


class TestRealtimeLoop:
    def test_scheduling_and_order(self):
        import threading

        loop = RealtimeLoop()
        fired = []
        done = threading.Event()
        loop.call_later(30_000, lambda: (fired.append("late"), done.set()))
        loop.call_later(5_000, lambda: fired.append("early"))
        assert done.wait(2.0)
        loop.stop()
        assert fired == ["early", "late"]


class TestChannel:
    def test_fixed_delay_delivery(self):
        loop = SimLoop()
        got = []
        ch = Channel(loop, ChannelConfig.fixed(6.0, seed=1))
        ch.connect(lambda p: got.append((loop.now_us, p)))
        ch.send("x")
        loop.run_until(100_000)
        assert got == [(6000, "x")]

    def test_uniform_delay_distribution(self):
        # empirical CDF against the configured uniform, max gap < 0.05;
        # each datagram carries its send time so reordering is harmless
        loop = SimLoop()
        delays = []
        ch = Channel(loop, ChannelConfig.uniform(80.0, 120.0, seed=3))
        ch.connect(lambda p: delays.append(loop.now_us - p))
        n = 10_000
        for i in range(n):
            loop.call_at(i * 1000, lambda: ch.send(loop.now_us))
        loop.run_until(n * 1000 + 200_000)
        d = np.array(delays) / 1000.0
        assert len(d) == n
        grid = np.linspace(80, 120, 81)
        empirical = np.searchsorted(np.sort(d), grid, side="right") / n
        theoretical = (grid - 80) / 40.0
        assert np.abs(empirical - theoretical).max() < 0.05

    def test_drop_rate_within_one_percent(self):
        loop = SimLoop()
        got = []
        ch = Channel(loop, ChannelConfig.fixed(1.0, drop_prob=0.2, seed=4))
        ch.connect(got.append)
        n = 10_000
        for i in range(n):
            ch.send(i)
        loop.run_until(10_000_000)
        drop_rate = ch.dropped / n
        assert abs(drop_rate - 0.2) < 0.01
        assert ch.delivered == n - ch.dropped

    def test_deterministic_per_seed(self):
        outcomes = []
        for _ in range(2):
            loop = SimLoop()
            got = []
            ch = Channel(loop, ChannelConfig.uniform(5.0, 50.0, drop_prob=0.3, seed=9))
            ch.connect(lambda p: got.append((loop.now_us, p)))
            for i in range(200):
                ch.send(i)
            loop.run_until(10_000_000)
            outcomes.append(got)
        assert outcomes[0] == outcomes[1]

    def test_live_reconfigure(self):
        loop = SimLoop()
        got = []
        ch = Channel(loop, ChannelConfig.fixed(1.0, seed=0))
        ch.connect(lambda p: got.append(loop.now_us))
        ch.send("a")
        loop.run_until(10_000)
        ch.configure(ChannelConfig.fixed(300.0, seed=0))
        ch.send("b")
        loop.run_until(400_000)
        assert got == [1000, 10_000 + 300_000]


class TestEventLog:
    def test_round_trip_file(self, tmp_path):
        log = EventLog()
        log.append(0, "scenario", name="t", seed=1)
        log.append(5, "telem", x_cm=1, mode="hover")
        path = tmp_path / "events.jsonl"
        log.dump(path)
        events = read_event_log(path)
        assert events == log.events

    def test_corrupt_line_positional_error(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"t_us":0,"ev":"scenario"}\nnot json\n')
        with pytest.raises(EventLogError, match="line 2"):
            read_event_log(path)

    def test_subscribers_see_appends(self):
        log = EventLog()
        seen = []
        log.subscribe(seen.append)
        record = log.append(1, "x", a=2)
        assert seen == [record]
