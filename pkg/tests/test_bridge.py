"""Console bridge: WebSocket pushes, injection, channel control, and the
no-console-effect guarantee."""

import json
import time
from dataclasses import replace

import pytest

from gestlink.edge.bridge import WsClient
from gestlink.harness import build_scenario
from gestlink.harness.serve import start_serve
from gestlink.proto import BridgeKind


def collect(client, kinds, deadline_s, want=1, predicate=None):
    """Pull messages until `want` of the wanted kinds satisfy predicate."""
    hits = []
    end = time.time() + deadline_s
    while time.time() < end and len(hits) < want:
        try:
            text = client.recv_text(timeout=max(0.1, end - time.time()))
        except (TimeoutError, OSError):
            break
        msg = json.loads(text)
        if msg.get("kind") in kinds and (predicate is None or predicate(msg)):
            hits.append(msg)
    return hits


@pytest.mark.slow
class TestBridge:
    def _session(self, model, duration_s=15.0, scenario_name="hover-hold", seed=31):
        scenario = build_scenario(scenario_name, seed=seed)
        scenario = replace(scenario, duration_s=duration_s, gestures=[], assertions=[])
        return start_serve(scenario, model, bridge_port=0)

    def test_telemetry_pushes_at_least_5hz(self, quick_landmark_model):
        session = self._session(quick_landmark_model)
        try:
            client = WsClient("127.0.0.1", session.bridge_port)
            t0 = time.time()
            hits = collect(client, {"telemetry"}, deadline_s=3.0, want=12)
            elapsed = time.time() - t0
            client.close()
            assert len(hits) / elapsed >= 5.0
        finally:
            session.stop()

    def test_inject_palm_produces_hover_command(self, quick_landmark_model):
        session = self._session(quick_landmark_model, duration_s=20.0)
        try:
            client = WsClient("127.0.0.1", session.bridge_port)
            # wait for takeoff to complete (drone airborne) before injecting
            collect(client, {"telemetry"}, deadline_s=10.0, want=1,
                    predicate=lambda m: m["payload"].get("mode") == "hover")
            inject = {"kind": "inject_gesture",
                      "payload": {"class": "palm", "confidence": 0.95, "distance_m": 1.0}}
            t0 = time.time()
            client.send_text(json.dumps(inject))
            gestures = collect(client, {"gesture_event"}, deadline_s=3.0, want=1)
            assert gestures, "injected gesture never classified"
            commands = collect(
                client, {"latency_sample"}, deadline_s=2.5, want=1,
                predicate=lambda m: m["payload"].get("verb") == "stop",
            )
            took = time.time() - t0
            client.close()
            assert commands, "no stop command followed the Palm injection"
            assert took <= 1.2 + 1.2  # one slot + limiter, with CI slack
        finally:
            session.stop()

    def test_set_channel_raises_stale_drops(self, quick_landmark_model):
        session = self._session(quick_landmark_model, duration_s=14.0)
        try:
            client = WsClient("127.0.0.1", session.bridge_port)
            collect(client, {"telemetry"}, deadline_s=5.0, want=3)
            client.send_text(json.dumps({
                "kind": "set_channel",
                "payload": {"channel": "video", "delay_ms": 400.0},
            }))
            time.sleep(2.5)
            client.close()
            assert session.system.edge.drop_counts["stale"] > 0
        finally:
            session.stop()

    def test_malformed_message_gets_error_reply(self, quick_landmark_model):
        session = self._session(quick_landmark_model)
        try:
            client = WsClient("127.0.0.1", session.bridge_port)
            client.send_text('{"kind": "bogus"}')
            end = time.time() + 3.0
            got_error = False
            while time.time() < end:
                msg = json.loads(client.recv_text(timeout=1.0))
                if "error" in msg:
                    got_error = True
                    break
            client.close()
            assert got_error
            # session persists: pushes still arrive
            client2 = WsClient("127.0.0.1", session.bridge_port)
            assert collect(client2, {"telemetry"}, deadline_s=2.0, want=1)
            client2.close()
        finally:
            session.stop()


@pytest.mark.slow
class TestConsoleNeutrality:
    def test_console_attach_detach_leaves_log_identical(self, quick_landmark_model, tmp_path):
        """A connected, silent console must not perturb the scripted run."""
        scenario = build_scenario("square-path", seed=77)
        scenario = replace(scenario, duration_s=8.0, assertions=[])

        session = start_serve(scenario, quick_landmark_model, bridge_port=0, speed=4.0)
        client = WsClient("127.0.0.1", session.bridge_port)
        collect(client, {"telemetry"}, deadline_s=3.0, want=2)
        client.close()  # disconnect mid-run
        session.wait(timeout=30)
        session.stop()
        with_console = session.system.log.dumps()

        headless = start_serve(
            scenario, quick_landmark_model, bridge_port=0, headless=True, speed=4.0
        )
        headless.wait(timeout=30)
        headless.stop()
        assert headless.system.log.dumps() == with_console
