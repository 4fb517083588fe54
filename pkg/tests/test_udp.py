"""Real-socket mode: drone subprocess + edge over loopback UDP."""

from dataclasses import replace

import pytest

from gestlink.harness import build_scenario
from gestlink.harness.udp import free_udp_ports, run_experiment_udp
from gestlink.runtime import ChannelConfig


@pytest.mark.slow
class TestUdpMode:
    def test_short_closed_loop_over_udp(self, quick_landmark_model, tmp_path):
        scenario = build_scenario("latency-default", seed=21)
        scenario = replace(
            scenario,
            duration_s=8.0,
            assertions=[],
            # light impairment keeps the wall-clock run snappy
            video_channel=ChannelConfig.uniform(10.0, 30.0, seed=1),
            command_channel=ChannelConfig.fixed(3.0, seed=2),
            telemetry_channel=ChannelConfig.fixed(3.0, seed=3),
        )
        report = run_experiment_udp(scenario, quick_landmark_model, out_dir=tmp_path)
        counts = report["counts"]
        assert counts["frames_received"] > 50, "frames did not flow over UDP"
        assert counts["frames_classified"] > 20
        assert counts["gesture_commands"] >= 3, "no slot decisions over UDP"
        assert report["commands"]["commands_confirmed"] >= 3
        assert report["latency"]["rtt_samples"] >= 3
        # stream delay should reflect the configured 10-30 ms impairment
        assert 5.0 <= report["latency"]["stream_ms_mean"] <= 80.0

    def test_free_ports_are_distinct(self):
        ports = free_udp_ports(4)
        assert len(set(ports)) == 4
