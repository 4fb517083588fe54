"""Drone model and loop-driven drone component."""

import math

import numpy as np
import pytest

from gestlink.proto import ControlCommand, DroneMode, Verb, parse_telemetry
from gestlink.runtime import EventLog, SimLoop
from gestlink.sim import (
    DroneSim,
    DroneState,
    GestureWindow,
    ScheduledGestures,
    SimConfig,
    WindModel,
    WindProcess,
    step,
)
from gestlink.perception import BASELINE, GestureClass


CFG = SimConfig()
CALM = WindModel()


def hover_state(z=1.0, battery=80.0) -> DroneState:
    s = DroneState(battery_pct=battery, mode=DroneMode.GROUNDED)
    s.transition(DroneMode.HOVER)
    s.position = np.array([0.0, 0.0, z])
    s.setpoint = s.position.copy()
    return s


class TestStep:
    def test_hover_holds_and_drains(self):
        s = hover_state()
        bat0 = s.battery_pct
        for _ in range(100):
            step(s, np.zeros(3), 0.02, CFG)
        assert np.allclose(s.position, [0, 0, 1.0], atol=1e-6)
        assert s.battery_pct < bat0

    def test_first_order_velocity_response(self):
        # step the setpoint 10 m forward: velocity saturates to v_max, and
        # the approach toward it is exponential with the configured lag
        s = hover_state()
        s.setpoint = np.array([10.0, 0.0, 1.0])
        s.transition(DroneMode.FLYING)
        dt = 0.02
        vels = []
        for _ in range(75):  # 1.5 s
            step(s, np.zeros(3), dt, CFG)
            vels.append(s.velocity[0])
        v_target = CFG.v_max
        # after 3 time constants the response must be within 5%
        idx_3tau = int(3 * CFG.velocity_lag_s / dt)
        assert vels[idx_3tau] > 0.95 * v_target
        # fit the time constant from the transient: v(t) = v*(1-exp(-t/tau))
        t = np.arange(1, 40) * dt
        v = np.array(vels[:39])
        ratio = 1.0 - v / v_target
        tau_fit = -1.0 / np.polyfit(t, np.log(ratio), 1)[0]
        assert abs(tau_fit - CFG.velocity_lag_s) / CFG.velocity_lag_s < 0.05

    def test_z_never_negative(self):
        s = hover_state(z=0.3)
        s.transition(DroneMode.LANDING)
        for _ in range(500):
            step(s, np.array([0.0, 0.0, -5.0]), 0.02, CFG)
            assert s.position[2] >= 0.0

    def test_wind_displaces_hover(self):
        s = hover_state()
        wind = np.array([8.3, 0.0, 0.0])
        for _ in range(1500):  # 30 s
            step(s, wind, 0.02, CFG)
        # equilibrium offset = coupling * wind / kp
        expected = CFG.wind_coupling * 8.3 / CFG.kp_pos
        assert s.position[0] == pytest.approx(expected, rel=0.05)
        assert abs(s.position[0]) < 0.5

    def test_battery_drain_rates(self):
        s = hover_state()
        step(s, np.zeros(3), 60.0, CFG)  # one simulated minute in one step
        assert s.battery_pct == pytest.approx(80.0 - CFG.battery_drain_hover, abs=1e-6)

    def test_wind_process_deterministic(self):
        model = WindModel(mean_speed=5.0, gust_std=1.0, direction_deg=45.0)
        a = WindProcess(model, np.random.default_rng(3))
        b = WindProcess(model, np.random.default_rng(3))
        for _ in range(50):
            assert np.array_equal(a.sample(0.02), b.sample(0.02))


def make_drone(loop=None, battery=100.0, gestures=None, wind=CALM, config=CFG):
    loop = loop or SimLoop()
    log = EventLog()
    drone = DroneSim(
        loop, config, wind, log, BASELINE, gestures=gestures, battery_start=battery
    )
    sent_frames, sent_telemetry, sent_replies = [], [], []
    drone.frame_tx = sent_frames.append
    drone.telemetry_tx = sent_telemetry.append
    drone.reply_tx = sent_replies.append
    return loop, drone, log, sent_frames, sent_telemetry, sent_replies


class TestDroneCommands:
    def test_takeoff_reaches_hover_altitude(self):
        loop, drone, log, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(5_000_000)
        assert drone.state.mode == DroneMode.HOVER
        assert drone.state.position[2] == pytest.approx(1.0, abs=0.05)

    def test_up_20_moves_setpoint(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        z_sp = drone.state.setpoint[2]
        drone.on_command_datagram("up 20\n")
        loop.run_until(4_100_000)
        assert drone.state.setpoint[2] == pytest.approx(z_sp + 0.20)

    def test_grounded_translation_naks(self):
        loop, drone, log, _, _, replies = make_drone()
        drone.start()
        drone.on_command_datagram("forward 30\n")
        loop.run_until(100_000)
        assert any(r.startswith("error") for r in replies)
        assert drone.state.mode == DroneMode.GROUNDED
        assert np.allclose(drone.state.setpoint, 0.0)

    def test_land_sequence_reaches_ground(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        drone.on_command_datagram("land\n")
        loop.run_until(12_000_000)
        assert drone.state.mode == DroneMode.GROUNDED
        assert drone.state.position[2] == 0.0

    def test_rth_returns_home_and_lands(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        drone.on_command_datagram("forward 200\n")
        loop.run_until(9_000_000)
        assert drone.state.position[0] > 1.5
        drone.on_command_datagram("rth\n")
        loop.run_until(25_000_000)
        assert drone.state.mode == DroneMode.GROUNDED
        assert math.hypot(*drone.state.position[:2]) < 0.2

    def test_yaw_rotation(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        drone.on_command_datagram("ccw 90\n")
        loop.run_until(8_000_000)
        assert drone.state.yaw_deg == pytest.approx(90.0, abs=2.0)

    def test_translation_uses_body_frame(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        drone.on_command_datagram("ccw 90\n")
        loop.run_until(8_000_000)
        drone.on_command_datagram("forward 50\n")
        loop.run_until(8_100_000)
        # facing +y now: forward displaces +y
        assert drone.state.setpoint[1] == pytest.approx(0.5, abs=0.02)
        assert abs(drone.state.setpoint[0]) < 0.02

    def test_altitude_band_clamp(self):
        loop, drone, *_ = make_drone()
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(4_000_000)
        for _ in range(15):
            drone.on_command_datagram("up 20\n")
        loop.run_until(4_200_000)
        assert drone.state.setpoint[2] <= CFG.altitude_band[1] + 1e-9

    def test_echo_answers_immediately(self):
        loop, drone, _, _, _, replies = make_drone()
        drone.start()
        drone.on_command_datagram("echo 42\n")
        loop.run_until(1_000)
        assert replies == ["echo 42\n"]

    def test_malformed_command_naks_without_crash(self):
        loop, drone, _, _, _, replies = make_drone()
        drone.start()
        drone.on_command_datagram("warp 9\n")
        loop.run_until(100_000)
        assert any(r.startswith("error") for r in replies)


class TestBatteryGuard:
    def test_low_battery_forces_landing(self):
        loop, drone, log, *_ = make_drone(battery=15.4)
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(10_000_000)
        # hover drain crosses the 15% line within a few simulated seconds
        def drained():
            return drone.state.battery_pct <= 15.0
        t = 10_000_000
        while not drained() and t < 700_000_000:
            t += 10_000_000
            loop.run_until(t)
        loop.run_until(t + 15_000_000)
        assert drone.state.mode in (DroneMode.LANDING, DroneMode.GROUNDED)
        assert any(e["ev"] == "failsafe_drone" and e["cause"] == "battery" for e in log.events)

    def test_above_threshold_no_action(self):
        loop, drone, log, *_ = make_drone(battery=16.5)
        drone.start()
        drone.on_command_datagram("takeoff\n")
        loop.run_until(5_000_000)
        assert drone.state.mode == DroneMode.HOVER
        assert not any(e["ev"] == "failsafe_drone" for e in log.events)

    def test_grounded_low_battery_no_action(self):
        loop, drone, log, *_ = make_drone(battery=10.0)
        drone.start()
        loop.run_until(3_000_000)
        assert drone.state.mode == DroneMode.GROUNDED
        assert not any(e["ev"] == "failsafe_drone" for e in log.events)


class TestTelemetryAndFrames:
    def test_telemetry_rate_and_parse(self):
        loop, drone, _, _, telemetry, _ = make_drone()
        drone.start()
        loop.run_until(1_000_000)
        assert 9 <= len(telemetry) <= 11
        t = parse_telemetry(telemetry[-1])
        assert t.mode == DroneMode.GROUNDED
        assert t.bat == 100

    def test_frame_rate(self):
        loop, drone, _, frames, _, _ = make_drone()
        drone.start()
        loop.run_until(2_000_000)
        assert 28 <= len(frames) <= 32

    def test_frames_carry_scheduled_gesture(self):
        gestures = ScheduledGestures(
            [GestureWindow(0.0, 5.0, GestureClass.PALM, 1.0)]
        )
        loop, drone, log, frames, _, _ = make_drone(gestures=gestures)
        drone.start()
        loop.run_until(1_000_000)
        from gestlink.proto import decode_frame_packet

        detected = [decode_frame_packet(f) for f in frames]
        assert any(p.n_landmarks == 21 for p in detected)
        sent = [e for e in log.events if e["ev"] == "frame_sent"]
        assert all(e["cls"] == int(GestureClass.PALM) for e in sent)
        seqs = [p.seq for p in detected]
        assert seqs == sorted(seqs)
        ts = [p.ts_ms for p in detected]
        assert all(b >= a for a, b in zip(ts, ts[1:]))

    def test_no_gesture_frames_have_no_landmarks(self):
        loop, drone, _, frames, _, _ = make_drone()
        drone.start()
        loop.run_until(1_000_000)
        from gestlink.proto import decode_frame_packet

        assert all(decode_frame_packet(f).n_landmarks == 0 for f in frames)


class TestDeterminism:
    def test_same_seed_same_trajectory(self):
        logs = []
        for _ in range(2):
            gestures = ScheduledGestures([GestureWindow(1.0, 8.0, GestureClass.THUMB_UP, 1.5)])
            loop, drone, log, *_ = make_drone(
                gestures=gestures, wind=WindModel(mean_speed=3.0, gust_std=0.5)
            )
            drone.start()
            drone.on_command_datagram("takeoff\n")
            loop.run_until(10_000_000)
            logs.append(log.dumps())
        assert logs[0] == logs[1]

    def test_mode_machine_under_fuzzed_commands(self):
        rng = np.random.default_rng(17)
        verbs = ["takeoff", "land", "stop", "rth", "up 20", "down 20", "left 20",
                 "right 20", "forward 40", "back 40", "cw 45", "ccw 45"]
        loop, drone, log, *_ = make_drone()
        drone.start()
        t = 0
        for _ in range(120):
            t += int(rng.integers(50_000, 400_000))
            cmd = verbs[int(rng.integers(0, len(verbs)))]
            loop.call_at(t, lambda c=cmd: drone.on_command_datagram(c + "\n"))
        loop.run_until(t + 20_000_000)
        # battery and altitude invariants held throughout (checked at end,
        # transitions validated internally by DroneState.transition)
        assert 0.0 <= drone.state.battery_pct <= 100.0
        assert drone.state.position[2] >= 0.0
