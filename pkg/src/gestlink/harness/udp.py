"""Real-socket transport: the drone runs as a separate process and the
edge talks to it over UDP, with the same impairment model applied on the
sending side of each channel."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import tempfile
import threading
import time
from pathlib import Path

import numpy as np

from ..edge import EdgeServer
from ..gesturenet import NetworkParams
from ..runtime import ChannelConfig, EventLog, RealtimeLoop, read_event_log
from .experiment import check_assertions
from .metrics import compute_report
from .scenarios import Scenario


class ImpairedUdpSender:
    """Applies the channel's drop/delay before the real sendto."""

    def __init__(self, loop, sock: socket.socket, dest, config: ChannelConfig) -> None:
        self.loop = loop
        self.sock = sock
        self.dest = dest
        self._rng = np.random.default_rng(config.seed)
        self.config = config

    def send(self, payload) -> bool:
        if isinstance(payload, str):
            payload = payload.encode("utf-8")
        if self.config.drop_prob > 0.0 and self._rng.random() < self.config.drop_prob:
            return False
        cfg = self.config
        if cfg.delay == "fixed":
            ms = cfg.delay_ms
        elif cfg.delay == "uniform":
            ms = self._rng.uniform(cfg.delay_lo_ms, cfg.delay_hi_ms)
        else:
            ms = max(0.0, self._rng.normal(cfg.delay_ms, cfg.delay_std_ms))
        self.loop.call_later(int(ms * 1000), lambda: self._sendto(payload))
        return True

    def _sendto(self, payload: bytes) -> None:
        try:
            self.sock.sendto(payload, self.dest)
        except OSError:
            pass


class UdpReceiver:
    """Reader thread posting datagrams into the loop."""

    def __init__(self, loop, sock: socket.socket, handler, decode_text: bool) -> None:
        self.loop = loop
        self.sock = sock
        self.handler = handler
        self.decode_text = decode_text
        self._stop = False
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self._stop:
            try:
                data, _ = self.sock.recvfrom(65536)
            except OSError:
                return
            payload = data.decode("utf-8", errors="replace") if self.decode_text else data
            self.loop.post(lambda p=payload: self.handler(p))

    def stop(self) -> None:
        self._stop = True
        try:
            self.sock.close()
        except OSError:
            pass


def free_udp_ports(n: int) -> list[int]:
    socks = [socket.socket(socket.AF_INET, socket.SOCK_DGRAM) for _ in range(n)]
    for s in socks:
        s.bind(("127.0.0.1", 0))
    ports = [s.getsockname()[1] for s in socks]
    for s in socks:
        s.close()
    return ports


def run_experiment_udp(
    scenario: Scenario, model: NetworkParams, out_dir: str | Path | None = None
) -> dict:
    """Drone subprocess + in-process edge over loopback UDP.

    Wall-clock timing (one real second per simulated second) makes this
    mode slower and jittery; metrics are computed over the merged drone
    and edge logs. Determinism guarantees apply to the in-memory mode.
    """
    frame_port, cmd_port, telem_port, reply_port = free_udp_ports(4)
    workdir = Path(tempfile.mkdtemp(prefix="gestlink-udp-"))
    drone_log_path = workdir / "drone.events.jsonl"

    script = {
        "gestures": [
            {
                "start_s": g.start_s,
                "end_s": g.end_s,
                "gesture": g.gesture.name,
                "distance_m": g.distance_m,
            }
            for g in scenario.gestures
        ],
        "default_distance_m": scenario.default_distance_m,
        "wind": {
            "mean_speed": scenario.wind.mean_speed,
            "gust_std": scenario.wind.gust_std,
            "direction_deg": scenario.wind.direction_deg,
            "correlation_time_s": scenario.wind.correlation_time_s,
        },
        "channels": {
            "video": scenario.video_channel.__dict__,
            "telemetry": scenario.telemetry_channel.__dict__,
            "reply": scenario.command_channel.__dict__,
        },
    }
    script_path = workdir / "script.json"
    script_path.write_text(json.dumps(script))

    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "gestlink.sim.cli",
            "--cmd-port", str(cmd_port),
            "--edge-host", "127.0.0.1",
            "--frame-port", str(frame_port),
            "--telemetry-port", str(telem_port),
            "--reply-port", str(reply_port),
            "--seed", str(scenario.sim.seed),
            "--battery-start", str(scenario.battery_start),
            "--script", str(script_path),
            "--duration", str(scenario.duration_s),
            "--record", str(drone_log_path),
        ],
    )
    loop = RealtimeLoop()
    log = EventLog()
    edge = EdgeServer(loop, scenario.pipeline, model, log)

    recv_socks = {}
    for name, port in (("frame", frame_port), ("telemetry", telem_port), ("reply", reply_port)):
        s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        s.bind(("127.0.0.1", port))
        recv_socks[name] = s
    send_sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sender = ImpairedUdpSender(
        loop, send_sock, ("127.0.0.1", cmd_port), scenario.command_channel
    )
    edge.attach(sender.send)
    receivers = [
        UdpReceiver(loop, recv_socks["frame"], edge.on_frame_datagram, decode_text=False),
        UdpReceiver(loop, recv_socks["telemetry"], edge.on_telemetry_datagram, decode_text=True),
        UdpReceiver(loop, recv_socks["reply"], edge.on_reply_datagram, decode_text=True),
    ]
    from ..proto import Origin, parse_command

    def schedule_operator() -> None:
        edge.start()
        for t_s, text in scenario.operator_commands:
            cmd = parse_command(text, origin=Origin.OPERATOR)
            loop.call_later(int(t_s * 1e6), lambda c=cmd: edge.dispatcher.submit(c, operator=True))

    start_fn_done = threading.Event()
    loop.post(lambda: (schedule_operator(), start_fn_done.set()))
    start_fn_done.wait(5)
    try:
        proc.wait(timeout=scenario.duration_s + 30)
    finally:
        if proc.poll() is None:
            proc.kill()
    time.sleep(0.5)  # let in-flight datagrams drain
    stop_done = threading.Event()
    loop.post(lambda: (edge.stop(), stop_done.set()))
    stop_done.wait(5)
    for r in receivers:
        r.stop()
    loop.stop()

    drone_events = read_event_log(drone_log_path) if drone_log_path.exists() else []
    merged = sorted(log.events + drone_events, key=lambda r: (r["t_us"],))
    header = {
        "t_us": 0,
        "ev": "scenario",
        "name": scenario.name,
        "seed": scenario.seed,
        "planned": [list(w) for w in scenario.planned_waypoints],
        "duration_s": scenario.duration_s,
        "assertions": [list(a) for a in scenario.assertions],
    }
    events = [header] + merged
    report = compute_report(events)
    results = check_assertions(report, scenario.assertions)
    report["assertions"] = results
    report["passed"] = all(a["ok"] for a in results)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"{scenario.name}.udp.events.jsonl", "w") as fh:
            for record in events:
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
        (out / f"{scenario.name}.udp.report.json").write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n"
        )
    return report
