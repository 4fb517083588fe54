"""Standalone drone process speaking real UDP."""

from __future__ import annotations

import argparse
import json
import socket
import sys
import threading
import time

from ..perception import GestureClass, PROFILES
from ..runtime import ChannelConfig, EventLog, RealtimeLoop
from .drone import DroneSim, GestureWindow, ScheduledGestures
from .model import SimConfig, WindModel


def _channel_from_dict(d: dict | None) -> ChannelConfig:
    if not d:
        return ChannelConfig()
    return ChannelConfig(**d)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gestlink-drone", description="simulated drone over UDP")
    parser.add_argument("--cmd-port", type=int, default=8889, help="UDP port to bind for commands")
    parser.add_argument("--edge-host", default="127.0.0.1")
    parser.add_argument("--frame-port", type=int, default=11111, help="edge port for frames")
    parser.add_argument("--telemetry-port", type=int, default=8890, help="edge port for telemetry")
    parser.add_argument("--reply-port", type=int, default=None,
                        help="edge port for replies (default: answer the command sender)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--wind", default=None, help="mean,gust,direction (m/s, m/s, deg)")
    parser.add_argument("--battery-start", type=float, default=100.0)
    parser.add_argument("--script", default=None, help="JSON gesture schedule")
    parser.add_argument("--duration", type=float, default=None, help="seconds to run, default forever")
    parser.add_argument("--record", default=None, help="write the event log here on exit")
    parser.add_argument("--profile", default="baseline", choices=sorted(PROFILES))
    args = parser.parse_args(argv)

    wind = WindModel()
    if args.wind:
        mean, gust, direction = (float(x) for x in args.wind.split(","))
        wind = WindModel(mean_speed=mean, gust_std=gust, direction_deg=direction)

    gestures = ScheduledGestures([])
    channel_cfgs = {}
    if args.script:
        script = json.loads(open(args.script).read())
        windows = [
            GestureWindow(
                start_s=g["start_s"],
                end_s=g["end_s"],
                gesture=GestureClass[g["gesture"]],
                distance_m=g["distance_m"],
            )
            for g in script.get("gestures", [])
        ]
        gestures = ScheduledGestures(windows, script.get("default_distance_m", 1.5))
        if "wind" in script:
            w = script["wind"]
            wind = WindModel(
                mean_speed=w.get("mean_speed", 0.0),
                gust_std=w.get("gust_std", 0.0),
                direction_deg=w.get("direction_deg", 0.0),
                correlation_time_s=w.get("correlation_time_s", 2.0),
            )
        channel_cfgs = script.get("channels", {})

    loop = RealtimeLoop()
    log = EventLog()
    config = SimConfig(seed=args.seed)
    drone = DroneSim(
        loop, config, wind, log, PROFILES[args.profile],
        gestures=gestures, battery_start=args.battery_start,
    )

    from ..harness.udp import ImpairedUdpSender, UdpReceiver

    cmd_sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    cmd_sock.bind(("0.0.0.0", args.cmd_port))
    out_sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    frame_tx = ImpairedUdpSender(
        loop, out_sock, (args.edge_host, args.frame_port),
        _channel_from_dict(channel_cfgs.get("video")),
    )
    telem_tx = ImpairedUdpSender(
        loop, out_sock, (args.edge_host, args.telemetry_port),
        _channel_from_dict(channel_cfgs.get("telemetry")),
    )
    reply_dest = (args.edge_host, args.reply_port or args.cmd_port)
    reply_tx = ImpairedUdpSender(
        loop, out_sock, reply_dest, _channel_from_dict(channel_cfgs.get("reply"))
    )
    drone.frame_tx = frame_tx.send
    drone.telemetry_tx = telem_tx.send
    drone.reply_tx = reply_tx.send

    receiver = UdpReceiver(loop, cmd_sock, drone.on_command_datagram, decode_text=True)
    started = threading.Event()
    loop.post(lambda: (drone.start(), started.set()))
    started.wait(5)
    try:
        if args.duration is not None:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        pass
    stopped = threading.Event()
    loop.post(lambda: (drone.stop(), stopped.set()))
    stopped.wait(5)
    receiver.stop()
    loop.stop()
    if args.record:
        log.dump(args.record)
    return 0


if __name__ == "__main__":
    sys.exit(main())
