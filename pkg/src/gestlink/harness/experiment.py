"""Closed-loop experiment runner over in-memory channels."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..edge import EdgeServer
from ..gesturenet import NetworkParams
from ..perception import PROFILES
from ..proto import Origin, parse_command
from ..runtime import Channel, EventLog, SimLoop
from ..sim import DroneSim, ScheduledGestures
from .metrics import OnlineTrajectoryTracker, compute_report
from .scenarios import Scenario


@dataclass
class System:
    loop: SimLoop
    log: EventLog
    drone: DroneSim
    edge: EdgeServer
    channels: dict[str, Channel]


def build_system(scenario: Scenario, model: NetworkParams) -> System:
    loop = SimLoop()
    log = EventLog()
    log.append(
        0,
        "scenario",
        name=scenario.name,
        seed=scenario.seed,
        planned=[list(w) for w in scenario.planned_waypoints],
        duration_s=scenario.duration_s,
        assertions=[list(a) for a in scenario.assertions],
    )
    drone = DroneSim(
        loop,
        scenario.sim,
        scenario.wind,
        log,
        PROFILES[scenario.profile],
        gestures=ScheduledGestures(scenario.gestures, scenario.default_distance_m),
        battery_start=scenario.battery_start,
    )
    edge = EdgeServer(loop, scenario.pipeline, model, log)

    reply_cfg = scenario.command_channel
    channels = {
        "video": Channel(loop, scenario.video_channel, "video"),
        "command": Channel(loop, scenario.command_channel, "command"),
        "reply": Channel(loop, reply_cfg, "reply"),
        "telemetry": Channel(loop, scenario.telemetry_channel, "telemetry"),
    }
    channels["video"].connect(edge.on_frame_datagram)
    channels["telemetry"].connect(edge.on_telemetry_datagram)
    channels["command"].connect(drone.on_command_datagram)
    channels["reply"].connect(edge.on_reply_datagram)
    drone.frame_tx = channels["video"].send
    drone.telemetry_tx = channels["telemetry"].send
    drone.reply_tx = channels["reply"].send
    edge.attach(channels["command"].send)
    return System(loop=loop, log=log, drone=drone, edge=edge, channels=channels)


def check_assertions(report: dict, assertions: list[tuple[str, str, float]]) -> list[dict]:
    results = []
    for key, op, threshold in assertions:
        node: Any = report
        for part in key.split("."):
            node = node[part]
        value = float(node)
        ok = value <= threshold if op == "<=" else value >= threshold
        results.append({"key": key, "op": op, "threshold": threshold, "value": value, "ok": ok})
    return results


@dataclass
class RunResult:
    scenario: Scenario
    report: dict
    log: EventLog
    assertions: list[dict]

    @property
    def passed(self) -> bool:
        return all(a["ok"] for a in self.assertions)


def run_experiment(
    scenario: Scenario, model: NetworkParams, out_dir: str | Path | None = None
) -> RunResult:
    """Run the scenario to completion on the virtual clock and report.

    Deterministic per scenario seed: rerunning writes a byte-identical
    event log. The online trajectory accumulator must agree exactly with
    the offline recomputation, or the run aborts.
    """
    system = build_system(scenario, model)
    tracker = OnlineTrajectoryTracker(scenario.planned_waypoints)
    system.log.subscribe(tracker.on_event)
    system.drone.start()
    system.edge.start()
    for t_s, text in scenario.operator_commands:
        cmd = parse_command(text, origin=Origin.OPERATOR)
        system.loop.call_at(
            int(t_s * 1e6), lambda c=cmd: system.edge.dispatcher.submit(c, operator=True)
        )
    system.loop.run_until(int(scenario.duration_s * 1e6))
    system.edge.stop()
    system.drone.stop()

    report = compute_report(system.log.events)
    online = tracker.accuracy_pct
    offline = report["tracking"]["traj_accuracy_pct"]
    if online != offline:
        raise AssertionError(
            f"online/offline trajectory accuracy disagree: {online} vs {offline}"
        )
    assertions = check_assertions(report, scenario.assertions)
    report["assertions"] = assertions
    report["passed"] = all(a["ok"] for a in assertions)

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        system.log.dump(out / f"{scenario.name}.events.jsonl")
        (out / f"{scenario.name}.report.json").write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n"
        )
    return RunResult(scenario=scenario, report=report, log=system.log, assertions=assertions)
