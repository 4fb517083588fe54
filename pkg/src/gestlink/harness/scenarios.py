"""Experiment scenarios: schedules, channels, planned paths, assertions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..edge import PipelineConfig
from ..perception import GestureClass
from ..runtime import ChannelConfig
from ..sim import GestureWindow, SimConfig, WindModel


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    duration_s: float
    gestures: list[GestureWindow] = field(default_factory=list)
    operator_commands: list[tuple[float, str]] = field(default_factory=list)
    wind: WindModel = field(default_factory=WindModel)
    video_channel: ChannelConfig = field(default_factory=ChannelConfig)
    command_channel: ChannelConfig = field(default_factory=ChannelConfig)
    telemetry_channel: ChannelConfig = field(default_factory=ChannelConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    battery_start: float = 100.0
    profile: str = "baseline"
    default_distance_m: float = 1.5
    planned_waypoints: list[tuple[float, float, float]] = field(default_factory=list)
    # exit-code gates: (dotted report key, operator, threshold)
    assertions: list[tuple[str, str, float]] = field(default_factory=list)


def child_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def slot_window(first_slot: int, last_slot: int, gesture: GestureClass, distance_m: float) -> GestureWindow:
    """A gesture window whose frames land inside decision slots
    [first_slot, last_slot] under the default ~100 ms stream delay."""
    return GestureWindow(
        start_s=(first_slot - 1) + 0.15,
        end_s=last_slot - 0.30,
        gesture=gesture,
        distance_m=distance_m,
    )


def default_channels(seed: int) -> dict[str, ChannelConfig]:
    s = child_seeds(seed, 4)
    return {
        "video": ChannelConfig.uniform(80.0, 120.0, seed=s[0]),
        "command": ChannelConfig.fixed(6.0, seed=s[1]),
        "telemetry": ChannelConfig.fixed(6.0, seed=s[2]),
    }


def _base(name: str, seed: int, duration_s: float, **kwargs) -> Scenario:
    s = child_seeds(seed, 8)
    ch = default_channels(s[0])
    return Scenario(
        name=name,
        seed=seed,
        duration_s=duration_s,
        video_channel=ch["video"],
        command_channel=ch["command"],
        telemetry_channel=ch["telemetry"],
        sim=SimConfig(seed=s[1]),
        pipeline=PipelineConfig(seed=s[2]),
        **kwargs,
    )


def hover_hold(seed: int = 0) -> Scenario:
    d = 1.5
    return _base(
        "hover-hold",
        seed,
        40.0,
        operator_commands=[(0.4, "takeoff\n")],
        gestures=[slot_window(4, 6, GestureClass.PALM, d)],
        planned_waypoints=[(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)],
        assertions=[
            ("tracking.hover_dev_cm", "<=", 15.0),
            ("commands.cmd_success_pct", ">=", 96.0),
        ],
    )


def wind_hover(seed: int = 0, wind_speed: float = 8.3) -> Scenario:
    sc = _base(
        "wind-hover",
        seed,
        40.0,
        operator_commands=[(0.4, "takeoff\n")],
        wind=WindModel(mean_speed=wind_speed, gust_std=1.0, direction_deg=90.0),
        planned_waypoints=[(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)],
        assertions=[
            ("tracking.hover_dev_cm", "<=", 50.0),
            ("tracking.max_range_m", "<=", 10.0),
        ],
    )
    return sc


def square_path(seed: int = 0) -> Scenario:
    d = 1.5
    gestures = [
        slot_window(4, 8, GestureClass.THUMB_UP, d),
        slot_window(10, 14, GestureClass.POINT_LEFT, d),
        slot_window(16, 20, GestureClass.THUMB_DOWN, d),
        slot_window(22, 26, GestureClass.POINT_RIGHT, d),
        slot_window(28, 32, GestureClass.PALM, d),
    ]
    waypoints = [
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 2.0),
        (0.0, 1.0, 2.0),
        (0.0, 1.0, 1.0),
        (0.0, 0.0, 1.0),
    ]
    return _base(
        "square-path",
        seed,
        36.0,
        operator_commands=[(0.4, "takeoff\n")],
        gestures=gestures,
        planned_waypoints=waypoints,
        assertions=[
            ("tracking.traj_accuracy_pct", ">=", 92.0),
            ("tracking.mean_dev_cm", "<=", 18.0),
            ("tracking.hover_dev_cm", "<=", 15.0),
            ("tracking.heading_err_deg", "<=", 5.0),
            ("commands.cmd_success_pct", ">=", 96.0),
        ],
    )


def latency_default(seed: int = 0, duration_s: float = 90.0) -> Scenario:
    last_slot = int(duration_s) - 2
    return _base(
        "latency-default",
        seed,
        duration_s,
        operator_commands=[(0.4, "takeoff\n")],
        gestures=[slot_window(4, last_slot, GestureClass.PALM, 1.5)],
        planned_waypoints=[(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)],
        assertions=[
            ("latency.end_to_end_ms_mean", ">=", 120.0),
            ("latency.end_to_end_ms_mean", "<=", 180.0),
            ("latency.process_ms_mean", "<=", 30.0),
            ("latency.rtt_ms_mean", ">=", 10.0),
            ("latency.rtt_ms_mean", "<=", 14.0),
        ],
    )


def no_hand_stream(seed: int = 0, duration_s: float = 60.0) -> Scenario:
    """Only empty frames: the false-positive command probe."""
    return _base(
        "no-hand-stream",
        seed,
        duration_s,
        operator_commands=[(0.4, "takeoff\n")],
        planned_waypoints=[(0.0, 0.0, 0.0), (0.0, 0.0, 1.0)],
        assertions=[("counts.gesture_commands", "<=", 0.0)],
    )


BUILTIN_SCENARIOS = {
    "hover-hold": hover_hold,
    "wind-hover": wind_hover,
    "square-path": square_path,
    "latency-default": latency_default,
    "no-hand-stream": no_hand_stream,
}


def build_scenario(name: str, seed: int = 0) -> Scenario:
    if name not in BUILTIN_SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choices: {sorted(BUILTIN_SCENARIOS)}")
    return BUILTIN_SCENARIOS[name](seed=seed)


def apply_config_overrides(scenario: Scenario, config: dict) -> Scenario:
    """CLI --config overrides: pipeline knobs, sim constants, and the
    gesture-to-command map (class name -> command text)."""
    from ..proto import parse_command

    overrides = {}
    if "pipeline" in config:
        overrides["pipeline"] = replace(scenario.pipeline, **config["pipeline"])
    if "sim" in config:
        overrides["sim"] = replace(scenario.sim, **config["sim"])
    if "gesture_map" in config:
        table = {
            GestureClass[name.upper()]: parse_command(text if text.endswith("\n") else text + "\n")
            for name, text in config["gesture_map"].items()
        }
        pipeline = overrides.get("pipeline", scenario.pipeline)
        overrides["pipeline"] = replace(pipeline, gesture_map=table)
    return replace(scenario, **overrides)


def scenario_from_json(path: str | Path) -> Scenario:
    """Custom scenario file: a base scenario plus overrides."""
    spec = json.loads(Path(path).read_text())
    base = build_scenario(spec.get("base", "hover-hold"), seed=spec.get("seed", 0))
    overrides = {}
    if "duration_s" in spec:
        overrides["duration_s"] = float(spec["duration_s"])
    if "wind" in spec:
        overrides["wind"] = WindModel(**spec["wind"])
    if "gestures" in spec:
        overrides["gestures"] = [
            GestureWindow(
                start_s=g["start_s"],
                end_s=g["end_s"],
                gesture=GestureClass[g["gesture"].upper()],
                distance_m=g["distance_m"],
            )
            for g in spec["gestures"]
        ]
    if "operator_commands" in spec:
        overrides["operator_commands"] = [
            (float(t), str(text)) for t, text in spec["operator_commands"]
        ]
    if "planned_waypoints" in spec:
        overrides["planned_waypoints"] = [tuple(w) for w in spec["planned_waypoints"]]
    if "battery_start" in spec:
        overrides["battery_start"] = float(spec["battery_start"])
    if "name" in spec:
        overrides["name"] = spec["name"]
    return replace(base, **overrides)
