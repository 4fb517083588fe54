"""Metrics computed from the event log, and only from the event log.

The same function serves the live run and offline replay, so the two
agree exactly. Latency decomposition correlates edge dispatches with
drone applications by verb/magnitude in FIFO order within a two-second
window; tracking metrics come from the drone's own 10 Hz telemetry
events, which carry the active setpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

TRAJ_THRESHOLD_CM = 30.0
SETTLE_S = 2.0
CONFIRM_WINDOW_S = 2.0
HOLD_MIN_S = 2.0


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs) if xs else 0.0


def _p95(xs: list[float]) -> float:
    if not xs:
        return 0.0
    ordered = sorted(xs)
    idx = min(len(ordered) - 1, int(math.ceil(0.95 * len(ordered))) - 1)
    return ordered[idx]


def _wrap_deg(a: float) -> float:
    return ((a + 180.0) % 360.0) - 180.0


def point_segment_distance_cm(p, a, b) -> float:
    """Distance from point p to segment a-b, all in cm tuples."""
    ax, ay, az = a
    bx, by, bz = b
    px, py, pz = p
    dx, dy, dz = bx - ax, by - ay, bz - az
    seg2 = dx * dx + dy * dy + dz * dz
    if seg2 == 0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy + (pz - az) * dz) / seg2
        t = max(0.0, min(1.0, t))
    cx, cy, cz = ax + t * dx, ay + t * dy, az + t * dz
    return math.sqrt((px - cx) ** 2 + (py - cy) ** 2 + (pz - cz) ** 2)


def path_deviation_cm(p, waypoints_cm) -> float:
    if len(waypoints_cm) == 1:
        return point_segment_distance_cm(p, waypoints_cm[0], waypoints_cm[0])
    return min(
        point_segment_distance_cm(p, a, b) for a, b in zip(waypoints_cm, waypoints_cm[1:])
    )


class OnlineTrajectoryTracker:
    """Incremental within-threshold counter fed live by the event log."""

    def __init__(self, waypoints_m: list[tuple[float, float, float]]) -> None:
        self.waypoints_cm = [(x * 100.0, y * 100.0, z * 100.0) for x, y, z in waypoints_m]
        self.samples = 0
        self.within = 0

    def on_event(self, record: dict[str, Any]) -> None:
        if record.get("ev") != "telem" or record.get("mode") not in ("hover", "flying"):
            return
        if not self.waypoints_cm:
            return
        p = (record["x_cm"], record["y_cm"], record["z_cm"])
        dev = path_deviation_cm(p, self.waypoints_cm)
        self.samples += 1
        if dev <= TRAJ_THRESHOLD_CM:
            self.within += 1

    @property
    def accuracy_pct(self) -> float:
        return 100.0 * self.within / self.samples if self.samples else 0.0


@dataclass
class LatencyRecord:
    stream_ms: float
    process_ms: float
    queue_ms: float
    end_to_end_ms: float
    rtt_ms: float | None
    decomposition_gap_ms: float


def correlate_commands(events: list[dict]) -> tuple[list[dict], int]:
    """Match cmd_sent to cmd_applied(ok) FIFO by (verb, magnitude).

    Returns matched pairs [{sent, applied}] and the count of dispatches
    that never correlated within the window.
    """
    pending: dict[tuple, list[dict]] = {}
    matched: list[dict] = []
    unmatched = 0
    window_us = int(CONFIRM_WINDOW_S * 1e6)
    for record in events:
        if record["ev"] == "cmd_sent":
            key = (record["verb"], record.get("magnitude"))
            pending.setdefault(key, []).append(record)
        elif record["ev"] == "cmd_applied" and record.get("result") == "ok":
            key = (record["verb"], record.get("magnitude"))
            queue = pending.get(key, [])
            while queue and record["t_us"] - queue[0]["t_us"] > window_us:
                queue.pop(0)
                unmatched += 1
            if queue and queue[0]["t_us"] <= record["t_us"]:
                matched.append({"sent": queue.pop(0), "applied": record})
    for queue in pending.values():
        unmatched += len(queue)
    return matched, unmatched


def latency_records(events: list[dict]) -> tuple[list[LatencyRecord], int]:
    rtts = [r["rtt_us"] / 1000.0 for r in events if r["ev"] == "echo_rtt"]
    mean_rtt = _mean(rtts)
    matched, unmatched = correlate_commands(events)
    records = []
    for pair in matched:
        sent = pair["sent"]
        if "t_captured_us" not in sent:
            continue  # failsafe/operator commands carry no capture time
        applied = pair["applied"]
        stream = (sent["t_received_us"] - sent["t_captured_us"]) / 1000.0
        process = (sent["t_classified_us"] - sent["t_received_us"]) / 1000.0
        queue = (sent["t_us"] - sent["t_classified_us"]) / 1000.0
        end_to_end = (applied["t_us"] - sent["t_captured_us"]) / 1000.0
        gap = end_to_end - (stream + process + queue + mean_rtt / 2.0)
        records.append(
            LatencyRecord(
                stream_ms=stream,
                process_ms=process,
                queue_ms=queue,
                end_to_end_ms=end_to_end,
                rtt_ms=mean_rtt if rtts else None,
                decomposition_gap_ms=gap,
            )
        )
    return records, unmatched


@dataclass
class HoldSegment:
    start_us: int
    setpoint_cm: tuple[int, int, int]
    samples: list[tuple[int, float]] = field(default_factory=list)  # (t_us, dev_cm)


def tracking_metrics(events: list[dict], waypoints_m: list) -> dict[str, Any]:
    waypoints_cm = [(x * 100.0, y * 100.0, z * 100.0) for x, y, z in waypoints_m]
    telems = [r for r in events if r["ev"] == "telem"]
    deviations: list[float] = []
    lateral: list[float] = []
    hover_devs: list[float] = []
    heading_errs: list[float] = []
    settle_us = int(SETTLE_S * 1e6)

    sp_since: int | None = None
    sp_current: tuple[int, int, int] | None = None
    yaw_since: int | None = None
    yaw_current: int | None = None
    max_range_m = 0.0
    min_battery = 100
    for r in telems:
        pos = (r["x_cm"], r["y_cm"], r["z_cm"])
        max_range_m = max(max_range_m, math.hypot(pos[0], pos[1]) / 100.0)
        min_battery = min(min_battery, r["bat"])
        sp = (r["sp_x_cm"], r["sp_y_cm"], r["sp_z_cm"])
        if sp != sp_current:
            sp_current, sp_since = sp, r["t_us"]
        yaw_sp = r["yaw_sp_deg"]
        if yaw_sp != yaw_current:
            yaw_current, yaw_since = yaw_sp, r["t_us"]
        if r["mode"] not in ("hover", "flying"):
            continue
        if waypoints_cm:
            dev = path_deviation_cm(pos, waypoints_cm)
            deviations.append(dev)
            if r["mode"] == "flying":
                lateral.append(dev)
        if r["t_us"] - sp_since >= settle_us:
            hover_devs.append(
                math.sqrt(sum((p - s) ** 2 for p, s in zip(pos, sp)))
            )
        if r["t_us"] - yaw_since >= settle_us:
            heading_errs.append(abs(_wrap_deg(r["yaw_deg"] - yaw_sp)))

    within = sum(1 for d in deviations if d <= TRAJ_THRESHOLD_CM)
    return {
        "traj_accuracy_pct": 100.0 * within / len(deviations) if deviations else 0.0,
        "traj_samples": len(deviations),
        "mean_dev_cm": _mean(deviations),
        "lateral_dev_cm": max(lateral) if lateral else 0.0,
        "hover_dev_cm": max(hover_devs) if hover_devs else 0.0,
        "heading_err_deg": max(heading_errs) if heading_errs else 0.0,
        "max_range_m": max_range_m,
        "min_battery_pct": min_battery,
    }


def command_success(events: list[dict]) -> dict[str, Any]:
    """A command succeeds when the drone confirms the intended mode or
    setpoint change in telemetry within the confirmation window."""
    telems = [r for r in events if r["ev"] == "telem"]
    matched, _ = correlate_commands(events)
    window_us = int(CONFIRM_WINDOW_S * 1e6)
    sent_total = sum(1 for r in events if r["ev"] == "cmd_sent")
    confirmed = 0
    expect_mode = {
        "takeoff": ("hover", "flying"),
        "land": ("landing", "grounded"),
        "stop": ("hover", "flying"),
        "rth": ("rth", "landing", "grounded"),
    }
    for pair in matched:
        applied = pair["applied"]
        verb = applied["verb"]
        t0 = applied["t_us"]
        after = [t for t in telems if t0 <= t["t_us"] <= t0 + window_us]
        before = [t for t in telems if t["t_us"] < t0]
        if verb in expect_mode:
            if any(t["mode"] in expect_mode[verb] for t in after):
                confirmed += 1
        elif verb in ("cw", "ccw"):
            if not before or not after:
                continue
            prev = before[-1]["yaw_sp_deg"]
            mag = applied.get("magnitude") or 0
            want = {"cw": -mag, "ccw": mag}[verb]
            if any(
                abs(_wrap_deg(t["yaw_sp_deg"] - prev - want)) <= 1.0 for t in after
            ):
                confirmed += 1
        else:  # translation: the setpoint moved by the commanded distance
            if not before or not after:
                continue
            prev = (before[-1]["sp_x_cm"], before[-1]["sp_y_cm"], before[-1]["sp_z_cm"])
            mag = applied.get("magnitude") or 0
            for t in after:
                sp = (t["sp_x_cm"], t["sp_y_cm"], t["sp_z_cm"])
                delta = math.sqrt(sum((a - b) ** 2 for a, b in zip(sp, prev)))
                if abs(delta - mag) <= 2.0:
                    confirmed += 1
                    break
    return {
        "commands_sent": sent_total,
        "commands_confirmed": confirmed,
        "cmd_success_pct": 100.0 * confirmed / sent_total if sent_total else 0.0,
    }


def compute_report(events: list[dict]) -> dict[str, Any]:
    """The full metrics report for one run; pure function of the log."""
    meta = next((r for r in events if r["ev"] == "scenario"), None)
    if meta is None:
        raise ValueError("event log is missing its scenario header")
    waypoints = [tuple(w) for w in meta.get("planned", [])]

    records, uncorrelated = latency_records(events)
    rtts = [r["rtt_us"] / 1000.0 for r in events if r["ev"] == "echo_rtt"]
    classified = [r for r in events if r["ev"] == "classified"]
    streams = [(r["t_received_us"] - r["t_captured_us"]) / 1000.0 for r in classified]
    processes = [r["process_us"] / 1000.0 for r in classified]

    track = tracking_metrics(events, waypoints)
    success = command_success(events)

    drop_counts: dict[str, int] = {}
    for r in events:
        if r["ev"] == "frame_drop":
            drop_counts[r["reason"]] = drop_counts.get(r["reason"], 0) + 1
    failsafes = [
        {"mode": r["mode"], "cause": r["cause"], "t_us": r["t_us"]}
        for r in events
        if r["ev"] == "failsafe"
    ]
    decisions = [r for r in events if r["ev"] == "decision"]
    gesture_cmds = [
        r for r in events if r["ev"] == "cmd_sent" and r.get("origin") == "gesture"
    ]

    latency = {
        "stream_ms_mean": _mean(streams),
        "stream_ms_p95": _p95(streams),
        "process_ms_mean": _mean(processes),
        "process_ms_p95": _p95(processes),
        "rtt_ms_mean": _mean(rtts),
        "rtt_samples": len(rtts),
        "end_to_end_ms_mean": _mean([r.end_to_end_ms for r in records]),
        "end_to_end_ms_p95": _p95([r.end_to_end_ms for r in records]),
        "queue_ms_mean": _mean([r.queue_ms for r in records]),
        "decomposition_gap_ms_max": max(
            (abs(r.decomposition_gap_ms) for r in records), default=0.0
        ),
        "end_to_end_samples": len(records),
        "uncorrelated_commands": uncorrelated,
    }
    counts = {
        "frames_sent": sum(1 for r in events if r["ev"] == "frame_sent"),
        "frames_received": sum(1 for r in events if r["ev"] == "frame_recv"),
        "frames_classified": len(classified),
        "no_detections": sum(1 for r in events if r["ev"] == "no_detection"),
        "drops": drop_counts,
        "decisions": {
            kind: sum(1 for d in decisions if d["kind"] == kind)
            for kind in ("command", "hover_failsafe", "none")
        },
        "gesture_commands": len(gesture_cmds),
    }
    summary = {
        "scenario": meta["name"],
        "seed": meta["seed"],
        **{k: track[k] for k in (
            "traj_accuracy_pct", "mean_dev_cm", "hover_dev_cm", "lateral_dev_cm",
            "heading_err_deg", "max_range_m", "min_battery_pct",
        )},
        "cmd_success_pct": success["cmd_success_pct"],
        "stream_ms_mean": latency["stream_ms_mean"],
        "process_ms_mean": latency["process_ms_mean"],
        "rtt_ms_mean": latency["rtt_ms_mean"],
        "end_to_end_ms_mean": latency["end_to_end_ms_mean"],
        "failsafe_modes": sorted({f["mode"] for f in failsafes}),
    }
    return {
        "summary": summary,
        "latency": latency,
        "tracking": track,
        "commands": success,
        "counts": counts,
        "failsafes": failsafes,
    }
