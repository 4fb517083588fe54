"""Report files: JSON report plus per-sample CSV tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .metrics import latency_records

SUMMARY_COLUMNS = ["key", "value"]
TELEMETRY_COLUMNS = [
    "t_us", "x_cm", "y_cm", "z_cm", "yaw_deg", "bat", "mode",
    "sp_x_cm", "sp_y_cm", "sp_z_cm", "yaw_sp_deg",
]
LATENCY_COLUMNS = ["stream_ms", "process_ms", "queue_ms", "end_to_end_ms", "rtt_ms"]


def write_report(
    report: dict,
    events: list[dict],
    out_dir: str | Path,
    formats: tuple[str, ...] = ("json", "csv"),
    prefix: str = "run",
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "json" in formats:
        path = out / f"{prefix}.report.json"
        path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        written.append(path)
    if "csv" in formats:
        summary_path = out / f"{prefix}.summary.csv"
        with open(summary_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for key, value in sorted(report.get("summary", {}).items()):
                writer.writerow([key, json.dumps(value) if isinstance(value, list) else value])
        written.append(summary_path)

        telemetry_path = out / f"{prefix}.telemetry.csv"
        with open(telemetry_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TELEMETRY_COLUMNS)
            for r in events:
                if r["ev"] == "telem":
                    writer.writerow([r.get(c) for c in TELEMETRY_COLUMNS])
        written.append(telemetry_path)

        latency_path = out / f"{prefix}.latency.csv"
        records, _ = latency_records(events)
        with open(latency_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(LATENCY_COLUMNS)
            for rec in records:
                writer.writerow(
                    [
                        f"{rec.stream_ms:.3f}",
                        f"{rec.process_ms:.3f}",
                        f"{rec.queue_ms:.3f}",
                        f"{rec.end_to_end_ms:.3f}",
                        f"{rec.rtt_ms:.3f}" if rec.rtt_ms is not None else "",
                    ]
                )
        written.append(latency_path)
    return written
