"""Offline recomputation of a run's report from its event log."""

from __future__ import annotations

import json
from pathlib import Path

from ..runtime import read_event_log
from .experiment import check_assertions
from .metrics import compute_report


def replay(log_path: str | Path) -> dict:
    """Recompute the full report from a log file. Produces exactly the
    live run's report: metrics are a pure function of the events, and the
    assertion gates ride along in the scenario header."""
    events = read_event_log(log_path)
    report = compute_report(events)
    meta = next(r for r in events if r["ev"] == "scenario")
    assertions = [tuple(a) for a in meta.get("assertions", [])]
    results = check_assertions(report, assertions)
    report["assertions"] = results
    report["passed"] = all(a["ok"] for a in results)
    return report


def reports_equal(a: dict, b: dict) -> bool:
    return json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
