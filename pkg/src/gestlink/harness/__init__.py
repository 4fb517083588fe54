"""Experiment harness: scenarios, runner, metrics, sweeps, reports, CLI."""

from .scenarios import BUILTIN_SCENARIOS, Scenario, build_scenario, scenario_from_json
from .experiment import RunResult, build_system, check_assertions, run_experiment
from .metrics import OnlineTrajectoryTracker, compute_report, latency_records
from .replay import replay, reports_equal
from .report import write_report
from .sweep import eval_distance_sweep, write_sweep_csv
from .capacity import capacity_sweep, write_capacity_csv

__all__ = [
    "BUILTIN_SCENARIOS",
    "OnlineTrajectoryTracker",
    "RunResult",
    "Scenario",
    "build_scenario",
    "build_system",
    "capacity_sweep",
    "check_assertions",
    "compute_report",
    "eval_distance_sweep",
    "latency_records",
    "replay",
    "reports_equal",
    "run_experiment",
    "scenario_from_json",
    "write_capacity_csv",
    "write_report",
    "write_sweep_csv",
]
