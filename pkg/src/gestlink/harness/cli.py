"""Command-line front door for training, experiments, and the live console."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from ..gesturenet import (
    TrainConfig,
    evaluate,
    landmark_network,
    load_checkpoint,
    raster_network,
    save_checkpoint,
    save_history_csv,
    train,
)
from ..perception import DatasetSpec, generate_dataset
from .capacity import capacity_sweep, write_capacity_csv
from .experiment import run_experiment
from .replay import replay, reports_equal
from .report import write_report
from .scenarios import BUILTIN_SCENARIOS, apply_config_overrides, build_scenario, scenario_from_json
from .sweep import eval_distance_sweep, write_sweep_csv


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    out = _out_dir(args)
    raster = args.front_end == "raster"
    spec = DatasetSpec(
        per_class=args.per_class,
        seed=args.seed,
        raster_side=32 if raster else None,
        background_noise=0.3 if raster else 0.0,
    )
    print(f"generating dataset: {spec.per_class * 6} samples ({args.front_end})")
    ds = generate_dataset(spec)
    x = ds.raster_tensors() if raster else ds.features()
    tr, va, te = ds.split["train"], ds.split["val"], ds.split["test"]
    config = TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        dropout_rate=args.dropout,
        seed=args.seed,
    )
    net = (
        raster_network(seed=args.seed, dropout_rate=config.dropout_rate)
        if raster
        else landmark_network(seed=args.seed, dropout_rate=config.dropout_rate)
    )
    t0 = time.time()
    result = train(net, x[tr], ds.labels[tr], config, x[va], ds.labels[va])
    wall = time.time() - t0
    metrics = evaluate(result.params, x[te], ds.labels[te])
    model_path = out / f"{args.front_end}.gnet"
    save_checkpoint(result.params, model_path)
    save_history_csv(result.history, out / f"{args.front_end}.history.csv")
    print(
        f"trained {len(result.history)} epochs in {wall:.1f}s "
        f"(early stop: {result.stopped_early}), test accuracy {metrics.accuracy:.4f}"
    )
    print(f"wrote {model_path}")
    return 0


def cmd_eval_distance(args) -> int:
    out = _out_dir(args)
    landmark_model = load_checkpoint(args.landmark_model)
    raster_model = load_checkpoint(args.raster_model) if args.raster_model else None
    profiles = ["baseline", "extended"] if args.profile == "both" else [args.profile]
    all_rows = []
    for profile in profiles:
        rows = eval_distance_sweep(
            landmark_model,
            raster_model,
            profile,
            samples_per_distance=args.samples,
            seed=args.seed,
        )
        all_rows.extend(rows)
        for r in rows:
            raster = f" raster={r.raster_acc:.3f}" if r.raster_acc is not None else ""
            print(
                f"{profile:9s} d={r.distance_m:4.1f} m  detect={r.detect_rate:.3f}  "
                f"landmark={r.landmark_acc:.3f}{raster}"
            )
    path = out / "distance_sweep.csv"
    write_sweep_csv(all_rows, path)
    print(f"wrote {path}")
    return 0


def _load_scenario(args):
    if args.scenario_file:
        scenario = scenario_from_json(args.scenario_file)
    else:
        scenario = build_scenario(args.scenario, seed=args.seed)
    if args.config:
        scenario = apply_config_overrides(scenario, json.loads(Path(args.config).read_text()))
    return scenario


def cmd_run_sim(args) -> int:
    out = _out_dir(args)
    scenario = _load_scenario(args)
    model = load_checkpoint(args.model)
    if args.udp:
        from .udp import run_experiment_udp

        report = run_experiment_udp(scenario, model, out_dir=out)
    else:
        result = run_experiment(scenario, model, out_dir=out)
        report = result.report
    for a in report["assertions"]:
        status = "PASS" if a["ok"] else "FAIL"
        print(f"[{status}] {a['key']} = {a['value']:.3f} ({a['op']} {a['threshold']})")
    print(f"scenario {scenario.name}: {'PASS' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else 1


def cmd_latency(args) -> int:
    args.scenario = "latency-default"
    args.scenario_file = None
    args.udp = False
    rc = cmd_run_sim(args)
    return rc


def cmd_capacity(args) -> int:
    out = _out_dir(args)
    model = load_checkpoint(args.model)
    targets = tuple(float(t) for t in args.targets.split(","))
    rows = capacity_sweep(model, targets_ms=targets, seed=args.seed)
    for r in rows:
        print(
            f"target {r.target_ms:5.1f} ms -> measured {r.measured_ms:6.2f} ms, "
            f"theoretical {r.theoretical_fps:6.1f} FPS, input-capped {r.observed_fps:4.1f} FPS"
        )
    path = out / "capacity.csv"
    write_capacity_csv(rows, path)
    print(f"wrote {path}")
    return 0


def cmd_replay(args) -> int:
    report = replay(args.log)
    out = _out_dir(args)
    path = out / "replay.report.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")
    original = Path(args.log).with_suffix("").with_suffix("")  # strip .events.jsonl
    sibling = Path(str(original) + ".report.json")
    if sibling.exists():
        live = json.loads(sibling.read_text())
        same = reports_equal(live, report)
        print(f"matches live report: {same}")
        return 0 if same else 1
    return 0


def cmd_report(args) -> int:
    from ..runtime import read_event_log

    events = read_event_log(args.log)
    report = replay(args.log)
    formats = tuple(args.format.split(","))
    files = write_report(report, events, _out_dir(args), formats=formats, prefix=args.prefix)
    for f in files:
        print(f"wrote {f}")
    return 0


def cmd_serve(args) -> int:
    from .serve import start_serve

    scenario = _load_scenario(args)
    if args.duration is not None:
        from dataclasses import replace

        scenario = replace(scenario, duration_s=args.duration)
    model = load_checkpoint(args.model)
    static_dir = args.static_dir
    if static_dir is None:
        candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    session = start_serve(
        scenario,
        model,
        bridge_port=args.port,
        static_dir=static_dir,
        headless=args.headless,
        record=args.record,
        speed=args.speed,
    )
    if not args.headless:
        print(f"console bridge on ws://127.0.0.1:{session.bridge_port}/ws", flush=True)
        if static_dir:
            print(f"console page on http://127.0.0.1:{session.bridge_port}/")
    print(f"running scenario {scenario.name} for {scenario.duration_s:.0f} s (Ctrl-C stops)")
    try:
        session.wait()
    except KeyboardInterrupt:
        pass
    session.stop()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gestlink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=False, scenario=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        p.add_argument("--config", default=None,
                       help="JSON overrides: {\"pipeline\": {...}, \"sim\": {...}, \"gesture_map\": {...}}")
        if model:
            p.add_argument("--model", required=True, help="gnet checkpoint")
        if scenario:
            p.add_argument("--scenario", default="hover-hold", choices=sorted(BUILTIN_SCENARIOS))
            p.add_argument("--scenario-file", default=None, help="custom scenario JSON")

    p = sub.add_parser("train", help="train a gesture classifier front-end")
    common(p)
    p.add_argument("--front-end", choices=["landmark", "raster"], default="landmark")
    p.add_argument("--per-class", type=int, default=1500)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--dropout", type=float, default=0.4)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval-distance", help="accuracy vs distance sweep")
    common(p)
    p.add_argument("--landmark-model", required=True)
    p.add_argument("--raster-model", default=None)
    p.add_argument("--profile", choices=["baseline", "extended", "both"], default="both")
    p.add_argument("--samples", type=int, default=300)
    p.set_defaults(fn=cmd_eval_distance)

    p = sub.add_parser("run-sim", help="run a closed-loop scenario")
    common(p, model=True, scenario=True)
    p.add_argument("--udp", action="store_true", help="drone as a separate process over UDP")
    p.set_defaults(fn=cmd_run_sim)

    p = sub.add_parser("latency", help="latency budget scenario")
    common(p, model=True)
    p.set_defaults(fn=cmd_latency)

    p = sub.add_parser("capacity", help="edge capacity sweep with calibrated busy-work")
    common(p, model=True)
    p.add_argument("--targets", default="22,28,35")
    p.set_defaults(fn=cmd_capacity)

    p = sub.add_parser("replay", help="recompute a report from an event log")
    common(p)
    p.add_argument("--log", required=True)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("report", help="emit CSV/JSON report files from an event log")
    common(p)
    p.add_argument("--log", required=True)
    p.add_argument("--format", default="csv,json")
    p.add_argument("--prefix", default="run")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("serve", help="interactive mode with the console bridge")
    common(p, model=True, scenario=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static-dir", default=None)
    p.add_argument("--headless", action="store_true", help="no bridge, log only")
    p.add_argument("--record", default=None, help="event log path on exit")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--speed", type=float, default=1.0, help="virtual seconds per wall second")
    p.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
