"""Command-line entry point.

Subcommands: run, evaluate, serve, record, replay, map-validate. All
randomness flows from --seed, and identical invocations print identical
bytes (no timestamps in any machine-readable output). Exit codes: 0 on
success, 1 on runtime or verification failure, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys

from .env import build_agent, evaluate, make_env, record_rollouts, replay, run_episode
from .roadmap import MapError, load_map
from .tasks import TASK_NAMES, TaskError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

METRIC_COLUMNS = ("success_rate", "success_se", "collision_rate",
                  "collision_se", "avg_speed", "avg_speed_se")
CSV_HEADER = "task," + ",".join(METRIC_COLUMNS)


def _parse_overrides(raw: str | None) -> dict:
    if not raw:
        return {}
    doc = json.loads(raw)
    if not isinstance(doc, dict):
        raise TaskError("overrides must be a JSON object")
    return doc


def _add_common(p: argparse.ArgumentParser, agents: bool = True):
    p.add_argument("task", help="task name, one of: " + ", ".join(TASK_NAMES))
    if agents:
        p.add_argument("agent", choices=("autopilot", "random", "zero"),
                       help="built-in agent")
    p.add_argument("--episodes", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--overrides", default=None,
                   help="JSON object of dot-path config overrides")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drive2d",
        description="2D driving tasks with a reset/step protocol, "
                    "wire server, and live telemetry.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run episodes and print outcomes")
    _add_common(p_run)
    p_run.add_argument("--viz", type=int, default=None, metavar="PORT",
                       help="serve live telemetry on this port while running")

    p_eval = sub.add_parser("evaluate", help="aggregate episode metrics")
    _add_common(p_eval)
    p_eval.add_argument("--format", choices=("table", "csv", "json"),
                        default="table")

    p_serve = sub.add_parser("serve", help="serve the wire protocol")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8740)

    p_record = sub.add_parser("record", help="record rollout logs")
    _add_common(p_record)
    p_record.add_argument("--out", required=True, type=pathlib.Path)

    p_replay = sub.add_parser("replay", help="verify a recorded log")
    p_replay.add_argument("log", type=pathlib.Path)

    p_map = sub.add_parser("map-validate", aliases=["map_validate"],
                           help="validate a map file")
    p_map.add_argument("path", type=pathlib.Path)
    return parser


def _cmd_run(args) -> int:
    hub = None
    viz_server = None
    if args.viz is not None:
        from .viz import TelemetryHub, VizServer
        hub = TelemetryHub()
        viz_server = VizServer(hub, port=args.viz).start()
        host, port = viz_server.address
        print(f"telemetry: http://{host}:{port}/", file=sys.stderr)
    try:
        env = make_env(args.task, _parse_overrides(args.overrides), hub=hub)
        agent = build_agent(args.agent, env)
        for ep in range(args.episodes):
            cause, speeds, total = run_episode(env, agent, args.seed + ep)
            print(f"episode {ep}: {cause} steps={len(speeds)} "
                  f"reward={total:.3f}")
        return EXIT_OK
    finally:
        if viz_server is not None:
            viz_server.stop()


def _cmd_evaluate(args) -> int:
    env = make_env(args.task, _parse_overrides(args.overrides))
    agent = build_agent(args.agent, env)
    metrics = evaluate(env, agent, args.episodes, args.seed)
    if args.format == "json":
        doc = {"task": args.task}
        doc.update(metrics.as_dict())
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        print(CSV_HEADER)
        row = [args.task] + [f"{getattr(metrics, c):.4f}" for c in METRIC_COLUMNS]
        print(",".join(row))
    else:
        print(f"task: {args.task}  episodes: {metrics.episodes}")
        print(f"  success:     {metrics.success_rate:6.2f}% "
              f"± {metrics.success_se:.2f}%")
        print(f"  collision:   {metrics.collision_rate:6.2f}% "
              f"± {metrics.collision_se:.2f}%")
        print(f"  out of lane: {metrics.out_of_lane_rate:6.2f}% "
              f"± {metrics.out_of_lane_se:.2f}%")
        print(f"  timeout:     {metrics.timeout_rate:6.2f}% "
              f"± {metrics.timeout_se:.2f}%")
        print(f"  avg speed:   {metrics.avg_speed:6.2f} m/s "
              f"± {metrics.avg_speed_se:.2f}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .wire import WireServer
    server = WireServer(args.host, args.port)
    host, port = server.address
    print(f"wire protocol on {host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _cmd_record(args) -> int:
    env = make_env(args.task, _parse_overrides(args.overrides))
    agent = build_agent(args.agent, env)
    with args.out.open("w") as sink:
        n = record_rollouts(env, agent, args.episodes, sink, args.seed)
    print(f"recorded {n} episodes to {args.out}")
    return EXIT_OK


def _cmd_replay(args) -> int:
    with args.log.open() as fh:
        mismatches = replay(fh)
    if mismatches:
        for m in mismatches:
            print(f"MISMATCH {m}")
        return EXIT_FAILURE
    print("replay ok")
    return EXIT_OK


def _cmd_map_validate(args) -> int:
    try:
        doc = json.loads(args.path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"invalid map: {exc}")
        return EXIT_FAILURE
    try:
        road_map = load_map(doc)
    except MapError as exc:
        print(f"invalid map: {exc}")
        return EXIT_FAILURE
    print(f"ok: {len(road_map.lanes)} lanes, {len(road_map.signals)} signals")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "evaluate": _cmd_evaluate,
        "serve": _cmd_serve,
        "record": _cmd_record,
        "replay": _cmd_replay,
        "map-validate": _cmd_map_validate,
        "map_validate": _cmd_map_validate,
    }
    try:
        return handlers[args.command](args)
    except TaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (json.JSONDecodeError,) as exc:
        print(f"error: bad JSON argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
