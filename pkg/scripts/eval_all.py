"""Evaluate the built-in agents across every task and print one table.

Each (task, agent) cell runs a block of seeded episodes and reports the
aggregate rates. Useful as a smoke benchmark after changes to the
autopilot, reward shaping, or task configs.

Usage: python scripts/eval_all.py [--episodes N] [--seed S] [--agent NAME]
                                  [--format table|csv]
"""
from __future__ import annotations

import argparse
import sys
import time

from drive2d.cli import CSV_HEADER, METRIC_COLUMNS
from drive2d.env import build_agent, evaluate, make_env
from drive2d.tasks import TASK_NAMES


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--episodes", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--agent", default="autopilot",
                        choices=("autopilot", "random", "zero"))
    parser.add_argument("--format", default="table", choices=("table", "csv"))
    args = parser.parse_args(argv)

    if args.format == "csv":
        print(CSV_HEADER)
    else:
        print(f"agent={args.agent} episodes={args.episodes} seed={args.seed}")
        print(f"{'task':<20} {'success':>10} {'collision':>10} "
              f"{'off-lane':>10} {'timeout':>10} {'speed':>12}")

    started = time.monotonic()
    for name in TASK_NAMES:
        # observations are irrelevant to the built-in agents; skip the
        # expensive modalities so the sweep stays quick
        env = make_env(name, {"modalities": ["state_vector"]})
        agent = build_agent(args.agent, env)
        m = evaluate(env, agent, args.episodes, args.seed)
        env.close()
        if args.format == "csv":
            row = [name] + [f"{getattr(m, c):.4f}" for c in METRIC_COLUMNS]
            print(",".join(row))
        else:
            print(f"{name:<20} {m.success_rate:9.1f}% {m.collision_rate:9.1f}% "
                  f"{m.out_of_lane_rate:9.1f}% {m.timeout_rate:9.1f}% "
                  f"{m.avg_speed:6.2f} m/s")
    if args.format == "table":
        print(f"done in {time.monotonic() - started:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
