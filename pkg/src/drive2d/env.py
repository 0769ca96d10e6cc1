"""Episode protocol: reset/step over one task, metrics, agents, rollout logs.

DriveEnv owns a WorldState, the ego's route, and the per-episode reward
bookkeeping. Actions are a continuous [throttle, steer_cmd] pair in
[-1, 1], or an index into the fixed 15-way grid (3 throttle levels x 5
steer levels). Episodes end terminated (collision, lane departure,
destination) or truncated (timeout), never both.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import world as W
from .observer import Observer, ObserverConfig
from .rewards import SignalRewardTracker, compute_reward
from .routing import RandomRoamPlanner
from .tasks import (CAUSE_COLLISION, CAUSE_DESTINATION, CAUSE_OUT_OF_LANE,
                    CAUSE_TIMEOUT, TaskConfig, TaskError, check_termination,
                    make_task)

DISCRETE_THROTTLE = (-1.0, 0.0, 1.0)
DISCRETE_STEER = (-0.6, -0.2, 0.0, 0.2, 0.6)
N_DISCRETE = len(DISCRETE_THROTTLE) * len(DISCRETE_STEER)

SPAWN_ATTEMPTS = 100
SPAWN_MARGIN = 3.0


class ProtocolError(RuntimeError):
    """Episode protocol misuse: step before reset or after the end."""


def parse_action(action) -> tuple[float, float]:
    """Normalize an action to a clamped (throttle, steer_cmd) pair."""
    if isinstance(action, (int, np.integer)) and not isinstance(action, bool):
        idx = int(action)
        if not 0 <= idx < N_DISCRETE:
            raise ProtocolError(f"discrete action {idx} outside [0, {N_DISCRETE})")
        t_idx, s_idx = divmod(idx, len(DISCRETE_STEER))
        return DISCRETE_THROTTLE[t_idx], DISCRETE_STEER[s_idx]
    arr = np.asarray(action, dtype=float).reshape(-1)
    if arr.shape[0] != 2 or not np.all(np.isfinite(arr)):
        raise ProtocolError(f"action must be [throttle, steer_cmd], got {action!r}")
    return float(np.clip(arr[0], -1.0, 1.0)), float(np.clip(arr[1], -1.0, 1.0))


@dataclass
class StepResult:
    obs: dict
    reward: float
    terminated: bool
    truncated: bool
    info: dict


@dataclass
class EpisodeMetrics:
    episodes: int
    success_rate: float
    success_se: float
    collision_rate: float
    collision_se: float
    out_of_lane_rate: float
    out_of_lane_se: float
    timeout_rate: float
    timeout_se: float
    avg_speed: float
    avg_speed_se: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def metrics_from_outcomes(causes: list[str],
                          episode_speeds: list[list[float]]) -> EpisodeMetrics:
    """Aggregate terminal causes and per-step speeds into rate metrics.

    Rates are Bernoulli means over episodes with standard error
    sqrt(p(1-p)/n); average speed pools every step of every episode, with
    its error taken across per-episode means.
    """
    n = len(causes)
    if n < 1:
        raise ValueError("need at least one episode")

    def rate(cause: str) -> tuple[float, float]:
        p = sum(1 for c in causes if c == cause) / n
        return 100.0 * p, 100.0 * math.sqrt(p * (1.0 - p) / n)

    success, success_se = rate(CAUSE_DESTINATION)
    collision, collision_se = rate(CAUSE_COLLISION)
    ool, ool_se = rate(CAUSE_OUT_OF_LANE)
    timeout, timeout_se = rate(CAUSE_TIMEOUT)
    all_speeds = [s for ep in episode_speeds for s in ep]
    avg_speed = float(np.mean(all_speeds)) if all_speeds else 0.0
    ep_means = [float(np.mean(ep)) for ep in episode_speeds if ep]
    avg_speed_se = (float(np.std(ep_means) / math.sqrt(len(ep_means)))
                    if len(ep_means) > 1 else 0.0)
    return EpisodeMetrics(
        episodes=n,
        success_rate=success, success_se=success_se,
        collision_rate=collision, collision_se=collision_se,
        out_of_lane_rate=ool, out_of_lane_se=ool_se,
        timeout_rate=timeout, timeout_se=timeout_se,
        avg_speed=avg_speed, avg_speed_se=avg_speed_se,
    )


class DriveEnv:
    """One task bound to one world; reset() starts an episode, step()
    advances it. An optional telemetry hub receives per-step snapshots;
    publishing never touches simulation state."""

    def __init__(self, task: TaskConfig, hub=None):
        self.task = task
        self.roadmap = task.load_roadmap()
        self.observer = Observer(ObserverConfig(
            sensing=task.visibility,
            intentions=task.intention,
            modalities=tuple(task.modalities),
        ))
        self.hub = hub
        self.world: W.WorldState | None = None
        self.ego_id: str | None = None
        self.planner = None
        self.route = None
        self.episode_index = -1
        self._done = True
        self._distance = 0.0
        self._tracker = None
        self._prev_hit = None
        self._traffic_origin: dict[str, tuple[str, float]] = {}
        self._reward_window: deque[float] = deque(maxlen=100)
        self._recent_causes: deque[str] = deque(maxlen=20)

    # -- episode lifecycle -------------------------------------------------

    def reset(self, seed: int) -> tuple[dict, dict]:
        task = self.task
        if self.world is None:
            self.world = W.WorldState(self.roadmap, seed)
        else:
            self.world.reset(seed)
        world = self.world

        self.ego_id = W.spawn_vehicle(world, task.ego_spawn, role=W.ROLE_EGO)
        self.planner = task.planner.build(self.roadmap, world.rng)
        self.route = self.planner.init_route(task.ego_spawn.lane,
                                             task.ego_spawn.offset)
        # waypoints already under the spawn pose are not progress
        ego_pos = world.actors[self.ego_id].pose.position
        self.route.advance(ego_pos.x, ego_pos.y)
        world.actors[self.ego_id].route = self.route

        self._traffic_origin.clear()
        self._spawn_traffic()

        self.episode_index += 1
        self._done = False
        self._distance = 0.0
        self._tracker = SignalRewardTracker(task.reward)
        ego = world.actors[self.ego_id]
        self._prev_hit = self.roadmap.lane_query(ego.pose.position.x,
                                                 ego.pose.position.y)
        obs = self.observer.observe(world, self.ego_id)
        info = {"tick": 0, "speed": ego.speed, "collision": 0,
                "seed": seed, "termination": ""}
        self._publish(obs, 0.0)
        return obs, info

    def _spawn_traffic(self):
        flow = self.task.traffic
        if flow.count == 0 or not flow.lanes:
            return
        world = self.world
        rng = world.rng.stream("traffic")
        roam = RandomRoamPlanner(self.roadmap, world.rng)
        for _ in range(flow.count):
            placed = False
            for _ in range(SPAWN_ATTEMPTS):
                lane_id = flow.lanes[int(rng.integers(len(flow.lanes)))]
                lane = self.roadmap.lanes[lane_id]
                lo, hi = SPAWN_MARGIN, lane.length - SPAWN_MARGIN
                if flow.spawn_range is not None:
                    lo = max(lo, flow.spawn_range[0])
                    hi = min(hi, flow.spawn_range[1])
                if hi <= lo:
                    continue
                offset = float(rng.uniform(lo, hi))
                try:
                    aid = W.spawn_vehicle(
                        world,
                        W.SpawnSpec(lane=lane_id, offset=offset,
                                    speed=0.0, controller=W.CONTROLLER_AUTOPILOT),
                        role=W.ROLE_BACKGROUND,
                        autopilot=flow.behavior,
                    )
                except W.WorldError:
                    continue
                world.actors[aid].route = roam.init_route(lane_id, offset)
                self._traffic_origin[aid] = (lane_id, offset)
                placed = True
                break
            if not placed:
                raise TaskError(
                    f"could not place traffic on task '{self.task.name}' "
                    f"after {SPAWN_ATTEMPTS} attempts")

    def step(self, action) -> StepResult:
        if self.world is None or self._done:
            raise ProtocolError("step requires an active episode; call reset")
        throttle, steer_cmd = parse_action(action)
        world = self.world
        task = self.task
        ego = world.actors[self.ego_id]

        W.tick(world, {self.ego_id: (throttle, steer_cmd)})

        pairs = W.detect_collisions(world)
        collided = any(self.ego_id in pair for pair in pairs)

        px, py = ego.pose.position
        newly_reached = self.route.advance(px, py)
        self.planner.extend_route(self.route)
        self._distance += abs(ego.speed) * world.dt
        self._maintain_traffic()

        hit = self.roadmap.lane_query(px, py)
        half_width = self.roadmap.lanes[hit.lane_id].width / 2.0
        out_of_lane = abs(hit.lateral) > half_width + task.out_of_lane_limit
        destination = self.route.exhausted
        if task.distance_budget is not None:
            destination = destination or self._distance >= task.distance_budget
        signal_adjust = self._tracker.update(world, ego, self._prev_hit, hit)
        self._prev_hit = hit

        terms = compute_reward(ego, self.route, task.reward, collided,
                               waypoints_reached=newly_reached,
                               destination=destination,
                               out_of_lane=out_of_lane,
                               signal_adjust=signal_adjust)
        cause = check_termination(world, self.ego_id, self.route, task,
                                  collided, self._distance)
        terminated = cause in (CAUSE_COLLISION, CAUSE_OUT_OF_LANE,
                               CAUSE_DESTINATION)
        truncated = cause == CAUSE_TIMEOUT
        if terminated or truncated:
            self._done = True
            self._recent_causes.append(cause)

        obs = self.observer.observe(world, self.ego_id)
        info = terms.as_dict()
        info.update({
            "tick": world.tick,
            "speed": ego.speed,
            "distance": self._distance,
            "termination": cause or "",
        })
        self._publish(obs, terms.total)
        return StepResult(obs=obs, reward=terms.total,
                          terminated=terminated, truncated=truncated,
                          info=info)

    def _maintain_traffic(self):
        world = self.world
        roam = RandomRoamPlanner(self.roadmap, world.rng)
        for aid in sorted(self._traffic_origin):
            actor = world.actors.get(aid)
            if actor is None or actor.route is None:
                continue
            actor.route.advance(actor.pose.position.x, actor.pose.position.y)
            roam.extend_route(actor.route)
            if actor.route.exhausted and self.task.traffic.respawn:
                self._respawn(actor)

    def _respawn(self, actor):
        """Teleport a finished background vehicle back to its origin when
        the slot is free; otherwise leave it and retry next step."""
        lane_id, offset = self._traffic_origin[actor.id]
        lane = self.roadmap.lanes[lane_id]
        x, y = lane.point_at(offset)
        heading = lane.tangent_at(offset)
        from .geometry import obb_overlap, rect_corners
        fp = rect_corners(x, y, heading, actor.length, actor.width)
        for other in self.world.actors.values():
            if other.id != actor.id and obb_overlap(fp, other.footprint(),
                                                    W.COLLISION_TOUCH_TOL):
                return
        actor.pose = W.Pose(W.Vec2(x, y), heading)
        actor.speed = 0.0
        actor.steer = 0.0
        actor.honored_signs.clear()
        roam = RandomRoamPlanner(self.roadmap, self.world.rng)
        actor.route = roam.init_route(lane_id, offset)

    def close(self):
        self.world = None
        self._done = True

    # -- telemetry ----------------------------------------------------------

    def _publish(self, obs: dict, reward: float):
        if self.hub is None:
            return
        self._reward_window.append(reward)
        frame = obs.get("bev")
        causes = list(self._recent_causes)
        metrics = {}
        if causes:
            n = len(causes)
            metrics = {
                "episodes": n,
                "success_rate": 100.0 * causes.count(CAUSE_DESTINATION) / n,
                "collision_rate": 100.0 * causes.count(CAUSE_COLLISION) / n,
                "out_of_lane_rate": 100.0 * causes.count(CAUSE_OUT_OF_LANE) / n,
                "timeout_rate": 100.0 * causes.count(CAUSE_TIMEOUT) / n,
            }
        self.hub.publish(
            episode=self.episode_index,
            tick=self.world.tick,
            reward=reward,
            reward_mean=float(np.mean(self._reward_window)),
            metrics=metrics,
            frame=frame,
        )

    # -- agent helpers -------------------------------------------------------

    def autopilot_action(self) -> tuple[float, float]:
        """Continuous action the rule-based controller would take for the ego."""
        return W.autopilot_control(self.world, self.ego_id,
                                   self.task.ego_autopilot)


def make_env(name: str, overrides: dict | None = None, hub=None) -> DriveEnv:
    return DriveEnv(make_task(name, overrides), hub=hub)


# -- baseline agents ----------------------------------------------------------


class AutopilotAgent:
    """Drives the ego with the same rule-based controller as traffic."""

    def __init__(self, env: DriveEnv):
        self.env = env

    def __call__(self, obs) -> tuple[float, float]:
        return self.env.autopilot_action()


class RandomAgent:
    """Uniform random continuous actions from the env's seeded stream."""

    def __init__(self, env: DriveEnv):
        self.env = env

    def __call__(self, obs) -> tuple[float, float]:
        rng = self.env.world.rng.stream("agent")
        return tuple(rng.uniform(-1.0, 1.0, 2))


class ZeroAgent:
    """No throttle, no steering."""

    def __call__(self, obs) -> tuple[float, float]:
        return (0.0, 0.0)


AGENTS = {"autopilot": AutopilotAgent, "random": RandomAgent, "zero": ZeroAgent}


def build_agent(name: str, env: DriveEnv):
    if name not in AGENTS:
        raise TaskError(f"unknown agent '{name}'; valid agents: "
                        + ", ".join(sorted(AGENTS)))
    cls = AGENTS[name]
    return cls(env) if cls is not ZeroAgent else cls()


def run_episode(env: DriveEnv, agent, seed: int,
                step_limit: int | None = None) -> tuple[str, list[float], float]:
    """Run one episode to completion; returns (cause, speeds, total reward)."""
    obs, _ = env.reset(seed)
    speeds: list[float] = []
    total = 0.0
    steps = 0
    while True:
        result = env.step(agent(obs))
        obs = result.obs
        speeds.append(result.info["speed"])
        total += result.reward
        steps += 1
        if result.terminated or result.truncated:
            return result.info["termination"], speeds, total
        if step_limit is not None and steps >= step_limit:
            return CAUSE_TIMEOUT, speeds, total


def evaluate(env: DriveEnv, agent, episodes: int, seed_base: int) -> EpisodeMetrics:
    """Aggregate metrics over consecutive seeds starting at seed_base."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    causes: list[str] = []
    speeds: list[list[float]] = []
    for ep in range(episodes):
        cause, ep_speeds, _ = run_episode(env, agent, seed_base + ep)
        causes.append(cause)
        speeds.append(ep_speeds)
    return metrics_from_outcomes(causes, speeds)


# -- rollout recording ---------------------------------------------------------


def record_rollouts(env: DriveEnv, agent, episodes: int, sink,
                    seed_base: int = 0) -> int:
    """Write JSON-lines rollout logs: a header line per episode, then one
    line per step. Returns the number of episodes written."""
    for ep in range(episodes):
        seed = seed_base + ep
        obs, _ = env.reset(seed)
        sink.write(json.dumps({"episode": ep, "task": env.task.name,
                               "seed": seed}) + "\n")
        while True:
            action = agent(obs)
            result = env.step(action)
            obs = result.obs
            ego = env.world.actors[env.ego_id]
            if isinstance(action, (int, np.integer)):
                rec_action = int(action)
            else:
                rec_action = [float(a) for a in
                              np.asarray(action, dtype=float).reshape(-1)]
            record = {
                "tick": result.info["tick"],
                "action": rec_action,
                "reward": result.reward,
                "terms": {k: result.info[k] for k in
                          ("v_parallel", "v_perp", "collision",
                           "waypoints_reached", "bonus_terms", "total")},
                "pose": [ego.pose.position.x, ego.pose.position.y,
                         ego.pose.heading],
                "speed": ego.speed,
                "termination": result.info["termination"],
            }
            sink.write(json.dumps(record) + "\n")
            if result.terminated or result.truncated:
                break
    return episodes


def replay(lines) -> list[str]:
    """Re-run recorded rollouts and compare rewards bitwise.

    Returns a list of human-readable mismatch descriptions; empty means
    the log reproduced exactly.
    """
    episodes: list[tuple[dict, list[dict]]] = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        if "seed" in doc and "tick" not in doc:
            episodes.append((doc, []))
        else:
            if not episodes:
                return ["log does not start with an episode header"]
            episodes[-1][1].append(doc)

    mismatches: list[str] = []
    env = None
    for header, steps in episodes:
        if env is None or env.task.name != header["task"]:
            env = make_env(header["task"])
        env.reset(header["seed"])
        for i, rec in enumerate(steps):
            result = env.step(rec["action"])
            if result.reward != rec["reward"]:
                mismatches.append(
                    f"episode {header['episode']} step {i} (tick {rec['tick']}): "
                    f"reward {result.reward!r} != recorded {rec['reward']!r}")
            if (result.terminated or result.truncated) and i < len(steps) - 1:
                mismatches.append(
                    f"episode {header['episode']} ended early at step {i}")
                break
    return mismatches
