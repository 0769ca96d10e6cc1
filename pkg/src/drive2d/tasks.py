"""Built-in driving tasks: maps, spawns, traffic, termination.

Each task binds a map file, an ego spawn and planner, a traffic flow, and
episode limits. Difficulty controls background traffic: simple runs empty,
medium adds four lawful vehicles, hard adds eight aggressive ones that
ignore signals and leading vehicles. Termination causes are checked in a
fixed priority: collision, then lane departure, then destination, then
timeout.
"""
from __future__ import annotations

import copy
import json
import pathlib
from dataclasses import dataclass, field

from .observer import IntentionConfig, SensorConfig
from .rewards import RewardConfig
from .roadmap import RoadMap, load_map
from .routing import PlannerSpec
from .world import AutopilotConfig, SpawnSpec, WorldState

MAPS_DIR = pathlib.Path(__file__).parent / "maps"

DIFFICULTY_COUNTS = {"simple": 0, "medium": 4, "hard": 8}

CAUSE_COLLISION = "collision"
CAUSE_OUT_OF_LANE = "out_of_lane"
CAUSE_DESTINATION = "destination"
CAUSE_TIMEOUT = "timeout"


class TaskError(ValueError):
    """Unknown task name or invalid configuration override."""


@dataclass
class TrafficFlow:
    lanes: tuple[str, ...] = ()
    count: int = 0
    respawn: bool = True
    behavior: AutopilotConfig = field(default_factory=AutopilotConfig)
    spawn_range: tuple[float, float] | None = None  # offset window on each lane

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("traffic count must be >= 0")
        if self.spawn_range is not None and self.spawn_range[0] > self.spawn_range[1]:
            raise ValueError("spawn_range must be (low, high)")


@dataclass
class TaskConfig:
    name: str
    map_file: str
    ego_spawn: SpawnSpec
    planner: PlannerSpec
    traffic: TrafficFlow = field(default_factory=TrafficFlow)
    difficulty: str = "simple"
    visibility: SensorConfig = field(default_factory=SensorConfig)
    intention: IntentionConfig = field(default_factory=IntentionConfig)
    modalities: tuple[str, ...] = ("bev", "state_vector")
    reward: RewardConfig = field(default_factory=RewardConfig)
    time_limit: float = 60.0
    out_of_lane_limit: float = 1.0
    distance_budget: float | None = None
    ego_autopilot: AutopilotConfig = field(default_factory=AutopilotConfig)

    def load_roadmap(self) -> RoadMap:
        path = MAPS_DIR / self.map_file
        return load_map(json.loads(path.read_text()))


def _lawful(speed: float = 3.0) -> AutopilotConfig:
    return AutopilotConfig(target_speed=speed, aggression="lawful")


def _aggressive(speed: float = 5.0) -> AutopilotConfig:
    return AutopilotConfig(target_speed=speed, aggression="aggressive")


def _turn_task(name: str, difficulty: str, map_file: str, goal,
               traffic_lanes: tuple[str, ...]) -> TaskConfig:
    count = DIFFICULTY_COUNTS[difficulty]
    behavior = _aggressive() if difficulty == "hard" else _lawful()
    return TaskConfig(
        name=name,
        map_file=map_file,
        ego_spawn=SpawnSpec(lane="e_app", offset=6.0),
        planner=PlannerSpec(kind="fixed_ending", goal=goal),
        traffic=TrafficFlow(lanes=traffic_lanes, count=count, behavior=behavior),
        difficulty=difficulty,
    )


def _registry() -> dict[str, TaskConfig]:
    tasks: dict[str, TaskConfig] = {}
    for diff in ("simple", "medium", "hard"):
        tasks[f"right_turn_{diff}"] = _turn_task(
            f"right_turn_{diff}", diff, "right_turn.map.json",
            goal=(0.0, -40.0), traffic_lanes=("s_in", "n_thru"))
        tasks[f"left_turn_{diff}"] = _turn_task(
            f"left_turn_{diff}", diff, "left_turn.map.json",
            goal=(3.5, 40.0), traffic_lanes=("w_thru", "n_in"))
    tasks["lane_merge"] = TaskConfig(
        name="lane_merge",
        map_file="lane_merge.map.json",
        ego_spawn=SpawnSpec(lane="ramp", offset=4.0),
        planner=PlannerSpec(kind="fixed_ending", goal=(60.0, 0.0)),
        traffic=TrafficFlow(lanes=("m_in",), count=4, behavior=_lawful()),
        difficulty="medium",
    )
    tasks["overtake"] = TaskConfig(
        name="overtake",
        map_file="overtake.map.json",
        ego_spawn=SpawnSpec(lane="o_right", offset=10.0),
        planner=PlannerSpec(kind="fixed_path", lanes=("o_right", "o_left")),
        traffic=TrafficFlow(lanes=("o_right",), count=1,
                            behavior=_lawful(1.5), spawn_range=(28.0, 42.0)),
        difficulty="medium",
    )
    tasks["four_lane"] = TaskConfig(
        name="four_lane",
        map_file="four_lane.map.json",
        ego_spawn=SpawnSpec(lane="f1", offset=10.0),
        planner=PlannerSpec(kind="fixed_ending", goal=(50.0, 3.5)),
        traffic=TrafficFlow(lanes=("f0", "f1", "f2", "f3"), count=4,
                            behavior=_lawful()),
        difficulty="medium",
    )
    tasks["roundabout"] = TaskConfig(
        name="roundabout",
        map_file="roundabout.map.json",
        ego_spawn=SpawnSpec(lane="entry_s", offset=4.0),
        planner=PlannerSpec(kind="fixed_ending", goal=(-12.0, -30.0)),
        traffic=TrafficFlow(lanes=("r0", "r1", "r2", "r3"), count=4,
                            behavior=_lawful()),
        difficulty="medium",
    )
    tasks["navigation"] = TaskConfig(
        name="navigation",
        map_file="navigation.map.json",
        ego_spawn=SpawnSpec(lane="ring_s", offset=10.0),
        planner=PlannerSpec(kind="random_roam"),
        traffic=TrafficFlow(lanes=("ring_n", "ring_e", "ring_w"), count=4,
                            behavior=_lawful()),
        difficulty="medium",
        time_limit=90.0,
        distance_budget=200.0,
    )
    tasks["traffic_lights"] = TaskConfig(
        name="traffic_lights",
        map_file="traffic_lights.map.json",
        ego_spawn=SpawnSpec(lane="app", offset=2.0),
        planner=PlannerSpec(kind="fixed_ending", goal=(70.0, 0.0)),
        difficulty="simple",
    )
    tasks["stop_sign"] = TaskConfig(
        name="stop_sign",
        map_file="stop_sign.map.json",
        ego_spawn=SpawnSpec(lane="app", offset=2.0),
        planner=PlannerSpec(kind="fixed_ending", goal=(70.0, 0.0)),
        difficulty="simple",
    )
    return tasks


TASK_NAMES = tuple(sorted(_registry()))


def apply_overrides(cfg: TaskConfig, overrides: dict) -> TaskConfig:
    """Apply {dot.separated.path: value} overrides to a copy of cfg."""
    cfg = copy.deepcopy(cfg)
    for path, value in overrides.items():
        parts = path.split(".")
        target = cfg
        for part in parts[:-1]:
            if not hasattr(target, part):
                raise TaskError(f"unknown override path '{path}'")
            target = getattr(target, part)
        leaf = parts[-1]
        if not hasattr(target, leaf):
            raise TaskError(f"unknown override path '{path}'")
        current = getattr(target, leaf)
        if isinstance(current, tuple) and isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        setattr(target, leaf, value)
    # re-run validation on replaced dataclasses
    cfg.visibility.__post_init__()
    cfg.intention.__post_init__()
    cfg.reward.__post_init__()
    cfg.traffic.__post_init__()
    cfg.traffic.behavior.__post_init__()
    cfg.ego_autopilot.__post_init__()
    return cfg


def make_task(name: str, overrides: dict | None = None) -> TaskConfig:
    registry = _registry()
    if name not in registry:
        raise TaskError(f"unknown task '{name}'; valid tasks: "
                        + ", ".join(sorted(registry)))
    cfg = registry[name]
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def check_termination(world: WorldState, ego_id: str, route, cfg: TaskConfig,
                      collided: bool, distance: float = 0.0) -> str | None:
    """First matching cause in priority order, or None to continue."""
    if collided:
        return CAUSE_COLLISION
    ego = world.actors[ego_id]
    hit = world.map.lane_query(ego.pose.position.x, ego.pose.position.y)
    half_width = world.map.lanes[hit.lane_id].width / 2.0
    if abs(hit.lateral) > half_width + cfg.out_of_lane_limit:
        return CAUSE_OUT_OF_LANE
    reached = route is not None and route.exhausted
    if cfg.distance_budget is not None:
        reached = reached or distance >= cfg.distance_budget
    if reached:
        return CAUSE_DESTINATION
    if world.sim_time >= cfg.time_limit:
        return CAUSE_TIMEOUT
    return None
