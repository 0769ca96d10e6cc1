"""2D driving simulation with configurable tasks, multi-modal observations,
partial observability, and a reset/step episode protocol."""

from .env import (AGENTS, AutopilotAgent, DriveEnv, EpisodeMetrics,
                  ProtocolError, RandomAgent, StepResult, ZeroAgent,
                  build_agent, evaluate, make_env, metrics_from_outcomes,
                  parse_action, record_rollouts, replay, run_episode)
from .observer import IntentionConfig, Observer, ObserverConfig, SensorConfig
from .rewards import RewardConfig, RewardTerms, compute_reward
from .roadmap import MapError, RoadMap, load_map
from .routing import (FixedEndingPlanner, FixedPathPlanner, PlannerSpec,
                      RandomRoamPlanner, Route, RouteGraph)
from .tasks import TASK_NAMES, TaskConfig, TaskError, TrafficFlow, make_task
from .world import (AutopilotConfig, Pose, SpawnSpec, VehicleState, WorldState,
                    spawn_vehicle, tick)

__version__ = "0.1.0"

__all__ = [
    "AGENTS", "AutopilotAgent", "AutopilotConfig", "DriveEnv",
    "EpisodeMetrics", "FixedEndingPlanner", "FixedPathPlanner",
    "IntentionConfig", "MapError", "Observer", "ObserverConfig",
    "PlannerSpec", "Pose", "ProtocolError", "RandomAgent",
    "RandomRoamPlanner", "RewardConfig", "RewardTerms", "RoadMap", "Route",
    "RouteGraph", "SensorConfig", "SpawnSpec", "StepResult", "TASK_NAMES",
    "TaskConfig", "TaskError", "TrafficFlow", "VehicleState", "WorldState",
    "ZeroAgent", "build_agent", "compute_reward", "evaluate", "load_map",
    "make_env", "make_task", "metrics_from_outcomes", "parse_action",
    "record_rollouts", "replay", "run_episode", "spawn_vehicle", "tick",
    "__version__",
]
