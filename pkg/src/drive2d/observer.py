"""Observation assembly: who the ego can see and what gets reported.

Visibility is a sensing cone test. FOV keeps actors within range and
bearing of the ego; SFOV adds everything visible from any FOV member
(exactly two hops, modelling vehicles relaying their own sightings);
FULL sees everyone. Data handlers turn the visible set into modality
arrays and are registered by name so tasks can mix and match.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import normalize_angle
from .world import VehicleState, WorldState

MODE_FOV = "fov"
MODE_SFOV = "sfov"
MODE_FULL = "full"

STATE_VECTOR_SLOTS = 16
STATE_VECTOR_FEATURES = 4


@dataclass
class SensorConfig:
    mode: str = MODE_FOV
    range: float = 30.0
    cone_half_angle: float = math.radians(60.0)

    def __post_init__(self):
        if self.mode not in (MODE_FOV, MODE_SFOV, MODE_FULL):
            raise ValueError(f"unknown observability mode {self.mode!r}")
        if self.range <= 0.0:
            raise ValueError("range must be > 0")
        if not 0.0 < self.cone_half_angle <= math.pi:
            raise ValueError("cone_half_angle must be in (0, pi]")


@dataclass
class IntentionConfig:
    enabled: bool = False
    scope: str = "visible_only"  # "visible_only" | "all"
    horizon: int = 10

    def __post_init__(self):
        if self.scope not in ("visible_only", "all"):
            raise ValueError(f"unknown intention scope {self.scope!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


def in_cone(viewer: VehicleState, other: VehicleState, sensing: SensorConfig) -> bool:
    """True when `other` falls inside the viewer's sensing cone.

    Both boundaries are inclusive: exactly at max range or exactly on the
    cone edge still counts.
    """
    dx = other.pose.position.x - viewer.pose.position.x
    dy = other.pose.position.y - viewer.pose.position.y
    dist = math.hypot(dx, dy)
    if dist > sensing.range:
        return False
    if dist == 0.0:
        return True
    bearing = normalize_angle(math.atan2(dy, dx) - viewer.pose.heading)
    return abs(bearing) <= sensing.cone_half_angle


def visible_ids(world: WorldState, ego_id: str, sensing: SensorConfig) -> set[str]:
    """Actor ids observable by the ego under the configured mode.

    The ego is always a member of its own visible set.
    """
    if ego_id not in world.actors:
        raise KeyError(f"unknown ego id '{ego_id}'")
    if sensing.mode == MODE_FULL:
        return set(world.actors)
    ego = world.actors[ego_id]
    first = {
        aid for aid, actor in world.actors.items()
        if aid != ego_id and in_cone(ego, actor, sensing)
    }
    if sensing.mode == MODE_FOV:
        return first | {ego_id}
    # shared field of view: one relay hop from every directly seen vehicle
    second = set(first)
    for aid in first:
        relay = world.actors[aid]
        for bid, actor in world.actors.items():
            if bid != aid and in_cone(relay, actor, sensing):
                second.add(bid)
    return second | {ego_id}


def shared_intentions(world: WorldState, ego_id: str, visible: set[str],
                      cfg: IntentionConfig) -> dict[str, np.ndarray]:
    """Broadcast planned waypoints: id -> (K,2) array, K <= horizon.

    Disabled sharing returns {}. Actors without a route are omitted, and a
    short remaining route is reported as-is with no padding.
    """
    if not cfg.enabled:
        return {}
    ids = visible if cfg.scope == "visible_only" else set(world.actors)
    out: dict[str, np.ndarray] = {}
    for aid in sorted(ids):
        route = world.actors[aid].route
        if route is None:
            continue
        ahead = route.ahead(cfg.horizon)
        if len(ahead) == 0:
            continue
        out[aid] = np.array(ahead, dtype=float)
    return out


def state_vector(world: WorldState, ego_id: str, visible: set[str]) -> np.ndarray:
    """Flat kinematic summary of the visible set in the ego frame.

    One row per actor: [rel_x, rel_y, rel_heading, speed], ego first as
    [0, 0, 0, speed], others by increasing distance (ties by id). Rows are
    zero-padded to 16 actors and flattened to 64 floats.
    """
    ego = world.actors[ego_id]
    ex, ey = ego.pose.position
    ch, sh = math.cos(ego.pose.heading), math.sin(ego.pose.heading)
    rows = [(0.0, 0.0, 0.0, ego.speed)]
    others = []
    for aid in visible:
        if aid == ego_id:
            continue
        actor = world.actors[aid]
        dx = actor.pose.position.x - ex
        dy = actor.pose.position.y - ey
        rel = (dx * ch + dy * sh, -dx * sh + dy * ch,
               normalize_angle(actor.pose.heading - ego.pose.heading),
               actor.speed)
        others.append((math.hypot(dx, dy), aid, rel))
    others.sort(key=lambda t: (t[0], t[1]))
    rows.extend(rel for _, _, rel in others[:STATE_VECTOR_SLOTS - 1])
    arr = np.zeros((STATE_VECTOR_SLOTS, STATE_VECTOR_FEATURES), dtype=float)
    arr[:len(rows)] = rows
    return arr.reshape(-1)


@dataclass
class ObserverConfig:
    sensing: SensorConfig = field(default_factory=SensorConfig)
    intentions: IntentionConfig = field(default_factory=IntentionConfig)
    modalities: tuple[str, ...] = ("bev", "state_vector")
    bev: "object | None" = None    # BevConfig, resolved lazily
    lidar: "object | None" = None  # LidarConfig, resolved lazily


class ObserverError(RuntimeError):
    """A data handler failed or was registered twice."""


class Observer:
    """Computes the visible set once per step and fans out to handlers.

    Handlers are registered by name; every registered handler contributes
    exactly one entry per observe() call. The built-in modalities named in
    the config are registered up front, and callers may add their own with
    register().
    """

    def __init__(self, cfg: ObserverConfig):
        from .bev import BevConfig, render_bev
        from .lidar import LidarConfig, lidar_scan

        self.cfg = cfg
        bev_cfg = cfg.bev if cfg.bev is not None else BevConfig()
        lidar_cfg = cfg.lidar if cfg.lidar is not None else LidarConfig()
        builtin = {
            "bev": lambda w, e, vis, intent: render_bev(w, e, vis, intent, bev_cfg),
            "lidar": lambda w, e, vis, intent: lidar_scan(w, e, lidar_cfg),
            "state_vector": lambda w, e, vis, intent: state_vector(w, e, vis),
        }
        self._handlers: dict = {}
        for name in cfg.modalities:
            if name not in builtin:
                raise ValueError(f"unknown modality {name!r}")
            self.register(name, builtin[name])

    def register(self, name: str, handler) -> "Observer":
        if name in self._handlers:
            raise ObserverError(f"handler {name!r} already registered")
        self._handlers[name] = handler
        return self

    def observe(self, world: WorldState, ego_id: str) -> dict[str, np.ndarray]:
        visible = visible_ids(world, ego_id, self.cfg.sensing)
        intentions = shared_intentions(world, ego_id, visible, self.cfg.intentions)
        obs = {}
        for name, handler in self._handlers.items():
            try:
                obs[name] = handler(world, ego_id, visible, intentions)
            except Exception as exc:
                raise ObserverError(f"handler {name!r} failed: {exc}") from exc
        return obs

    def visible(self, world: WorldState, ego_id: str) -> set[str]:
        return visible_ids(world, ego_id, self.cfg.sensing)
