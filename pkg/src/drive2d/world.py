"""Simulation world: actor lifecycle, vehicle dynamics, collisions, autopilot.

The world advances on a fixed step with a kinematic bicycle model:

    speed'   = clamp(speed + throttle * A_MAX * dt, V_MIN, V_MAX)
    steer    = steer_cmd * MAX_STEER
    heading' = heading + (speed / wheelbase) * tan(steer) * dt
    position'= position + speed * (cos heading', sin heading') * dt

where the unprimed speed is the pre-update value and wheelbase is 0.6 of
the vehicle length. Each WorldState is owned by a single thread; mutation
happens only through tick/spawn/destroy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .geometry import normalize_angle, obb_overlap, rect_corners, Vec2
from .rng import RngStreams
from .roadmap import RoadMap, STOP_SIGN, TRAFFIC_LIGHT, signal_phase

if TYPE_CHECKING:
    from .routing import Route

DT = 0.1
A_MAX = 3.0
V_MAX = 12.0
V_MIN = -2.0
MAX_STEER = 0.6
WHEELBASE_RATIO = 0.6
DEFAULT_LENGTH = 4.5
DEFAULT_WIDTH = 2.0
COLLISION_TOUCH_TOL = 1e-9

# autopilot shaping
MIN_LOOKAHEAD = 3.0
LOOKAHEAD_TIME = 1.0
SPEED_GAIN = 0.5
LEAD_LATERAL_TOL = 2.0
STOP_PROXIMITY = 3.0
STOP_SPEED = 0.1

ROLE_EGO = "ego"
ROLE_BACKGROUND = "background"
CONTROLLER_EXTERNAL = "external"
CONTROLLER_AUTOPILOT = "autopilot"


class WorldError(RuntimeError):
    """Raised for invalid spawns, unknown actors, or missing routes."""


@dataclass
class Pose:
    position: Vec2
    heading: float

    def __post_init__(self):
        self.position = Vec2(float(self.position[0]), float(self.position[1]))
        self.heading = normalize_angle(float(self.heading))


@dataclass
class AutopilotConfig:
    target_speed: float = 3.0
    headway_distance: float = 10.0
    aggression: str = "lawful"  # "lawful" | "aggressive"

    def __post_init__(self):
        if self.target_speed <= 0.0:
            raise ValueError("target_speed must be > 0")
        if self.headway_distance < 0.0:
            raise ValueError("headway_distance must be >= 0")
        if self.aggression not in ("lawful", "aggressive"):
            raise ValueError(f"unknown aggression {self.aggression!r}")


@dataclass
class SpawnSpec:
    lane: str
    offset: float
    speed: float = 0.0
    controller: str = CONTROLLER_EXTERNAL
    length: float = DEFAULT_LENGTH
    width: float = DEFAULT_WIDTH


@dataclass
class VehicleState:
    id: str
    pose: Pose
    speed: float
    steer: float = 0.0
    length: float = DEFAULT_LENGTH
    width: float = DEFAULT_WIDTH
    role: str = ROLE_BACKGROUND
    controller: str = CONTROLLER_EXTERNAL
    autopilot: AutopilotConfig | None = None
    route: "Route | None" = None
    honored_signs: set[str] = field(default_factory=set)

    def footprint(self) -> np.ndarray:
        return rect_corners(self.pose.position.x, self.pose.position.y,
                            self.pose.heading, self.length, self.width)


class WorldState:
    """Tick counter, actors, signal phases, and seeded RNG: the single
    source of simulation truth for one episode."""

    def __init__(self, road_map: RoadMap, seed: int = 0, dt: float = DT):
        self.map = road_map
        self.dt = dt
        self.episode_seed = int(seed)
        self.tick = 0
        self.actors: dict[str, VehicleState] = {}
        self.signal_states: dict[str, str] = {}
        self.rng = RngStreams(seed)
        self._next_actor = 0
        self._refresh_signals()

    @property
    def sim_time(self) -> float:
        return self.tick * self.dt

    def reset(self, seed: int):
        """Destroy everything and reseed for a fresh episode."""
        self.episode_seed = int(seed)
        self.tick = 0
        self.actors.clear()
        self.rng = RngStreams(seed)
        self._next_actor = 0
        self._refresh_signals()

    def _refresh_signals(self):
        t = self.sim_time
        self.signal_states = {
            sid: signal_phase(sig, t) for sid, sig in self.map.signals.items()
        }

    def canonical_state(self) -> str:
        """Stable serialization for bitwise determinism checks."""
        doc = {
            "tick": self.tick,
            "sim_time": self.sim_time,
            "seed": self.episode_seed,
            "actors": [
                {
                    "id": a.id,
                    "x": a.pose.position.x,
                    "y": a.pose.position.y,
                    "heading": a.pose.heading,
                    "speed": a.speed,
                    "steer": a.steer,
                    "length": a.length,
                    "width": a.width,
                    "role": a.role,
                    "controller": a.controller,
                    "honored": sorted(a.honored_signs),
                }
                for _, a in sorted(self.actors.items())
            ],
            "signals": sorted(self.signal_states.items()),
            "rng": self.rng.state_digest(),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def spawn_vehicle(world: WorldState, spec: SpawnSpec, role: str = ROLE_BACKGROUND,
                  autopilot: AutopilotConfig | None = None) -> str:
    """Place a vehicle on a lane at a longitudinal offset.

    The pose snaps to the lane centerline with the lane tangent as heading.
    Fails if the footprint would overlap an existing actor.
    """
    lane = world.map.lanes.get(spec.lane)
    if lane is None:
        raise WorldError(f"spawn lane '{spec.lane}' does not exist")
    if not 0.0 <= spec.offset <= lane.length:
        raise WorldError(f"spawn offset {spec.offset} outside lane '{spec.lane}' "
                         f"[0, {lane.length:.2f}]")
    if spec.length <= 0 or spec.width <= 0 or spec.length <= spec.width:
        raise WorldError("blueprint requires length > width > 0")
    x, y = lane.point_at(spec.offset)
    heading = lane.tangent_at(spec.offset)
    footprint = rect_corners(x, y, heading, spec.length, spec.width)
    for other in world.actors.values():
        if obb_overlap(footprint, other.footprint(), COLLISION_TOUCH_TOL):
            raise WorldError(f"spawn at lane '{spec.lane}' s={spec.offset:.2f} "
                             f"overlaps actor '{other.id}'")
    actor_id = f"v{world._next_actor}"
    world._next_actor += 1
    world.actors[actor_id] = VehicleState(
        id=actor_id,
        pose=Pose(Vec2(x, y), heading),
        speed=float(spec.speed),
        length=spec.length,
        width=spec.width,
        role=role,
        controller=spec.controller,
        autopilot=autopilot,
    )
    return actor_id


def destroy_all(world: WorldState):
    """Remove every actor and reset the episode clock and RNG."""
    world.reset(world.episode_seed)


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def tick(world: WorldState, controls: dict[str, tuple[float, float]] | None = None,
         dt: float | None = None):
    """Advance the world one step.

    `controls` maps externally controlled actor ids to (throttle, steer_cmd)
    in [-1, 1]. Autopilot actors derive their controls from their own policy;
    supplying a control for one is an error, as is naming an unknown actor.
    External actors without an entry coast (zero throttle, zero steer).
    """
    dt = world.dt if dt is None else dt
    if dt <= 0.0:
        raise WorldError("dt must be > 0")
    controls = controls or {}
    for actor_id in controls:
        actor = world.actors.get(actor_id)
        if actor is None:
            raise WorldError(f"unknown actor id '{actor_id}' in controls")
        if actor.controller == CONTROLLER_AUTOPILOT:
            raise WorldError(f"actor '{actor_id}' is autopilot-controlled")

    resolved: dict[str, tuple[float, float]] = {}
    for actor_id, actor in sorted(world.actors.items()):
        if actor.controller == CONTROLLER_AUTOPILOT:
            resolved[actor_id] = autopilot_control(world, actor_id, actor.autopilot)
        else:
            resolved[actor_id] = controls.get(actor_id, (0.0, 0.0))

    for actor_id, actor in sorted(world.actors.items()):
        throttle, steer_cmd = resolved[actor_id]
        throttle = _clamp(float(throttle), -1.0, 1.0)
        steer_cmd = _clamp(float(steer_cmd), -1.0, 1.0)
        speed = actor.speed
        new_speed = _clamp(speed + throttle * A_MAX * dt, V_MIN, V_MAX)
        steer = steer_cmd * MAX_STEER
        wheelbase = WHEELBASE_RATIO * actor.length
        new_heading = normalize_angle(
            actor.pose.heading + (speed / wheelbase) * math.tan(steer) * dt
        )
        x = actor.pose.position.x + speed * math.cos(new_heading) * dt
        y = actor.pose.position.y + speed * math.sin(new_heading) * dt
        actor.pose = Pose(Vec2(x, y), new_heading)
        actor.speed = new_speed
        actor.steer = steer

    world.tick += 1
    world._refresh_signals()
    _mark_honored_stops(world)


def _mark_honored_stops(world: WorldState):
    # A vehicle that has come to rest beside a stop sign has honored it for
    # the rest of the episode and may proceed.
    stop_signs = [s for s in world.map.signals.values() if s.kind == STOP_SIGN]
    if not stop_signs:
        return
    for actor in world.actors.values():
        if abs(actor.speed) >= STOP_SPEED:
            continue
        px, py = actor.pose.position
        for sig in stop_signs:
            if sig.id in actor.honored_signs:
                continue
            if math.hypot(px - sig.position[0], py - sig.position[1]) <= STOP_PROXIMITY:
                actor.honored_signs.add(sig.id)


def detect_collisions(world: WorldState) -> list[tuple[str, str]]:
    """Unordered unique pairs of actors whose footprints overlap.

    Touching boundaries (separation within 1e-9 m) count as collision.
    """
    ids = sorted(world.actors)
    footprints = {aid: world.actors[aid].footprint() for aid in ids}
    radii = {
        aid: 0.5 * math.hypot(world.actors[aid].length, world.actors[aid].width)
        for aid in ids
    }
    pairs = []
    for i, a in enumerate(ids):
        ax, ay = world.actors[a].pose.position
        for b in ids[i + 1:]:
            bx, by = world.actors[b].pose.position
            reach = radii[a] + radii[b] + 1e-6
            if (ax - bx) ** 2 + (ay - by) ** 2 > reach * reach:
                continue
            if obb_overlap(footprints[a], footprints[b], COLLISION_TOUCH_TOL):
                pairs.append((a, b))
    return pairs


def lane_query(road_map: RoadMap, x: float, y: float):
    """Module-level alias of RoadMap.lane_query."""
    return road_map.lane_query(x, y)


def _lead_vehicle_distance(world: WorldState, actor: VehicleState) -> float | None:
    """Distance to the nearest vehicle ahead in the actor's travel corridor."""
    ch, sh = math.cos(actor.pose.heading), math.sin(actor.pose.heading)
    px, py = actor.pose.position
    best = None
    for other in world.actors.values():
        if other.id == actor.id:
            continue
        dx, dy = other.pose.position.x - px, other.pose.position.y - py
        forward = dx * ch + dy * sh
        lateral = -dx * sh + dy * ch
        if forward > 0.0 and abs(lateral) <= LEAD_LATERAL_TOL:
            if best is None or forward < best:
                best = forward
    return best


def _signal_stop_required(world: WorldState, actor: VehicleState, headway: float) -> bool:
    """Red light or unhonored stop sign on the actor's lane close enough
    that braking must start now (stopping distance plus a 1 m margin)."""
    if not world.map.signals:
        return False
    hit = world.map.lane_query(actor.pose.position.x, actor.pose.position.y)
    # start braking at stopping distance + margin; keep holding near the
    # line so a waiting vehicle cannot creep across
    brake_zone = max(max(0.0, actor.speed) ** 2 / (2.0 * A_MAX) + 1.0, 2.5)
    for sig in world.map.signals.values():
        if sig.lane != hit.lane_id:
            continue
        ahead = sig.s - hit.s
        if not 0.0 <= ahead <= min(headway, brake_zone):
            continue
        if sig.kind == TRAFFIC_LIGHT and world.signal_states.get(sig.id) == "red":
            return True
        if sig.kind == STOP_SIGN and sig.id not in actor.honored_signs:
            return True
    return False


def autopilot_control(world: WorldState, actor_id: str,
                      cfg: AutopilotConfig | None) -> tuple[float, float]:
    """Rule-based control: pure-pursuit steering plus proportional speed.

    Lawful vehicles brake hard for a leader in their corridor, a red light,
    or an unhonored stop sign within the headway distance; aggressive ones
    ignore all of that and just chase their target speed.
    """
    actor = world.actors.get(actor_id)
    if actor is None:
        raise WorldError(f"unknown actor id '{actor_id}'")
    cfg = cfg or actor.autopilot
    if cfg is None:
        raise WorldError(f"actor '{actor_id}' has no autopilot config")
    route = actor.route
    if route is None or len(route.waypoints) == 0:
        raise WorldError(f"actor '{actor_id}' has no route")

    px, py = actor.pose.position
    lookahead = max(MIN_LOOKAHEAD, LOOKAHEAD_TIME * actor.speed)
    target = None
    for idx in range(route.cursor, len(route.waypoints)):
        wx, wy = route.waypoints[idx]
        if math.hypot(wx - px, wy - py) >= lookahead:
            target = (wx, wy)
            break
    if target is None:
        target = tuple(route.waypoints[-1])

    dist = math.hypot(target[0] - px, target[1] - py)
    if dist < 1e-9:
        steer_cmd = 0.0
    else:
        bearing = normalize_angle(math.atan2(target[1] - py, target[0] - px)
                                  - actor.pose.heading)
        wheelbase = WHEELBASE_RATIO * actor.length
        delta = math.atan2(2.0 * wheelbase * math.sin(bearing), dist)
        steer_cmd = _clamp(delta / MAX_STEER, -1.0, 1.0)

    throttle = _clamp(SPEED_GAIN * (cfg.target_speed - actor.speed), -1.0, 1.0)
    if cfg.aggression == "lawful":
        lead = _lead_vehicle_distance(world, actor)
        if lead is not None and lead <= cfg.headway_distance:
            throttle = -1.0
        elif _signal_stop_required(world, actor, cfg.headway_distance):
            throttle = -1.0
    return throttle, steer_cmd
