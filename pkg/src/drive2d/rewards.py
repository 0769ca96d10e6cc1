"""Step reward: speed toward the next waypoint, penalties, event bonuses.

The per-step reward is

    total = alpha * v_parallel - beta * v_perp - gamma * collision + bonus_terms

where v_parallel is the ego's signed speed component toward the cursor
waypoint, v_perp the magnitude of the component across it, and bonus_terms
collects waypoint / destination / lane-departure / signal events. The total
is assembled from exactly that expression so logs can be re-verified
bitwise, and v_parallel**2 + v_perp**2 always reconstructs speed**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .roadmap import LaneHit, STOP_SIGN, TRAFFIC_LIGHT
from .world import VehicleState, WorldState

STOP_BONUS_SPEED = 0.1
STOP_BONUS_RADIUS = 3.0


@dataclass
class RewardConfig:
    alpha: float = 1.0
    beta: float = 0.5
    gamma: float = 100.0
    waypoint_bonus: float = 5.0
    out_of_lane_penalty: float = 20.0
    destination_bonus: float = 100.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise ValueError("alpha, beta, gamma must be >= 0")


@dataclass
class RewardTerms:
    v_parallel: float
    v_perp: float
    collision: int
    waypoints_reached: int
    bonus_terms: float
    total: float

    def as_dict(self) -> dict:
        return {
            "v_parallel": self.v_parallel,
            "v_perp": self.v_perp,
            "collision": self.collision,
            "waypoints_reached": self.waypoints_reached,
            "bonus_terms": self.bonus_terms,
            "total": self.total,
        }


def compute_reward(ego: VehicleState, route, cfg: RewardConfig, collided: bool,
                   waypoints_reached: int = 0, destination: bool = False,
                   out_of_lane: bool = False,
                   signal_adjust: float = 0.0) -> RewardTerms:
    """Assemble the step reward for the ego's current state.

    The goal direction is the unit vector from the ego to the waypoint at
    the route cursor; with the route exhausted (or the waypoint on top of
    the ego) it degrades to the ego heading, making v_perp zero.
    """
    px, py = ego.pose.position
    gx = gy = None
    if route is not None and not route.exhausted:
        wx, wy = route.waypoints[route.cursor]
        d = math.hypot(wx - px, wy - py)
        if d > 1e-12:
            gx, gy = (wx - px) / d, (wy - py) / d
    if gx is None:
        gx, gy = math.cos(ego.pose.heading), math.sin(ego.pose.heading)

    wx_v = ego.speed * math.cos(ego.pose.heading)
    wy_v = ego.speed * math.sin(ego.pose.heading)
    v_parallel = wx_v * gx + wy_v * gy
    v_perp = abs(wx_v * gy - wy_v * gx)

    collision = 1 if collided else 0
    bonus_terms = (cfg.waypoint_bonus * waypoints_reached
                   + cfg.destination_bonus * (1 if destination else 0)
                   - cfg.out_of_lane_penalty * (1 if out_of_lane else 0)
                   + signal_adjust)
    total = (cfg.alpha * v_parallel - cfg.beta * v_perp
             - cfg.gamma * collision + bonus_terms)
    return RewardTerms(v_parallel=v_parallel, v_perp=v_perp, collision=collision,
                       waypoints_reached=waypoints_reached,
                       bonus_terms=bonus_terms, total=total)


class SignalRewardTracker:
    """Once-per-signal reward adjustments across one episode.

    Crossing a red light's stop line costs gamma; coming to rest beside a
    stop sign earns the waypoint bonus. Both fire at most once per signal.
    """

    def __init__(self, cfg: RewardConfig):
        self.cfg = cfg
        self._penalized: set[str] = set()
        self._stop_rewarded: set[str] = set()

    def update(self, world: WorldState, ego: VehicleState,
               prev_hit: LaneHit, curr_hit: LaneHit) -> float:
        adjust = 0.0
        for sig in world.map.signals.values():
            if sig.kind == TRAFFIC_LIGHT and sig.id not in self._penalized:
                if world.signal_states.get(sig.id) != "red":
                    continue
                crossed = (prev_hit.lane_id == sig.lane
                           and prev_hit.s < sig.s
                           and ((curr_hit.lane_id == sig.lane and curr_hit.s >= sig.s)
                                or (curr_hit.lane_id != sig.lane
                                    and curr_hit.lane_id in
                                    world.map.lanes[sig.lane].successors)))
                if crossed:
                    self._penalized.add(sig.id)
                    adjust -= self.cfg.gamma
            elif sig.kind == STOP_SIGN and sig.id not in self._stop_rewarded:
                if abs(ego.speed) >= STOP_BONUS_SPEED:
                    continue
                px, py = ego.pose.position
                if math.hypot(px - sig.position[0],
                              py - sig.position[1]) <= STOP_BONUS_RADIUS:
                    self._stop_rewarded.add(sig.id)
                    adjust += self.cfg.waypoint_bonus
        return adjust
