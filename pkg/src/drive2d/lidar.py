"""Planar range scan.

Beams fan out from the ego center at equal angular spacing starting at the
ego heading. A beam terminates at the first point where it leaves the road
surface (the union of per-segment lane capsules) or hits another actor's
rectangle edge, capped at max_range. Visibility mode never masks the scan;
a physical sensor returns whatever it hits.

Ray-capsule intersections are solved in closed form: the capsule is the
union of an oriented slab and two end discs, each convex, so the ray
overlap is a single parameter interval per capsule. Per-capsule intervals
are merged with a sweep to find where the beam first exits the road union.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ray_segment_t, rect_corners
from .world import WorldState

MERGE_EPS = 1e-9


@dataclass
class LidarConfig:
    beams: int = 72
    max_range: float = 30.0

    def __post_init__(self):
        if self.beams < 1:
            raise ValueError("beams must be >= 1")
        if self.max_range <= 0.0:
            raise ValueError("max_range must be > 0")


def _ray_disc(ox, oy, dx, dy, cx, cy, r) -> tuple[float, float] | None:
    """Parameter interval where the unit ray overlaps a disc, or None."""
    mx, my = ox - cx, oy - cy
    b = mx * dx + my * dy
    c = mx * mx + my * my - r * r
    disc = b * b - c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    t0, t1 = -b - root, -b + root
    if t1 < 0.0:
        return None
    return max(t0, 0.0), t1


def _ray_slab_rect(ox, oy, dx, dy, ax, ay, bx, by, r) -> tuple[float, float] | None:
    """Ray interval inside the rectangle spanning segment (a,b) widened by r."""
    ux, uy = bx - ax, by - ay
    length = math.hypot(ux, uy)
    if length < 1e-12:
        return None
    ux, uy = ux / length, uy / length
    nx, ny = -uy, ux
    # ray in the rectangle's (along, across) frame
    pu = (ox - ax) * ux + (oy - ay) * uy
    pv = (ox - ax) * nx + (oy - ay) * ny
    du = dx * ux + dy * uy
    dv = dx * nx + dy * ny
    t_lo, t_hi = 0.0, math.inf
    for p, d, lo, hi in ((pu, du, 0.0, length), (pv, dv, -r, r)):
        if abs(d) < 1e-15:
            if not lo <= p <= hi:
                return None
            continue
        ta, tb = (lo - p) / d, (hi - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t_lo = max(t_lo, ta)
        t_hi = min(t_hi, tb)
        if t_lo > t_hi:
            return None
    return t_lo, t_hi


def _ray_capsule(ox, oy, dx, dy, ax, ay, bx, by, r) -> tuple[float, float] | None:
    """Ray overlap with a capsule (for t >= 0), as one interval or None.

    The capsule is convex, so the union of its slab and end-disc intervals
    is contiguous: span from the earliest entry to the latest exit.
    """
    pieces = [
        _ray_slab_rect(ox, oy, dx, dy, ax, ay, bx, by, r),
        _ray_disc(ox, oy, dx, dy, ax, ay, r),
        _ray_disc(ox, oy, dx, dy, bx, by, r),
    ]
    pieces = [p for p in pieces if p is not None]
    if not pieces:
        return None
    return min(p[0] for p in pieces), max(p[1] for p in pieces)


def _road_exit_t(intervals: list[tuple[float, float]], cap: float) -> float:
    """First t >= 0 not covered by the interval union, up to cap."""
    intervals.sort()
    covered = 0.0
    for lo, hi in intervals:
        if lo > covered + MERGE_EPS:
            break
        covered = max(covered, hi)
        if covered >= cap:
            return cap
    return min(covered, cap)


def lidar_scan(world: WorldState, ego_id: str, cfg: LidarConfig) -> np.ndarray:
    """Range per beam, shape (beams,), metres in [0, max_range]."""
    ego = world.actors[ego_id]
    ox, oy = ego.pose.position
    starts, ends, half_widths = world.map.segment_arrays()
    reach = cfg.max_range + float(np.max(half_widths)) if len(starts) else 0.0
    near = []
    for (ax, ay), (bx, by), hw in zip(starts, ends, half_widths):
        # segment too far to matter for any beam
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        if math.hypot(mx - ox, my - oy) <= reach + 0.5 * math.hypot(bx - ax, by - ay):
            near.append((ax, ay, bx, by, hw))

    edges = []
    for aid, actor in sorted(world.actors.items()):
        if aid == ego_id:
            continue
        if math.hypot(actor.pose.position.x - ox,
                      actor.pose.position.y - oy) > cfg.max_range + actor.length:
            continue
        c = rect_corners(actor.pose.position.x, actor.pose.position.y,
                         actor.pose.heading, actor.length, actor.width)
        for i in range(4):
            edges.append((c[i][0], c[i][1], c[(i + 1) % 4][0], c[(i + 1) % 4][1]))

    out = np.empty(cfg.beams, dtype=float)
    for i in range(cfg.beams):
        ang = ego.pose.heading + 2.0 * math.pi * i / cfg.beams
        dx, dy = math.cos(ang), math.sin(ang)
        intervals = []
        for ax, ay, bx, by, hw in near:
            hit = _ray_capsule(ox, oy, dx, dy, ax, ay, bx, by, hw)
            if hit is not None:
                intervals.append(hit)
        rng = _road_exit_t(intervals, cfg.max_range)
        for ax, ay, bx, by in edges:
            t = ray_segment_t(ox, oy, dx, dy, ax, ay, bx, by)
            if t is not None and t < rng:
                rng = t
        out[i] = rng
    return out
