"""Shared scene builders for the test suite.

Most tests want a tiny hand-written road rather than one of the packaged
maps, so the helpers here build minimal documents and worlds directly.
"""
import math

import numpy as np
import pytest

from drive2d.roadmap import load_map
from drive2d.world import Pose, VehicleState, WorldState


def straight_doc(length=100.0, width=4.0, n_lanes=1, spacing=None):
    """Parallel straight lanes along +x, lane i at y = i * spacing."""
    if spacing is None:
        spacing = width
    lanes = []
    for i in range(n_lanes):
        y = i * spacing
        lane = {
            "id": f"lane{i}",
            "width": width,
            "centerline": [[0.0, y], [length, y]],
            "successors": [],
        }
        if i > 0:
            lane["right"] = f"lane{i - 1}"
        if i < n_lanes - 1:
            lane["left"] = f"lane{i + 1}"
        lanes.append(lane)
    return {"lanes": lanes, "signals": []}


def cross_doc(arm=50.0, width=4.0):
    """Two perpendicular lanes crossing at the origin."""
    return {
        "lanes": [
            {"id": "ew", "width": width,
             "centerline": [[-arm, 0.0], [arm, 0.0]], "successors": []},
            {"id": "ns", "width": width,
             "centerline": [[0.0, -arm], [0.0, arm]], "successors": []},
        ],
        "signals": [],
    }


def fork_doc():
    """A stem lane that forks into two successor branches."""
    return {
        "lanes": [
            {"id": "stem", "width": 4.0,
             "centerline": [[0.0, 0.0], [30.0, 0.0]],
             "successors": ["up", "down"]},
            {"id": "up", "width": 4.0,
             "centerline": [[30.0, 0.0], [60.0, 10.0]], "successors": []},
            {"id": "down", "width": 4.0,
             "centerline": [[30.0, 0.0], [60.0, -10.0]], "successors": []},
        ],
        "signals": [],
    }


def world_from(doc, seed=0):
    return WorldState(load_map(doc), seed=seed)


def put_vehicle(world, vid, x, y, heading=0.0, speed=0.0, **kwargs):
    """Inject an actor directly, bypassing lane-based spawning."""
    actor = VehicleState(id=vid, pose=Pose((float(x), float(y)), heading),
                         speed=speed, **kwargs)
    world.actors[vid] = actor
    return actor


@pytest.fixture
def straight_world():
    return world_from(straight_doc())


@pytest.fixture
def cross_world():
    return world_from(cross_doc())


def ray_march_range(world, origin, angle, max_range, ego_id, step=0.01):
    """Reference lidar: walk outward in tiny steps, refine by bisection.

    Counts a hit when the probe point leaves every lane footprint or enters
    another actor's rectangle. Deliberately independent of the analytic
    implementation.
    """
    from drive2d.geometry import point_segment_distance, rect_corners, points_in_convex

    lanes = list(world.map.lanes.values())
    rects = []
    for actor in world.actors.values():
        if actor.id == ego_id:
            continue
        rects.append(actor.footprint())

    def on_road(px, py):
        for lane in lanes:
            half = 0.5 * lane.width
            pts = lane.centerline
            for i in range(len(pts) - 1):
                d, _, _, _ = point_segment_distance(
                    px, py, pts[i][0], pts[i][1], pts[i + 1][0], pts[i + 1][1])
                if d <= half:
                    return True
        return False

    def in_actor(px, py):
        probe = np.array([[px, py]])
        for rect in rects:
            if points_in_convex(probe, rect)[0]:
                return True
        return False

    def free(t):
        px = origin[0] + t * math.cos(angle)
        py = origin[1] + t * math.sin(angle)
        return on_road(px, py) and not in_actor(px, py)

    if not free(0.0):
        return 0.0
    t = 0.0
    while t < max_range:
        t_next = min(t + step, max_range)
        if not free(t_next):
            lo, hi = t, t_next
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if free(mid):
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        t = t_next
    return max_range
