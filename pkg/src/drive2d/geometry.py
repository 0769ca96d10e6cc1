"""Planar geometry: angles, oriented rectangles, polylines, rays.

World units are meters, angles are radians. Heavier primitives take and
return small numpy arrays; scalar helpers stick to plain floats.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


class Vec2(NamedTuple):
    x: float
    y: float


def normalize_angle(angle: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = math.fmod(angle + math.pi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    return wrapped - math.pi


def unit(dx: float, dy: float) -> tuple[float, float]:
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise ValueError("zero-length vector has no direction")
    return dx / n, dy / n


def rect_corners(cx: float, cy: float, heading: float, length: float, width: float) -> np.ndarray:
    """Corners of an oriented rectangle, counter-clockwise, shape (4, 2)."""
    ch, sh = math.cos(heading), math.sin(heading)
    hl, hw = 0.5 * length, 0.5 * width
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.array([[ch, -sh], [sh, ch]])
    return local @ rot.T + np.array([cx, cy])


def _axes_of(corners: np.ndarray):
    # A rectangle contributes two unique edge normals.
    for i in (0, 1):
        ex, ey = corners[i + 1] - corners[i]
        n = math.hypot(ex, ey)
        yield (-ey / n, ex / n)


def obb_overlap(a: np.ndarray, b: np.ndarray, touch_tol: float = 1e-9) -> bool:
    """Separating-axis overlap test for two oriented rectangles.

    Boundaries separated by at most `touch_tol` count as overlapping, so
    exactly touching rectangles collide.
    """
    for rect in (a, b):
        for ax, ay in _axes_of(rect):
            pa = a[:, 0] * ax + a[:, 1] * ay
            pb = b[:, 0] * ax + b[:, 1] * ay
            if pa.min() > pb.max() + touch_tol or pb.min() > pa.max() + touch_tol:
                return False
    return True


def obb_margin(a: np.ndarray, b: np.ndarray) -> float:
    """Smallest projected overlap across the four candidate separating axes.

    Positive means the rectangles overlap by at least that much along every
    axis; negative means there is a separating axis with that gap. Values
    near zero indicate a tangent configuration.
    """
    margin = math.inf
    for rect in (a, b):
        for ax, ay in _axes_of(rect):
            pa = a[:, 0] * ax + a[:, 1] * ay
            pb = b[:, 0] * ax + b[:, 1] * ay
            extent = min(pa.max(), pb.max()) - max(pa.min(), pb.min())
            margin = min(margin, extent)
    return margin


def points_in_convex(points: np.ndarray, poly: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Boolean mask of points inside a counter-clockwise convex polygon."""
    inside = np.ones(len(points), dtype=bool)
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cross = (bx - ax) * (points[:, 1] - ay) - (by - ay) * (points[:, 0] - ax)
        inside &= cross >= -tol
    return inside


def point_segment_distance(px: float, py: float, ax: float, ay: float, bx: float, by: float):
    """Distance from a point to a segment; returns (distance, t, proj_x, proj_y).

    t is the clamped projection parameter in [0, 1].
    """
    abx, aby = bx - ax, by - ay
    denom = abx * abx + aby * aby
    t = 0.0 if denom == 0.0 else ((px - ax) * abx + (py - ay) * aby) / denom
    t = min(1.0, max(0.0, t))
    qx, qy = ax + t * abx, ay + t * aby
    return math.hypot(px - qx, py - qy), t, qx, qy


def polyline_cumlen(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length at each vertex of a polyline, starting at 0."""
    deltas = np.diff(points, axis=0)
    seg = np.hypot(deltas[:, 0], deltas[:, 1])
    return np.concatenate([[0.0], np.cumsum(seg)])


def polyline_point_at(points: np.ndarray, cum: np.ndarray, s: float) -> tuple[float, float]:
    """Point at arc length s along a polyline (clamped to its extent)."""
    s = min(max(s, 0.0), float(cum[-1]))
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(points) - 2)
    seg_len = cum[i + 1] - cum[i]
    t = 0.0 if seg_len == 0.0 else (s - cum[i]) / seg_len
    p = points[i] + t * (points[i + 1] - points[i])
    return float(p[0]), float(p[1])


def polyline_tangent_at(points: np.ndarray, cum: np.ndarray, s: float) -> float:
    """Heading of the polyline segment containing arc length s."""
    s = min(max(s, 0.0), float(cum[-1]))
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(points) - 2)
    dx, dy = points[i + 1] - points[i]
    return math.atan2(dy, dx)


def resample_polyline(points: np.ndarray, step: float = 1.0, min_tail: float = 0.5) -> np.ndarray:
    """Evenly resample a polyline at `step` spacing, always keeping the endpoint.

    If the final sample would land closer than `min_tail` to its predecessor,
    the predecessor is dropped so spacing stays in [min_tail, 2*step).
    """
    cum = polyline_cumlen(points)
    total = float(cum[-1])
    if total == 0.0:
        return points[:1].copy()
    ss = list(np.arange(0.0, total, step))
    out = [polyline_point_at(points, cum, s) for s in ss]
    last = polyline_point_at(points, cum, total)
    if out and math.hypot(last[0] - out[-1][0], last[1] - out[-1][1]) < min_tail and len(out) > 1:
        out.pop()
    out.append(last)
    return np.array(out)


def ray_segment_t(ox: float, oy: float, dx: float, dy: float,
                  ax: float, ay: float, bx: float, by: float):
    """Parameter t >= 0 where ray (o, d) crosses segment (a, b), or None.

    d must be a unit vector so t is a distance in meters.
    """
    ex, ey = bx - ax, by - ay
    denom = dx * ey - dy * ex
    if abs(denom) < 1e-12:
        return None
    t = ((ax - ox) * ey - (ay - oy) * ex) / denom
    u = ((ax - ox) * dy - (ay - oy) * dx) / denom
    if t >= 0.0 and -1e-12 <= u <= 1.0 + 1e-12:
        return t
    return None
