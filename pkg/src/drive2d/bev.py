"""Ego-centric semantic raster (bird's-eye view).

The image is a square class-index grid with the ego anchored at
(row = 3/4 height, col = width/2), heading up, so most of the frame shows
the road ahead. All geometry is transformed into the ego frame before any
pixel test, which makes the render depend only on scene geometry relative
to the ego. Classes double as draw order; later classes paint over
earlier ones, and the ego is drawn last so its anchor pixel is always
ego-class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import normalize_angle
from .world import WorldState

CLASS_BACKGROUND = 0
CLASS_ROAD = 1
CLASS_ROUTE_WAYPOINT = 2
CLASS_INTENTION_WAYPOINT = 3
CLASS_SIGNAL_GREEN = 4
CLASS_SIGNAL_RED = 5
CLASS_OTHER_VEHICLE = 6
CLASS_EGO = 7

# RGB palette for PNG export; index order matches the CLASS_* constants.
PALETTE = (
    (16, 16, 24),     # background
    (70, 70, 78),     # road
    (60, 120, 220),   # route waypoint
    (170, 110, 220),  # intention waypoint
    (60, 190, 90),    # signal green / stop permitted
    (220, 60, 60),    # signal red / must stop
    (235, 170, 40),   # other vehicle
    (240, 240, 240),  # ego vehicle
)

WAYPOINT_RADIUS = 0.3
SIGNAL_RADIUS = 0.6


@dataclass
class BevConfig:
    size: int = 128
    resolution: float = 0.25  # metres per pixel

    def __post_init__(self):
        if self.size < 8 or self.size % 2:
            raise ValueError("size must be even and >= 8")
        if self.resolution <= 0.0:
            raise ValueError("resolution must be > 0")

    @property
    def anchor(self) -> tuple[int, int]:
        """(row, col) of the ego anchor pixel."""
        return (self.size * 3) // 4, self.size // 2


_GRID_CACHE: dict[tuple[int, float], tuple[np.ndarray, np.ndarray]] = {}


def _pixel_grid(cfg: BevConfig) -> tuple[np.ndarray, np.ndarray]:
    """Ego-frame (forward, left) coordinates of every pixel center."""
    key = (cfg.size, cfg.resolution)
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached
    ar, ac = cfg.anchor
    rows = np.arange(cfg.size)
    cols = np.arange(cfg.size)
    fwd = (ar - rows)[:, None] * cfg.resolution * np.ones((1, cfg.size))
    left = (ac - cols)[None, :] * cfg.resolution * np.ones((cfg.size, 1))
    _GRID_CACHE[key] = (fwd, left)
    return fwd, left


def _paint_disc(img, fwd, left, cx, cy, radius, cls):
    mask = (fwd - cx) ** 2 + (left - cy) ** 2 <= radius * radius
    img[mask] = cls


def _paint_capsule(img, fwd, left, ax, ay, bx, by, radius, cls):
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 < 1e-18:
        _paint_disc(img, fwd, left, ax, ay, radius, cls)
        return
    t = np.clip(((fwd - ax) * vx + (left - ay) * vy) / L2, 0.0, 1.0)
    qx = ax + t * vx
    qy = ay + t * vy
    mask = (fwd - qx) ** 2 + (left - qy) ** 2 <= radius * radius
    img[mask] = cls


def _paint_obb(img, fwd, left, cx, cy, heading, length, width, cls):
    ux, uy = math.cos(heading), math.sin(heading)
    dx = fwd - cx
    dy = left - cy
    mask = (np.abs(dx * ux + dy * uy) <= length / 2.0) & \
           (np.abs(-dx * uy + dy * ux) <= width / 2.0)
    img[mask] = cls


def render_bev(world: WorldState, ego_id: str, visible: set[str],
               intentions: dict[str, np.ndarray], cfg: BevConfig) -> np.ndarray:
    """Rasterize the scene around the ego into a (size, size) uint8 image."""
    ego = world.actors[ego_id]
    ex, ey = ego.pose.position
    ch, sh = math.cos(ego.pose.heading), math.sin(ego.pose.heading)

    def to_ego(pts: np.ndarray) -> np.ndarray:
        # rows of (forward, left)
        dx = pts[..., 0] - ex
        dy = pts[..., 1] - ey
        return np.stack([dx * ch + dy * sh, -dx * sh + dy * ch], axis=-1)

    fwd, left = _pixel_grid(cfg)
    img = np.full((cfg.size, cfg.size), CLASS_BACKGROUND, dtype=np.uint8)
    half_diag = cfg.size * cfg.resolution * 0.75  # coarse view-window reach

    starts, ends, half_widths = world.map.segment_arrays()
    if len(starts):
        s_ego = to_ego(starts)
        e_ego = to_ego(ends)
        mids = 0.5 * (s_ego + e_ego)
        seg_half = 0.5 * np.hypot(*(e_ego - s_ego).T) + half_widths
        near = np.hypot(*mids.T) <= half_diag + seg_half
        for (ax, ay), (bx, by), hw in zip(s_ego[near], e_ego[near], half_widths[near]):
            _paint_capsule(img, fwd, left, ax, ay, bx, by, hw, CLASS_ROAD)

    if ego.route is not None:
        pts = to_ego(ego.route.ahead())
        for px, py in pts:
            if abs(px) <= half_diag and abs(py) <= half_diag:
                _paint_disc(img, fwd, left, px, py, WAYPOINT_RADIUS,
                            CLASS_ROUTE_WAYPOINT)

    for aid in sorted(intentions):
        if aid == ego_id:
            continue
        for px, py in to_ego(np.asarray(intentions[aid], dtype=float)):
            if abs(px) <= half_diag and abs(py) <= half_diag:
                _paint_disc(img, fwd, left, px, py, WAYPOINT_RADIUS,
                            CLASS_INTENTION_WAYPOINT)

    for sid in sorted(world.map.signals):
        sig = world.map.signals[sid]
        phase = world.signal_states.get(sid, "red")
        cls = CLASS_SIGNAL_GREEN if phase == "green" else CLASS_SIGNAL_RED
        (px, py), = to_ego(np.asarray([sig.position], dtype=float))
        if abs(px) <= half_diag and abs(py) <= half_diag:
            _paint_disc(img, fwd, left, px, py, SIGNAL_RADIUS, cls)

    for aid in sorted(visible):
        if aid == ego_id or aid not in world.actors:
            continue
        actor = world.actors[aid]
        (cx, cy), = to_ego(np.asarray([tuple(actor.pose.position)], dtype=float))
        if math.hypot(cx, cy) > half_diag + actor.length:
            continue
        rel_h = normalize_angle(actor.pose.heading - ego.pose.heading)
        _paint_obb(img, fwd, left, cx, cy, rel_h, actor.length, actor.width,
                   CLASS_OTHER_VEHICLE)

    _paint_obb(img, fwd, left, 0.0, 0.0, 0.0, ego.length, ego.width, CLASS_EGO)
    return img
