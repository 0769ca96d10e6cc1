"""Lane-graph road maps: loading, validation, spatial queries, signals.

A map is a set of lane centerline polylines with widths, successor links,
and optional left/right neighbors, plus traffic lights and stop signs
pinned to a lane at an arc-length position. All spatial queries
(projection, tangents, drivability) run against this structure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import (
    point_segment_distance,
    polyline_cumlen,
    polyline_point_at,
    polyline_tangent_at,
)

TRAFFIC_LIGHT = "traffic_light"
STOP_SIGN = "stop_sign"
DEFAULT_LIGHT_PHASE = (10.0, 3.0, 7.0)

_LANE_KEYS = {"id", "width", "centerline", "successors", "left", "right"}
_SIGNAL_KEYS = {"id", "kind", "lane", "s", "phase"}


class MapError(ValueError):
    """Raised for schema violations, dangling references, or bad geometry."""


@dataclass
class Lane:
    id: str
    width: float
    centerline: np.ndarray
    successors: tuple[str, ...] = ()
    left: str | None = None
    right: str | None = None
    cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.centerline = np.asarray(self.centerline, dtype=float)
        self.cum = polyline_cumlen(self.centerline)

    @property
    def length(self) -> float:
        return float(self.cum[-1])

    def point_at(self, s: float) -> tuple[float, float]:
        return polyline_point_at(self.centerline, self.cum, s)

    def tangent_at(self, s: float) -> float:
        return polyline_tangent_at(self.centerline, self.cum, s)


@dataclass
class Signal:
    id: str
    kind: str
    lane: str
    s: float
    phase: tuple[float, float, float] | None = None
    position: tuple[float, float] = (0.0, 0.0)


class LaneHit(NamedTuple):
    lane_id: str
    s: float
    lateral: float
    distance: float


class RoadMap:
    def __init__(self, lanes: list[Lane], signals: list[Signal]):
        self.lanes: dict[str, Lane] = {lane.id: lane for lane in lanes}
        self.lane_order: list[str] = [lane.id for lane in lanes]
        self.signals: dict[str, Signal] = {sig.id: sig for sig in signals}
        self._segments = None

    def lane(self, lane_id: str) -> Lane:
        return self.lanes[lane_id]

    def lane_query(self, x: float, y: float) -> LaneHit:
        """Nearest lane by perpendicular distance to its centerline.

        Returns the lane id, arc length s of the projection, and the signed
        lateral offset (positive to the left of the travel direction). Ties
        keep the earliest lane in declaration order.
        """
        if not self.lanes:
            raise MapError("map has no lanes")
        best: LaneHit | None = None
        for lane_id in self.lane_order:
            lane = self.lanes[lane_id]
            pts = lane.centerline
            for i in range(len(pts) - 1):
                d, t, qx, qy = point_segment_distance(
                    x, y, pts[i][0], pts[i][1], pts[i + 1][0], pts[i + 1][1]
                )
                if best is None or d < best.distance:
                    seg_len = lane.cum[i + 1] - lane.cum[i]
                    s = float(lane.cum[i] + t * seg_len)
                    ex, ey = pts[i + 1] - pts[i]
                    norm = math.hypot(ex, ey)
                    # positive lateral = left of travel direction
                    lateral = ((x - qx) * (-ey) + (y - qy) * ex) / norm
                    best = LaneHit(lane_id, s, float(lateral), float(d))
        return best

    def segment_arrays(self):
        """Flattened (starts, ends, half_widths) over all lane segments, cached."""
        if self._segments is None:
            starts, ends, halfw = [], [], []
            for lane_id in self.lane_order:
                lane = self.lanes[lane_id]
                pts = lane.centerline
                for i in range(len(pts) - 1):
                    starts.append(pts[i])
                    ends.append(pts[i + 1])
                    halfw.append(0.5 * lane.width)
            self._segments = (
                np.array(starts, dtype=float),
                np.array(ends, dtype=float),
                np.array(halfw, dtype=float),
            )
        return self._segments

    def is_drivable(self, x: float, y: float) -> bool:
        """True when the point lies within half a width of some centerline."""
        hit = self.lane_query(x, y)
        return abs(hit.lateral) <= 0.5 * self.lanes[hit.lane_id].width

    def connected(self) -> bool:
        """Weak connectivity of the lane graph (successors + neighbors)."""
        if not self.lanes:
            return True
        adj: dict[str, set[str]] = {lid: set() for lid in self.lanes}
        for lane in self.lanes.values():
            links = list(lane.successors) + [l for l in (lane.left, lane.right) if l]
            for other in links:
                adj[lane.id].add(other)
                adj[other].add(lane.id)
        seen = set()
        stack = [self.lane_order[0]]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(adj[cur] - seen)
        return len(seen) == len(self.lanes)


def signal_phase(signal: Signal, sim_time: float) -> str:
    """Closed-form phase of a signal at a given simulation time.

    Traffic lights cycle green -> yellow -> red from t = 0; stop signs are
    always in the constant "stop" phase.
    """
    if signal.kind == STOP_SIGN:
        return "stop"
    g, y, r = signal.phase
    m = math.fmod(sim_time, g + y + r)
    if m < 0.0:
        m += g + y + r
    if m < g:
        return "green"
    if m < g + y:
        return "yellow"
    return "red"


def _require(cond: bool, msg: str):
    if not cond:
        raise MapError(msg)


def load_map(document) -> RoadMap:
    """Parse and validate a map document (JSON text, bytes, or a dict).

    Rejects unknown fields, dangling lane references, and degenerate
    polylines, naming the offending lane or signal.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MapError(f"invalid JSON: {exc}") from exc
    else:
        doc = document
    _require(isinstance(doc, dict), "map document must be an object")
    unknown = set(doc) - {"lanes", "signals"}
    _require(not unknown, f"unknown top-level fields: {sorted(unknown)}")
    _require("lanes" in doc and isinstance(doc["lanes"], list), "missing 'lanes' list")

    lanes: list[Lane] = []
    for raw in doc["lanes"]:
        _require(isinstance(raw, dict), "lane entries must be objects")
        lid = raw.get("id")
        _require(isinstance(lid, str) and lid, "lane missing string 'id'")
        extra = set(raw) - _LANE_KEYS
        _require(not extra, f"lane '{lid}': unknown fields {sorted(extra)}")
        width = raw.get("width")
        _require(isinstance(width, (int, float)) and width > 0, f"lane '{lid}': width must be > 0")
        center = raw.get("centerline")
        _require(isinstance(center, list) and len(center) >= 2,
                 f"lane '{lid}': centerline needs at least 2 points")
        pts = []
        for p in center:
            _require(isinstance(p, list) and len(p) == 2
                     and all(isinstance(v, (int, float)) and math.isfinite(v) for v in p),
                     f"lane '{lid}': centerline points must be finite [x, y] pairs")
            pts.append((float(p[0]), float(p[1])))
        for i in range(len(pts) - 1):
            _require(math.hypot(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]) > 0.0,
                     f"lane '{lid}': degenerate zero-length segment at index {i}")
        succ = raw.get("successors", [])
        _require(isinstance(succ, list) and all(isinstance(s, str) for s in succ),
                 f"lane '{lid}': successors must be a list of lane ids")
        left, right = raw.get("left"), raw.get("right")
        for side, val in (("left", left), ("right", right)):
            _require(val is None or isinstance(val, str), f"lane '{lid}': {side} must be a lane id or null")
        lanes.append(Lane(lid, float(width), np.array(pts), tuple(succ), left, right))

    ids = [lane.id for lane in lanes]
    _require(len(ids) == len(set(ids)), "duplicate lane ids")
    known = set(ids)
    for lane in lanes:
        for ref in lane.successors:
            _require(ref in known, f"lane '{lane.id}': successor '{ref}' does not exist")
        for side, ref in (("left", lane.left), ("right", lane.right)):
            _require(ref is None or ref in known,
                     f"lane '{lane.id}': {side} neighbor '{ref}' does not exist")

    signals: list[Signal] = []
    raw_signals = doc.get("signals", [])
    _require(isinstance(raw_signals, list), "'signals' must be a list")
    lane_by_id = {lane.id: lane for lane in lanes}
    for raw in raw_signals:
        _require(isinstance(raw, dict), "signal entries must be objects")
        sid = raw.get("id")
        _require(isinstance(sid, str) and sid, "signal missing string 'id'")
        extra = set(raw) - _SIGNAL_KEYS
        _require(not extra, f"signal '{sid}': unknown fields {sorted(extra)}")
        kind = raw.get("kind")
        _require(kind in (TRAFFIC_LIGHT, STOP_SIGN), f"signal '{sid}': bad kind {kind!r}")
        lane_ref = raw.get("lane")
        _require(lane_ref in lane_by_id, f"signal '{sid}': lane '{lane_ref}' does not exist")
        s = raw.get("s")
        lane = lane_by_id[lane_ref]
        _require(isinstance(s, (int, float)) and 0.0 <= s <= lane.length,
                 f"signal '{sid}': s out of lane range")
        phase = raw.get("phase")
        if kind == STOP_SIGN:
            _require(phase is None, f"signal '{sid}': stop signs take no phase schedule")
        elif phase is None:
            phase = DEFAULT_LIGHT_PHASE
        else:
            _require(isinstance(phase, list) and len(phase) == 3
                     and all(isinstance(v, (int, float)) and v > 0 for v in phase),
                     f"signal '{sid}': phase must be [green, yellow, red] durations > 0")
            phase = tuple(float(v) for v in phase)
        sig = Signal(sid, kind, lane_ref, float(s), phase, lane.point_at(float(s)))
        signals.append(sig)
    sig_ids = [s.id for s in signals]
    _require(len(sig_ids) == len(set(sig_ids)), "duplicate signal ids")

    return RoadMap(lanes, signals)
