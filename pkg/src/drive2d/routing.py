"""Route planning over the lane graph.

A route is a polyline of waypoints resampled to roughly 1 m spacing plus a
cursor marking progress. Planners differ only in how they pick the lane
sequence:

* RandomRoamPlanner wanders, extending the route with uniformly chosen
  successors whenever the remaining tail gets short.
* FixedPathPlanner follows an explicit lane sequence.
* FixedEndingPlanner searches the lane graph with A* from the current
  position to a goal point and commits to the result.

All planners share init_route/extend_route so tasks can swap them freely.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import polyline_cumlen, polyline_point_at, resample_polyline
from .roadmap import RoadMap
from .rng import RngStreams

WAYPOINT_STEP = 1.0
MIN_TAIL = 0.5
REACH_RADIUS = 2.0
ROAM_MIN_AHEAD = 20
GRAPH_SAMPLE_STEP = 1.0
LC_FORWARD = 4.0


class RoutingError(RuntimeError):
    """Raised when a planner cannot produce or extend a route."""


@dataclass
class Route:
    """Waypoints (N,2), a progress cursor, and the lane frontier the route
    ends on (used by roaming extension)."""
    waypoints: np.ndarray
    cursor: int = 0
    frontier_lane: str | None = None
    frontier_s: float = 0.0

    def __post_init__(self):
        self.waypoints = np.asarray(self.waypoints, dtype=float).reshape(-1, 2)

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.waypoints)

    def remaining(self) -> int:
        return len(self.waypoints) - self.cursor

    def advance(self, x: float, y: float) -> int:
        """Move the cursor past every consecutively reached waypoint.

        Returns how many waypoints were newly reached this call.
        """
        start = self.cursor
        n = len(self.waypoints)
        while self.cursor < n:
            wx, wy = self.waypoints[self.cursor]
            if math.hypot(wx - x, wy - y) > REACH_RADIUS:
                break
            self.cursor += 1
        return self.cursor - start

    def ahead(self, count: int | None = None) -> np.ndarray:
        """Waypoints from the cursor onward, optionally capped at count."""
        tail = self.waypoints[self.cursor:]
        return tail if count is None else tail[:count]


def _lane_tail(road_map: RoadMap, lane_id: str, s_from: float) -> np.ndarray:
    """Centerline points of a lane from arc length s_from to its end."""
    lane = road_map.lanes[lane_id]
    pts = [lane.point_at(s_from)]
    for i in range(len(lane.centerline)):
        if lane.cum[i] > s_from:
            pts.append(tuple(lane.centerline[i]))
    return np.asarray(pts, dtype=float)


class RandomRoamPlanner:
    """Endless wandering: extend with a uniformly chosen successor lane
    whenever fewer than ROAM_MIN_AHEAD waypoints remain."""

    def __init__(self, road_map: RoadMap, rng: RngStreams, stream: str = "route"):
        self.map = road_map
        self._rng = rng.stream(stream)

    def init_route(self, lane_id: str, s: float) -> Route:
        if lane_id not in self.map.lanes:
            raise RoutingError(f"unknown lane '{lane_id}'")
        tail = _lane_tail(self.map, lane_id, s)
        if len(tail) < 2:
            # starting at the lane's very end: jump straight to a successor
            route = Route(np.asarray([self.map.lanes[lane_id].point_at(s)]),
                          frontier_lane=lane_id,
                          frontier_s=self.map.lanes[lane_id].length)
            self.extend_route(route)
            return route
        wps = resample_polyline(tail, WAYPOINT_STEP, MIN_TAIL)
        route = Route(wps, frontier_lane=lane_id,
                      frontier_s=self.map.lanes[lane_id].length)
        self.extend_route(route)
        return route

    def extend_route(self, route: Route):
        while route.remaining() < ROAM_MIN_AHEAD:
            succs = self.map.lanes[route.frontier_lane].successors
            if not succs:
                return
            pick = succs[int(self._rng.integers(len(succs)))]
            lane = self.map.lanes[pick]
            tail = _lane_tail(self.map, pick, 0.0)
            if len(tail) >= 2:
                ext = resample_polyline(tail, WAYPOINT_STEP, MIN_TAIL)
                route.waypoints = np.vstack([route.waypoints, ext])
            route.frontier_lane = pick
            route.frontier_s = lane.length


class FixedPathPlanner:
    """Follow an explicit lane sequence; no extension once exhausted.

    A successor transition drives the current lane to its end; an
    adjacency (left/right) transition changes lanes immediately, entering
    the neighbor a few metres ahead of the current position.
    """

    def __init__(self, road_map: RoadMap, lane_ids: list[str]):
        for lid in lane_ids:
            if lid not in road_map.lanes:
                raise RoutingError(f"unknown lane '{lid}'")
        for a, b in zip(lane_ids, lane_ids[1:]):
            lane = road_map.lanes[a]
            if b not in lane.successors and b not in (lane.left, lane.right):
                raise RoutingError(f"lane '{b}' does not follow '{a}'")
        self.map = road_map
        self.lane_ids = list(lane_ids)

    def init_route(self, lane_id: str, s: float) -> Route:
        if not self.lane_ids or self.lane_ids[0] != lane_id:
            raise RoutingError(f"path does not start on lane '{lane_id}'")
        pts: list[tuple[float, float]] = []
        entry_s = s
        for k, lid in enumerate(self.lane_ids):
            lane = self.map.lanes[lid]
            nxt = self.lane_ids[k + 1] if k + 1 < len(self.lane_ids) else None
            if nxt is not None and nxt in (lane.left, lane.right):
                # change lanes now: leave from the entry point, join the
                # neighbor LC_FORWARD metres ahead of its projection
                x, y = lane.point_at(entry_s)
                pts.append((float(x), float(y)))
                neighbor = self.map.lanes[nxt]
                hit = _project_onto(neighbor, x, y)
                entry_s = min(hit + LC_FORWARD, neighbor.length)
                continue
            x, y = lane.point_at(entry_s)
            pts.append((float(x), float(y)))
            for i in range(len(lane.centerline)):
                if entry_s < lane.cum[i] < lane.length:
                    pts.append(tuple(lane.centerline[i]))
            pts.append(tuple(lane.centerline[-1]))
            entry_s = 0.0
        arr = np.asarray(pts, dtype=float)
        keep = [0]
        for i in range(1, len(arr)):
            if np.hypot(*(arr[i] - arr[keep[-1]])) > 1e-9:
                keep.append(i)
        if len(keep) < 2:
            raise RoutingError("lane sequence spans no distance")
        wps = resample_polyline(arr[keep], WAYPOINT_STEP, MIN_TAIL)
        last = self.lane_ids[-1]
        return Route(wps, frontier_lane=last,
                     frontier_s=self.map.lanes[last].length)

    def extend_route(self, route: Route):
        return


def _project_onto(lane, x: float, y: float) -> float:
    """Arc length of the closest centerline point to (x, y)."""
    best_d, best_s = math.inf, 0.0
    for i in range(len(lane.centerline) - 1):
        ax, ay = lane.centerline[i]
        bx, by = lane.centerline[i + 1]
        vx, vy = bx - ax, by - ay
        L2 = vx * vx + vy * vy
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((x - ax) * vx + (y - ay) * vy) / L2))
        qx, qy = ax + t * vx, ay + t * vy
        d = math.hypot(x - qx, y - qy)
        if d < best_d:
            best_d = d
            best_s = lane.cum[i] + t * math.sqrt(L2)
    return best_s


@dataclass(frozen=True)
class _Node:
    lane: str
    idx: int  # sample index along the lane


class RouteGraph:
    """Discretized lane graph for A*: nodes are 1 m samples along each
    centerline, edges follow the centerline, jump to successor lanes, and
    hop sideways to adjacent lanes a few metres ahead."""

    def __init__(self, road_map: RoadMap):
        self.map = road_map
        self.samples: dict[str, np.ndarray] = {}
        self.sample_s: dict[str, np.ndarray] = {}
        for lid, lane in road_map.lanes.items():
            n = max(2, int(math.floor(lane.length / GRAPH_SAMPLE_STEP)) + 1)
            s = np.linspace(0.0, lane.length, n)
            self.sample_s[lid] = s
            self.samples[lid] = np.asarray([lane.point_at(si) for si in s])

    def node_pos(self, node: _Node) -> tuple[float, float]:
        p = self.samples[node.lane][node.idx]
        return float(p[0]), float(p[1])

    def nearest_node(self, x: float, y: float) -> _Node:
        hit = self.map.lane_query(x, y)
        idx = int(np.argmin(np.abs(self.sample_s[hit.lane_id] - hit.s)))
        return _Node(hit.lane_id, idx)

    def neighbors(self, node: _Node):
        """Yield (next_node, cost) pairs in a deterministic order."""
        s = self.sample_s[node.lane]
        pts = self.samples[node.lane]
        if node.idx + 1 < len(s):
            yield _Node(node.lane, node.idx + 1), float(s[node.idx + 1] - s[node.idx])
        else:
            for succ in self.map.lanes[node.lane].successors:
                nxt = _Node(succ, 0)
                yield nxt, self._chord(node, nxt)
        lane = self.map.lanes[node.lane]
        for adj in (lane.left, lane.right):
            if adj is None:
                continue
            x, y = pts[node.idx]
            # project onto the neighbor, then aim a few metres forward so the
            # hop is a plausible lane change rather than a sideways teleport
            s_target = min(self._project_s(adj, x, y) + LC_FORWARD,
                           self.map.lanes[adj].length)
            idx = int(np.argmin(np.abs(self.sample_s[adj] - s_target)))
            nxt = _Node(adj, idx)
            yield nxt, self._chord(node, nxt)

    def _project_s(self, lane_id: str, x: float, y: float) -> float:
        return _project_onto(self.map.lanes[lane_id], x, y)

    def _chord(self, a: _Node, b: _Node) -> float:
        ax, ay = self.node_pos(a)
        bx, by = self.node_pos(b)
        return math.hypot(bx - ax, by - ay)

    def shortest_path(self, start: _Node, goal: _Node,
                      heuristic: str = "euclidean") -> tuple[list[_Node], float]:
        """A* over the sampled graph. Returns (nodes, cost).

        The default heuristic is straight-line distance, which never
        exceeds any edge sequence's length, so the first expansion of the
        goal is optimal; "zero" degrades to Dijkstra. Ties break on
        (f, lane, idx) to stay deterministic.
        """
        gx, gy = self.node_pos(goal)

        if heuristic == "zero":
            def h(n: _Node) -> float:
                return 0.0
        elif heuristic == "euclidean":
            def h(n: _Node) -> float:
                x, y = self.node_pos(n)
                return math.hypot(gx - x, gy - y)
        else:
            raise RoutingError(f"unknown heuristic '{heuristic}'")

        dist: dict[_Node, float] = {start: 0.0}
        parent: dict[_Node, _Node] = {}
        pq: list[tuple[float, str, int]] = [(h(start), start.lane, start.idx)]
        done: set[_Node] = set()
        while pq:
            f, lane, idx = heapq.heappop(pq)
            node = _Node(lane, idx)
            if node in done:
                continue
            done.add(node)
            if node == goal:
                path = [node]
                while path[-1] in parent:
                    path.append(parent[path[-1]])
                path.reverse()
                return path, dist[node]
            for nxt, cost in self.neighbors(node):
                nd = dist[node] + cost
                if nd < dist.get(nxt, math.inf) - 1e-12:
                    dist[nxt] = nd
                    parent[nxt] = node
                    heapq.heappush(pq, (nd + h(nxt), nxt.lane, nxt.idx))
        raise RoutingError(f"no path from {start} to {goal}")


class FixedEndingPlanner:
    """A* to a goal position; the route ends there."""

    def __init__(self, road_map: RoadMap, goal: tuple[float, float]):
        self.map = road_map
        self.goal = (float(goal[0]), float(goal[1]))
        self.graph = RouteGraph(road_map)

    def init_route(self, lane_id: str, s: float) -> Route:
        lane = self.map.lanes[lane_id]
        x, y = lane.point_at(s)
        start = self.graph.nearest_node(x, y)
        if start.lane == lane_id:
            # snap to the requested offset, not wherever the query landed
            idx = int(np.argmin(np.abs(self.graph.sample_s[lane_id] - s)))
            start = _Node(lane_id, idx)
        goal = self.graph.nearest_node(*self.goal)
        nodes, _ = self.graph.shortest_path(start, goal)
        pts = np.asarray([self.graph.node_pos(n) for n in nodes])
        keep = [0]
        for i in range(1, len(pts)):
            if np.hypot(*(pts[i] - pts[keep[-1]])) > 1e-9:
                keep.append(i)
        if len(keep) < 2:
            raise RoutingError("degenerate path: start equals goal")
        wps = resample_polyline(pts[keep], WAYPOINT_STEP, MIN_TAIL)
        end = nodes[-1]
        return Route(wps, frontier_lane=end.lane,
                     frontier_s=float(self.graph.sample_s[end.lane][end.idx]))

    def extend_route(self, route: Route):
        return


@dataclass
class PlannerSpec:
    """Declarative planner choice for task configs.

    kind: "random_roam" | "fixed_path" | "fixed_ending"
    lanes: lane sequence for fixed_path
    goal: (x, y) for fixed_ending
    """
    kind: str = "random_roam"
    lanes: tuple[str, ...] = ()
    goal: tuple[float, float] | None = None

    def build(self, road_map: RoadMap, rng: RngStreams, stream: str = "route"):
        if self.kind == "random_roam":
            return RandomRoamPlanner(road_map, rng, stream)
        if self.kind == "fixed_path":
            return FixedPathPlanner(road_map, list(self.lanes))
        if self.kind == "fixed_ending":
            if self.goal is None:
                raise RoutingError("fixed_ending planner needs a goal")
            return FixedEndingPlanner(road_map, self.goal)
        raise RoutingError(f"unknown planner kind '{self.kind}'")
