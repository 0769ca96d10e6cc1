"""Generate the built-in map files.

Writes one JSON document per driving scenario into src/drive2d/maps/.
The outputs are committed; rerunning this script must reproduce them
byte-for-byte (coordinates are rounded before serialization).

Usage: python scripts/gen_maps.py [--out DIR]
"""
from __future__ import annotations

import argparse
import json
import math
import pathlib

LANE_WIDTH = 4.0


def arc(cx, cy, radius, deg_from, deg_to, steps=12):
    """Polyline along a circular arc, inclusive of both endpoints."""
    pts = []
    for i in range(steps + 1):
        a = math.radians(deg_from + (deg_to - deg_from) * i / steps)
        pts.append((cx + radius * math.cos(a), cy + radius * math.sin(a)))
    return pts


def lane(lane_id, centerline, successors=(), left=None, right=None,
         width=LANE_WIDTH):
    return {
        "id": lane_id,
        "width": width,
        "centerline": [[round(x, 6), round(y, 6)] for x, y in centerline],
        "successors": list(successors),
        "left": left,
        "right": right,
    }


def signal(sig_id, kind, lane_id, s, phase=None):
    doc = {"id": sig_id, "kind": kind, "lane": lane_id, "s": s}
    if phase is not None:
        doc["phase"] = list(phase)
    return doc


def right_turn():
    # eastbound approach turning south; northbound through traffic crosses
    # the turn path, southbound traffic merges into the exit lane
    return {
        "lanes": [
            lane("e_app", [(-60.0, 0.0), (-8.0, 0.0)], ["e_turn"]),
            lane("e_turn", arc(-8.0, -8.0, 8.0, 90.0, 0.0), ["s_out"]),
            lane("s_in", [(0.0, 60.0), (0.0, -8.0)], ["s_out"]),
            lane("s_out", [(0.0, -8.0), (0.0, -60.0)], []),
            lane("n_thru", [(-3.5, -60.0), (-3.5, 60.0)], []),
        ],
        "signals": [],
    }


def left_turn():
    # eastbound approach turning north across oncoming westbound traffic
    return {
        "lanes": [
            lane("e_app", [(-60.0, 0.0), (-8.0, 0.0)], ["l_turn"]),
            lane("l_turn", arc(-8.0, 11.5, 11.5, -90.0, 0.0), ["n_out"]),
            lane("n_out", [(3.5, 11.5), (3.5, 60.0)], []),
            lane("n_in", [(3.5, -60.0), (3.5, 11.5)], ["n_out"]),
            lane("w_thru", [(60.0, 3.5), (-60.0, 3.5)], []),
        ],
        "signals": [],
    }


def lane_merge():
    return {
        "lanes": [
            lane("m_in", [(-80.0, 0.0), (0.0, 0.0)], ["m_out"]),
            lane("m_out", [(0.0, 0.0), (80.0, 0.0)], []),
            lane("ramp", [(-64.0, -10.0), (-28.0, -10.0), (-14.0, -7.5),
                          (-5.0, -3.0), (0.0, 0.0)], ["m_out"]),
        ],
        "signals": [],
    }


def overtake():
    # two eastbound lanes; traffic puts a slow leader in the right lane
    return {
        "lanes": [
            lane("o_right", [(-80.0, 0.0), (80.0, 0.0)], [], left="o_left"),
            lane("o_left", [(-80.0, 3.5), (80.0, 3.5)], [], right="o_right"),
        ],
        "signals": [],
    }


def four_lane():
    rows = [("f0", 0.0), ("f1", 3.5), ("f2", 7.0), ("f3", 10.5)]
    lanes = []
    for i, (lid, y) in enumerate(rows):
        lanes.append(lane(
            lid, [(-100.0, y), (100.0, y)], [],
            left=rows[i + 1][0] if i + 1 < len(rows) else None,
            right=rows[i - 1][0] if i > 0 else None,
        ))
    return {"lanes": lanes, "signals": []}


def roundabout():
    r = 12.0
    return {
        "lanes": [
            lane("r0", arc(0.0, 0.0, r, 0.0, 90.0), ["r1"]),
            lane("r1", arc(0.0, 0.0, r, 90.0, 180.0), ["r2", "exit_w"]),
            lane("r2", arc(0.0, 0.0, r, 180.0, 270.0), ["r3"]),
            lane("r3", arc(0.0, 0.0, r, 270.0, 360.0), ["r0"]),
            lane("entry_s", [(12.0, -40.0), (12.0, 0.0)], ["r0"]),
            lane("exit_w", [(-12.0, 0.0), (-12.0, -40.0)], []),
        ],
        "signals": [],
    }


def navigation():
    # one-way rounded-corner ring for endless roaming
    r = 8.0
    return {
        "lanes": [
            lane("ring_s", [(8.0, 0.0), (52.0, 0.0)], ["ring_se"]),
            lane("ring_se", arc(52.0, 8.0, r, -90.0, 0.0), ["ring_e"]),
            lane("ring_e", [(60.0, 8.0), (60.0, 52.0)], ["ring_ne"]),
            lane("ring_ne", arc(52.0, 52.0, r, 0.0, 90.0), ["ring_n"]),
            lane("ring_n", [(52.0, 60.0), (8.0, 60.0)], ["ring_nw"]),
            lane("ring_nw", arc(8.0, 52.0, r, 90.0, 180.0), ["ring_w"]),
            lane("ring_w", [(0.0, 52.0), (0.0, 8.0)], ["ring_sw"]),
            lane("ring_sw", arc(8.0, 8.0, r, 180.0, 270.0), ["ring_s"]),
        ],
        "signals": [],
    }


def traffic_lights():
    return {
        "lanes": [
            lane("app", [(-80.0, 0.0), (0.0, 0.0)], ["out"]),
            lane("out", [(0.0, 0.0), (80.0, 0.0)], []),
        ],
        "signals": [
            signal("light_0", "traffic_light", "app", 72.0,
                   phase=(10.0, 3.0, 7.0)),
        ],
    }


def stop_sign():
    return {
        "lanes": [
            lane("app", [(-80.0, 0.0), (0.0, 0.0)], ["out"]),
            lane("out", [(0.0, 0.0), (80.0, 0.0)], []),
        ],
        "signals": [
            signal("stop_0", "stop_sign", "app", 72.0),
        ],
    }


BUILDERS = {
    "right_turn": right_turn,
    "left_turn": left_turn,
    "lane_merge": lane_merge,
    "overtake": overtake,
    "four_lane": four_lane,
    "roundabout": roundabout,
    "navigation": navigation,
    "traffic_lights": traffic_lights,
    "stop_sign": stop_sign,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = pathlib.Path(__file__).resolve().parent.parent / "src" / "drive2d" / "maps"
    parser.add_argument("--out", type=pathlib.Path, default=default_out)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        path = args.out / f"{name}.map.json"
        path.write_text(json.dumps(build(), indent=1) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
