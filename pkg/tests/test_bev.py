import math

import numpy as np
import pytest

from drive2d.bev import (
    CLASS_BACKGROUND, CLASS_EGO, CLASS_INTENTION_WAYPOINT, CLASS_OTHER_VEHICLE,
    CLASS_ROAD, CLASS_ROUTE_WAYPOINT, CLASS_SIGNAL_GREEN, CLASS_SIGNAL_RED,
    PALETTE, BevConfig, render_bev,
)
from drive2d.routing import Route
from drive2d.roadmap import load_map
from drive2d.world import WorldState

from conftest import put_vehicle, straight_doc, world_from

CFG = BevConfig(size=128, resolution=0.25)


def render(world, ego="ego", visible=None, intentions=None, cfg=CFG):
    visible = set(world.actors) if visible is None else visible
    return render_bev(world, ego, visible, intentions or {}, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        BevConfig(size=127)
    with pytest.raises(ValueError):
        BevConfig(size=6)
    with pytest.raises(ValueError):
        BevConfig(resolution=0.0)
    assert BevConfig(size=128).anchor == (96, 64)


def test_palette_covers_every_class():
    assert len(PALETTE) == 8
    assert all(len(c) == 3 for c in PALETTE)


def test_empty_map_ego_only():
    w = WorldState(load_map({"lanes": [], "signals": []}))
    put_vehicle(w, "ego", 3.0, -7.0, heading=1.1)
    img = render(w)
    assert img.shape == (128, 128)
    assert img.dtype == np.uint8
    classes = set(np.unique(img).tolist())
    assert classes == {CLASS_BACKGROUND, CLASS_EGO}
    # ego rectangle: 4.5 x 2.0 m at 0.25 m/px covers about 18 x 8 = 144
    # pixel centers, plus up to a perimeter's worth of boundary pixels
    count = int((img == CLASS_EGO).sum())
    assert 130 <= count <= 200


def test_ego_anchored_and_heading_up():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0, heading=0.7)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar, ac] == CLASS_EGO
    # ego box extends further along rows (length) than columns (width)
    rows, cols = np.where(img == CLASS_EGO)
    assert np.ptp(rows) > np.ptp(cols)


def test_anchor_invariant_to_pose():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 123.0, 1.5, heading=2.2)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar, ac] == CLASS_EGO


def test_road_painted_ahead():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0, heading=0.0)
    img = render(w)
    ar, ac = CFG.anchor
    # straight road ahead: the column through the anchor is road (or
    # better) from the top of the frame down to the ego
    column = img[:ar, ac]
    assert np.all(column >= CLASS_ROAD)
    # clear of the 4 m road, expect background
    assert img[ar, 8] == CLASS_BACKGROUND


def test_vehicle_five_metres_ahead_lands_twenty_pixels_up():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0, heading=0.0)
    put_vehicle(w, "other", 205.0, 0.0, heading=0.0)
    img = render(w)
    ar, ac = CFG.anchor
    # 5 m / 0.25 m/px = 20 px toward the top
    assert img[ar - 20, ac] == CLASS_OTHER_VEHICLE


def test_invisible_actor_not_drawn():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0)
    put_vehicle(w, "hidden", 205.0, 0.0)
    img = render(w, visible={"ego"})
    assert CLASS_OTHER_VEHICLE not in np.unique(img)


def test_route_waypoints_drawn():
    w = world_from(straight_doc(length=400.0))
    ego = put_vehicle(w, "ego", 200.0, 0.0)
    ego.route = Route(np.array([[205.0, 0.0], [210.0, 0.0]]))
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar - 20, ac] == CLASS_ROUTE_WAYPOINT


def test_intention_waypoints_drawn_not_for_ego():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0)
    intentions = {
        "ego": np.array([[207.0, 0.0]]),    # must be skipped
        "other": np.array([[205.0, 0.0]]),
    }
    img = render(w, intentions=intentions)
    ar, ac = CFG.anchor
    assert img[ar - 20, ac] == CLASS_INTENTION_WAYPOINT
    assert img[ar - 28, ac] != CLASS_INTENTION_WAYPOINT


def test_signals_colored_by_phase():
    doc = straight_doc(length=400.0)
    doc["signals"] = [
        {"id": "g", "kind": "traffic_light", "lane": "lane0", "s": 205.0,
         "phase": [1000.0, 1.0, 1.0]},
    ]
    w = world_from(doc)
    put_vehicle(w, "ego", 200.0, 0.0)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar - 20, ac] == CLASS_SIGNAL_GREEN


def test_stop_sign_drawn_red():
    doc = straight_doc(length=400.0)
    doc["signals"] = [
        {"id": "s", "kind": "stop_sign", "lane": "lane0", "s": 205.0},
    ]
    w = world_from(doc)
    put_vehicle(w, "ego", 200.0, 0.0)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar - 20, ac] == CLASS_SIGNAL_RED


def test_render_rotation_invariant():
    """Rotating the whole scene (map + actors) about the origin leaves the
    image unchanged, because everything is drawn in the ego frame.

    The base poses are deliberately off-lattice so no region boundary sits
    exactly on a pixel center, where float noise could flip membership.
    """
    angle = 0.83
    c, s = math.cos(angle), math.sin(angle)

    def rot(x, y):
        return c * x - s * y, s * x + c * y

    base_doc = straight_doc(length=400.0)
    w1 = world_from(base_doc)
    put_vehicle(w1, "ego", 200.1, 0.37, heading=0.13)
    put_vehicle(w1, "other", 206.2, 1.04, heading=0.41)
    img1 = render(w1)

    rot_doc = {
        "lanes": [{
            "id": "lane0", "width": 4.0,
            "centerline": [list(rot(0.0, 0.0)), list(rot(400.0, 0.0))],
            "successors": [],
        }],
        "signals": [],
    }
    w2 = world_from(rot_doc)
    ex, ey = rot(200.1, 0.37)
    ox, oy = rot(206.2, 1.04)
    put_vehicle(w2, "ego", ex, ey, heading=0.13 + angle)
    put_vehicle(w2, "other", ox, oy, heading=0.41 + angle)
    img2 = render(w2)

    assert np.array_equal(img1, img2)


def test_draw_order_other_vehicle_over_waypoints():
    w = world_from(straight_doc(length=400.0))
    ego = put_vehicle(w, "ego", 200.0, 0.0)
    ego.route = Route(np.array([[205.0, 0.0]]))
    put_vehicle(w, "other", 205.0, 0.0)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar - 20, ac] == CLASS_OTHER_VEHICLE


def test_overlapping_other_under_ego():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0)
    put_vehicle(w, "other", 200.5, 0.0)
    img = render(w)
    ar, ac = CFG.anchor
    assert img[ar, ac] == CLASS_EGO


def test_resolution_scales_extent():
    w = world_from(straight_doc(length=400.0))
    put_vehicle(w, "ego", 200.0, 0.0)
    fine = render(w, cfg=BevConfig(size=128, resolution=0.125))
    # at 0.125 m/px the 2 m half-width of the road spans 16 columns
    ar, ac = BevConfig(size=128, resolution=0.125).anchor
    assert fine[0, ac + 15] >= CLASS_ROAD
    assert fine[0, ac + 17] == CLASS_BACKGROUND
