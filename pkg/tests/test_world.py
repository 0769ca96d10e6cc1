import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drive2d.roadmap import load_map
from drive2d.world import (
    A_MAX, DT, MAX_STEER, V_MAX, V_MIN, WHEELBASE_RATIO,
    AutopilotConfig, Pose, SpawnSpec, VehicleState, WorldError, WorldState,
    autopilot_control, detect_collisions, spawn_vehicle, tick,
)

from conftest import put_vehicle, straight_doc, world_from


def reference_step(x, y, heading, speed, throttle, steer_cmd, length=4.5, dt=DT):
    """Hand-written single-step integrator, independent of the package."""
    throttle = min(1.0, max(-1.0, throttle))
    steer_cmd = min(1.0, max(-1.0, steer_cmd))
    new_speed = min(V_MAX, max(V_MIN, speed + throttle * A_MAX * dt))
    steer = steer_cmd * MAX_STEER
    wb = WHEELBASE_RATIO * length
    new_heading = heading + (speed / wb) * math.tan(steer) * dt
    new_heading = math.atan2(math.sin(new_heading), math.cos(new_heading))
    new_x = x + speed * math.cos(new_heading) * dt
    new_y = y + speed * math.sin(new_heading) * dt
    return new_x, new_y, new_heading, new_speed


controls = st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
states = st.tuples(st.floats(-50, 50), st.floats(-50, 50),
                   st.floats(-3.1, 3.1), st.floats(V_MIN, V_MAX))


@given(states, controls)
@settings(max_examples=200)
def test_single_step_matches_reference(state, control):
    x, y, heading, speed = state
    throttle, steer_cmd = control
    w = world_from(straight_doc(length=200.0))
    actor = put_vehicle(w, "v", x, y, heading=heading, speed=speed)
    tick(w, {"v": (throttle, steer_cmd)})
    ex, ey, eh, ev = reference_step(x, y, heading, speed, throttle, steer_cmd)
    assert actor.pose.position.x == pytest.approx(ex, abs=1e-12)
    assert actor.pose.position.y == pytest.approx(ey, abs=1e-12)
    assert actor.pose.heading == pytest.approx(eh, abs=1e-12)
    assert actor.speed == pytest.approx(ev, abs=1e-12)


def test_full_throttle_from_rest_moves_nothing_first_step():
    # position integrates the pre-update speed, so the very first step
    # from rest only raises speed
    w = world_from(straight_doc())
    actor = put_vehicle(w, "v", 10.0, 0.0, speed=0.0)
    tick(w, {"v": (1.0, 0.0)})
    assert actor.pose.position.x == 10.0
    assert actor.speed == pytest.approx(0.3)
    tick(w, {"v": (1.0, 0.0)})
    assert actor.pose.position.x == pytest.approx(10.0 + 0.3 * DT)
    assert actor.speed == pytest.approx(0.6)


def test_speed_saturates():
    w = world_from(straight_doc(length=10000.0))
    actor = put_vehicle(w, "v", 0.0, 0.0, speed=0.0)
    for _ in range(100):
        tick(w, {"v": (1.0, 0.0)})
    assert actor.speed == V_MAX
    for _ in range(100):
        tick(w, {"v": (-1.0, 0.0)})
    assert actor.speed == V_MIN


def test_reverse_moves_backward():
    w = world_from(straight_doc())
    actor = put_vehicle(w, "v", 50.0, 0.0, speed=-2.0)
    tick(w, {"v": (0.0, 0.0)})
    assert actor.pose.position.x == pytest.approx(50.0 - 2.0 * DT)


def test_steering_turns_left_for_positive_command():
    w = world_from(straight_doc())
    actor = put_vehicle(w, "v", 0.0, 0.0, speed=5.0)
    tick(w, {"v": (0.0, 1.0)})
    assert actor.pose.heading > 0
    assert actor.pose.position.y > 0


def test_zero_speed_never_turns():
    w = world_from(straight_doc())
    actor = put_vehicle(w, "v", 0.0, 0.0, speed=0.0)
    tick(w, {"v": (0.0, 1.0)})
    assert actor.pose.heading == 0.0


def test_missing_control_means_coast():
    w = world_from(straight_doc())
    actor = put_vehicle(w, "v", 0.0, 0.0, speed=4.0)
    tick(w)
    assert actor.speed == pytest.approx(4.0)
    assert actor.pose.position.x == pytest.approx(4.0 * DT)


def test_control_for_unknown_actor_rejected():
    w = world_from(straight_doc())
    with pytest.raises(WorldError):
        tick(w, {"ghost": (0.0, 0.0)})


def test_tick_advances_counter_and_time():
    w = world_from(straight_doc())
    assert w.sim_time == 0.0
    tick(w)
    tick(w)
    assert w.tick == 2
    assert w.sim_time == pytest.approx(0.2)


def test_pose_normalizes_heading():
    p = Pose((0.0, 0.0), 3 * math.pi)
    assert p.heading == pytest.approx(-math.pi)


def test_spawn_places_on_centerline():
    w = world_from(straight_doc())
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=12.0, speed=2.0))
    actor = w.actors[vid]
    assert vid == "v0"
    assert actor.pose.position == pytest.approx((12.0, 0.0))
    assert actor.pose.heading == pytest.approx(0.0)
    assert actor.speed == 2.0


def test_spawn_ids_increment():
    w = world_from(straight_doc())
    assert spawn_vehicle(w, SpawnSpec(lane="lane0", offset=10.0)) == "v0"
    assert spawn_vehicle(w, SpawnSpec(lane="lane0", offset=30.0)) == "v1"


def test_spawn_rejects_unknown_lane_and_bad_offset():
    w = world_from(straight_doc())
    with pytest.raises(WorldError):
        spawn_vehicle(w, SpawnSpec(lane="nope", offset=0.0))
    with pytest.raises(WorldError):
        spawn_vehicle(w, SpawnSpec(lane="lane0", offset=-1.0))
    with pytest.raises(WorldError):
        spawn_vehicle(w, SpawnSpec(lane="lane0", offset=1000.0))


def test_spawn_rejects_overlap():
    w = world_from(straight_doc())
    spawn_vehicle(w, SpawnSpec(lane="lane0", offset=20.0))
    with pytest.raises(WorldError):
        spawn_vehicle(w, SpawnSpec(lane="lane0", offset=21.0))
    # far enough along the same lane is fine
    spawn_vehicle(w, SpawnSpec(lane="lane0", offset=40.0))


def test_reset_clears_actors_and_reseeds():
    w = world_from(straight_doc(), seed=1)
    spawn_vehicle(w, SpawnSpec(lane="lane0", offset=10.0))
    tick(w)
    w.reset(seed=2)
    assert w.actors == {}
    assert w.tick == 0
    assert w.episode_seed == 2
    # fresh ids after reset
    assert spawn_vehicle(w, SpawnSpec(lane="lane0", offset=10.0)) == "v0"


def test_canonical_state_deterministic():
    def build():
        w = world_from(straight_doc(), seed=9)
        spawn_vehicle(w, SpawnSpec(lane="lane0", offset=10.0, speed=1.0))
        tick(w, {"v0": (0.5, 0.1)})
        return w.canonical_state()
    assert build() == build()


def test_canonical_state_tracks_changes():
    w = world_from(straight_doc(), seed=9)
    spawn_vehicle(w, SpawnSpec(lane="lane0", offset=10.0, speed=1.0))
    before = w.canonical_state()
    tick(w, {"v0": (0.5, 0.1)})
    assert w.canonical_state() != before


def test_detect_collisions_pairs_sorted():
    w = world_from(straight_doc())
    put_vehicle(w, "a", 0.0, 0.0)
    put_vehicle(w, "b", 3.0, 0.0)   # overlapping (4.5 m long)
    put_vehicle(w, "c", 50.0, 0.0)  # clear
    assert detect_collisions(w) == [("a", "b")]


def test_detect_collisions_exact_touch():
    w = world_from(straight_doc())
    put_vehicle(w, "a", 0.0, 0.0)
    put_vehicle(w, "b", 4.5, 0.0)
    assert detect_collisions(w) == [("a", "b")]
    w2 = world_from(straight_doc())
    put_vehicle(w2, "a", 0.0, 0.0)
    put_vehicle(w2, "b", 4.5 + 1e-6, 0.0)
    assert detect_collisions(w2) == []


def test_detect_collisions_rotated():
    w = world_from(straight_doc())
    put_vehicle(w, "a", 0.0, 0.0)
    # crosswise vehicle whose nose pokes into a's side
    put_vehicle(w, "b", 0.0, 2.5, heading=-math.pi / 2)
    assert detect_collisions(w) == [("a", "b")]


def test_signal_states_follow_clock():
    doc = straight_doc()
    doc["signals"] = [{"id": "sig", "kind": "traffic_light", "lane": "lane0",
                       "s": 50.0, "phase": [0.25, 0.15, 0.2]}]
    w = world_from(doc)
    assert w.signal_states["sig"] == "green"
    for _ in range(3):  # t = 0.3 -> yellow
        tick(w)
    assert w.signal_states["sig"] == "yellow"
    tick(w)  # t = 0.4 -> red
    assert w.signal_states["sig"] == "red"
    for _ in range(2):  # t = 0.6 -> wrapped to green
        tick(w)
    assert w.signal_states["sig"] == "green"


def test_stop_sign_honored_when_halted_nearby():
    doc = straight_doc()
    doc["signals"] = [{"id": "stop_a", "kind": "stop_sign", "lane": "lane0", "s": 50.0}]
    w = world_from(doc)
    actor = put_vehicle(w, "v", 48.5, 0.0, speed=0.05)
    tick(w, {"v": (0.0, 0.0)})
    assert "stop_a" in actor.honored_signs
    # a fast pass-through never honors
    w2 = world_from(doc)
    fast = put_vehicle(w2, "u", 48.5, 0.0, speed=5.0)
    tick(w2, {"u": (0.0, 0.0)})
    assert fast.honored_signs == set()


def test_autopilot_tracks_target_speed():
    w = world_from(straight_doc(length=500.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    for _ in range(100):
        tick(w)
        actor.route.advance(actor.pose.position.x, actor.pose.position.y)
    assert actor.speed == pytest.approx(3.0, abs=0.2)
    assert abs(actor.pose.position.y) < 0.3


def test_autopilot_throttle_is_proportional():
    w = world_from(straight_doc(length=500.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0, speed=0.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    throttle, steer = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle == pytest.approx(1.0)  # 0.5 * (3 - 0) clamped
    assert steer == pytest.approx(0.0, abs=1e-9)


def test_autopilot_brakes_behind_leader():
    w = world_from(straight_doc(length=500.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    put_vehicle(w, "lead", 13.0, 0.0, speed=0.0)
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle == -1.0
    # same blocker far ahead is ignored
    w.actors["lead"].pose = Pose((100.0, 0.0), 0.0)
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle > 0 or throttle == pytest.approx(0.0)


def test_autopilot_ignores_offset_lane_vehicle():
    w = world_from(straight_doc(length=500.0, n_lanes=2, spacing=4.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    put_vehicle(w, "side", 13.0, 4.0, speed=0.0)  # next lane over
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle > -1.0


def test_aggressive_autopilot_never_brakes_for_leader():
    w = world_from(straight_doc(length=500.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0,
                                                  aggression="aggressive"))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    put_vehicle(w, "lead", 13.0, 0.0, speed=0.0)
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle == pytest.approx(0.0)  # holding target speed, not braking


def test_autopilot_brakes_for_red_light():
    doc = straight_doc(length=200.0)
    doc["signals"] = [{"id": "sig", "kind": "traffic_light", "lane": "lane0",
                       "s": 60.0, "phase": [0.5, 0.5, 1000.0]}]
    w = world_from(doc)
    for _ in range(10):  # advance the clock into the red window
        tick(w)
    assert w.signal_states["sig"] == "red"
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=58.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 58.0)
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle == -1.0


def test_autopilot_rolls_through_green():
    doc = straight_doc(length=200.0)
    doc["signals"] = [{"id": "sig", "kind": "traffic_light", "lane": "lane0",
                       "s": 60.0, "phase": [1000.0, 0.5, 0.5]}]
    w = world_from(doc)
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=57.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 57.0)
    throttle, _ = autopilot_control(w, vid, w.actors[vid].autopilot)
    assert throttle > -1.0


def test_autopilot_stops_then_proceeds_at_stop_sign():
    doc = straight_doc(length=300.0)
    doc["signals"] = [{"id": "stop_a", "kind": "stop_sign", "lane": "lane0", "s": 60.0}]
    w = world_from(doc)
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=30.0, speed=3.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig(target_speed=3.0))
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 30.0)
    stopped_near_sign = False
    for _ in range(400):
        tick(w)
        actor.route.advance(actor.pose.position.x, actor.pose.position.y)
        x = actor.pose.position.x
        if abs(actor.speed) < 0.1 and abs(x - 60.0) <= 3.0:
            stopped_near_sign = True
        if x > 70.0:
            break
    assert stopped_near_sign
    assert "stop_a" in actor.honored_signs
    assert actor.pose.position.x > 70.0  # proceeded after honoring


def test_autopilot_control_requires_route():
    w = world_from(straight_doc())
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig())
    with pytest.raises(WorldError):
        autopilot_control(w, vid, w.actors[vid].autopilot)


def test_external_control_conflicts_with_autopilot():
    w = world_from(straight_doc(length=500.0))
    vid = spawn_vehicle(w, SpawnSpec(lane="lane0", offset=5.0,
                                     controller="autopilot"),
                        autopilot=AutopilotConfig())
    from drive2d.routing import PlannerSpec
    actor = w.actors[vid]
    actor.route = PlannerSpec(kind="fixed_path", lanes=("lane0",)).build(
        w.map, w.rng).init_route("lane0", 5.0)
    with pytest.raises(WorldError):
        tick(w, {vid: (1.0, 0.0)})
