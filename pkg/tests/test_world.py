import math
import random

import pytest

from safeguardpf import (
    ConvexPolygon,
    Disc,
    Mode,
    Obstacle,
    Pose,
    Pursuit,
    RobotState,
    Scripted,
    Static,
    Teleop,
    Vec2,
    WorldState,
    closest_obstacle_point,
    step_obstacles,
)
from safeguardpf.world import closest_surface_point, min_clearance

from .test_safety import BENCH


SQUARE = ConvexPolygon((-1.0, 1.0, 1.0, -1.0), (-1.0, -1.0, 1.0, 1.0))


def make_world(robots, obstacles, radii=None, time=0.0):
    if radii is None:
        radii = tuple(0.0 for _ in robots)
    return WorldState(time=time, robots=tuple(robots), obstacles=tuple(obstacles), robot_radii=tuple(radii))


def robot_at(x, y, theta=0.0, v=0.0, omega=0.0):
    return RobotState(pose=Pose(Vec2(x, y), theta), v=v, omega=omega, mode=Mode.BRAKE)


def test_square_closest_point_example():
    # robot at (3, 0) with body radius 0.5 against the unit square
    world = make_world([robot_at(3.0, 0.0)], [Obstacle(SQUARE, Static(), 0.0)], radii=(0.5,))
    p = BENCH
    import dataclasses

    p = dataclasses.replace(p, radius=0.5)
    per = closest_obstacle_point(world, 0, p)
    assert per.clearance == pytest.approx(1.5)
    assert per.away_bearing == pytest.approx(0.0, abs=1e-12)


def test_boundary_contact_clearance_zero():
    world = make_world([robot_at(1.0, 0.0)], [Obstacle(SQUARE, Static(), 0.0)])
    per = closest_obstacle_point(world, 0, BENCH)
    assert per.clearance == 0.0
    # fallback direction points away from the square's interior
    assert per.away_bearing == pytest.approx(0.0, abs=1e-12)


def test_nearest_obstacle_wins_ties_by_index():
    near = Obstacle(Disc(0.0, 2.0, 0.5), Static(), 0.0)
    far = Obstacle(Disc(0.0, -5.0, 0.5), Static(), 0.0)
    world = make_world([robot_at(0.0, 0.0)], [near, far])
    per = closest_obstacle_point(world, 0, BENCH)
    assert per.clearance == pytest.approx(1.5)
    assert per.away_bearing == pytest.approx(-math.pi / 2)

    # exact tie: two discs mirrored about the robot; the first one binds
    a = Obstacle(Disc(0.0, 2.0, 0.5), Static(), 0.0)
    b = Obstacle(Disc(0.0, -2.0, 0.5), Static(), 0.0)
    world = make_world([robot_at(0.0, 0.0)], [a, b])
    per = closest_obstacle_point(world, 0, BENCH)
    assert per.away_bearing == pytest.approx(-math.pi / 2)


def test_other_robots_are_disc_obstacles():
    world = make_world(
        [robot_at(0.0, 0.0), robot_at(3.0, 0.0)],
        [],
        radii=(0.25, 0.25),
    )
    import dataclasses

    p = dataclasses.replace(BENCH, radius=0.25)
    per = closest_obstacle_point(world, 0, p)
    assert per.clearance == pytest.approx(3.0 - 0.25 - 0.25)
    assert per.away_bearing == pytest.approx(math.pi)


def test_no_obstacles_reports_unbounded_clearance():
    world = make_world([robot_at(0.0, 0.0)], [])
    per = closest_obstacle_point(world, 0, BENCH, goal=Vec2(1.0, 0.0))
    assert math.isinf(per.clearance)
    assert per.away_bearing is None
    assert per.goal_bearing == pytest.approx(0.0, abs=1e-12)


def test_max_range_sensor_option():
    world = make_world([robot_at(0.0, 0.0)], [Obstacle(Disc(10.0, 0.0, 1.0), Static(), 0.0)])
    per = closest_obstacle_point(world, 0, BENCH, max_range=5.0)
    assert math.isinf(per.clearance)
    per = closest_obstacle_point(world, 0, BENCH, max_range=20.0)
    assert per.clearance == pytest.approx(9.0)


def test_goal_bearing_and_coincident_goal():
    world = make_world([robot_at(1.0, 1.0)], [])
    per = closest_obstacle_point(world, 0, BENCH, goal=Vec2(1.0, 5.0))
    assert per.goal_bearing == pytest.approx(math.pi / 2)
    per = closest_obstacle_point(world, 0, BENCH, goal=Vec2(1.0, 1.0))
    assert per.goal_bearing is None


def test_sensor_translation_symmetry():
    rng = random.Random(11)
    for _ in range(50):
        ox, oy = rng.uniform(-5, 5), rng.uniform(-5, 5)
        rx, ry = rng.uniform(-5, 5), rng.uniform(-5, 5)
        if math.hypot(rx - ox, ry - oy) < 1.2:
            continue
        tx, ty = rng.uniform(-100, 100), rng.uniform(-100, 100)
        gx, gy = rng.uniform(-5, 5), rng.uniform(-5, 5)
        w1 = make_world([robot_at(rx, ry)], [Obstacle(Disc(ox, oy, 1.0), Static(), 0.0)])
        w2 = make_world(
            [robot_at(rx + tx, ry + ty)], [Obstacle(Disc(ox + tx, oy + ty, 1.0), Static(), 0.0)]
        )
        p1 = closest_obstacle_point(w1, 0, BENCH, goal=Vec2(gx, gy))
        p2 = closest_obstacle_point(w2, 0, BENCH, goal=Vec2(gx + tx, gy + ty))
        assert p1.clearance == pytest.approx(p2.clearance, abs=1e-9)
        assert p1.away_bearing == pytest.approx(p2.away_bearing, abs=1e-9)
        assert p1.goal_bearing == pytest.approx(p2.goal_bearing, abs=1e-9)


def test_distance_against_dense_sampling_oracle():
    rng = random.Random(42)
    shapes = [
        Disc(0.5, -0.25, 1.3),
        SQUARE,
        ConvexPolygon((0.0, 2.0, 3.0, 1.0, -0.5), (0.0, -0.5, 1.0, 2.5, 1.5)),
    ]

    def boundary_points(shape, n=20000):
        pts = []
        if isinstance(shape, Disc):
            for i in range(n):
                a = 2 * math.pi * i / n
                pts.append((shape.cx + shape.radius * math.cos(a), shape.cy + shape.radius * math.sin(a)))
        else:
            m = len(shape.xs)
            per_edge = n // m
            for i in range(m):
                j = (i + 1) % m
                for k in range(per_edge):
                    t = k / per_edge
                    pts.append(
                        (
                            shape.xs[i] + t * (shape.xs[j] - shape.xs[i]),
                            shape.ys[i] + t * (shape.ys[j] - shape.ys[i]),
                        )
                    )
        return pts

    for shape in shapes:
        pts = boundary_points(shape)
        for _ in range(40):
            px, py = rng.uniform(-6, 6), rng.uniform(-6, 6)
            hit = closest_surface_point(shape, px, py)
            oracle = min(math.hypot(px - qx, py - qy) for qx, qy in pts)
            assert abs(abs(hit.signed_distance) - oracle) < 1e-6
            # the returned surface point realizes the distance
            assert math.hypot(px - hit.qx, py - hit.qy) == pytest.approx(abs(hit.signed_distance), abs=1e-9)


def test_static_obstacle_unchanged():
    obs = Obstacle(SQUARE, Static(), 0.0)
    world = make_world([robot_at(5.0, 5.0)], [obs])
    out = step_obstacles(world, 0.5)
    assert out.obstacles[0].shape is obs.shape
    assert out.time == 0.5


def test_pursuit_heads_straight_at_target():
    obs = Obstacle(Disc(0.0, 0.0, 0.3), Pursuit(target=0, speed=0.75), 0.75)
    world = make_world([robot_at(10.0, 0.0)], [obs])
    out = step_obstacles(world, 1.0)
    assert out.obstacles[0].shape.cx == pytest.approx(0.75)
    assert out.obstacles[0].shape.cy == pytest.approx(0.0)

    # never overshoots the target point
    near = make_world([robot_at(0.1, 0.0)], [obs])
    out = step_obstacles(near, 1.0)
    assert out.obstacles[0].shape.cx == pytest.approx(0.1)


def test_teleop_clamped_to_speed_limit():
    obs = Obstacle(Disc(0.0, 0.0, 0.3), Teleop(channel="h1"), 0.75)
    world = make_world([robot_at(5.0, 5.0)], [obs])
    out = step_obstacles(world, 1.0, {"h1": (1.5, 0.0)})
    assert out.obstacles[0].shape.cx == pytest.approx(0.75)
    # no command: holds position
    out2 = step_obstacles(world, 1.0)
    assert out2.obstacles[0].shape.cx == 0.0


def test_scripted_path_following_and_stop_at_end():
    motion = Scripted(waypoints=(Vec2(1.0, 0.0), Vec2(1.0, 1.0)), speeds=(0.5, 0.5))
    obs = Obstacle(Disc(0.0, 0.0, 0.2), motion, 0.75)
    world = make_world([robot_at(5.0, 5.0)], [obs])
    # 2 s to the first waypoint, 2 s up; waypoint crossing inside one step
    out = step_obstacles(world, 3.0)
    assert out.obstacles[0].shape.cx == pytest.approx(1.0)
    assert out.obstacles[0].shape.cy == pytest.approx(0.5)
    out = step_obstacles(out, 10.0)
    assert out.obstacles[0].shape.cy == pytest.approx(1.0)
    # parked at the path end forever after
    out2 = step_obstacles(out, 5.0)
    assert out2.obstacles[0].shape.cx == pytest.approx(1.0)
    assert out2.obstacles[0].shape.cy == pytest.approx(1.0)


def test_obstacle_speed_invariant():
    rng = random.Random(3)
    motion = Scripted(
        waypoints=tuple(Vec2(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(4)),
        speeds=(0.7, 0.3, 0.75, 0.5),
    )
    obstacles = [
        Obstacle(Disc(0.0, 0.0, 0.2), motion, 0.75),
        Obstacle(Disc(5.0, 5.0, 0.2), Pursuit(target=0, speed=0.75), 0.75),
        Obstacle(Disc(2.0, 2.0, 0.2), Teleop(channel="h1"), 0.75),
    ]
    world = make_world([robot_at(1.0, 4.0)], obstacles)
    for k in range(200):
        dt = rng.uniform(0.001, 0.05)
        cmd = {"h1": (rng.uniform(-3, 3), rng.uniform(-3, 3))}
        out = step_obstacles(world, dt, cmd)
        for before, after in zip(world.obstacles, out.obstacles):
            bx, by = before.shape.reference
            ax, ay = after.shape.reference
            assert math.hypot(ax - bx, ay - by) <= before.speed_limit * dt + 1e-12
        world = out


def test_min_clearance_matches_sensor():
    world = make_world(
        [robot_at(3.0, 0.0), robot_at(-4.0, 0.0)],
        [Obstacle(SQUARE, Static(), 0.0)],
        radii=(0.5, 0.5),
    )
    import dataclasses

    p = dataclasses.replace(BENCH, radius=0.5)
    per = closest_obstacle_point(world, 0, p)
    assert min_clearance(world, 0) == pytest.approx(per.clearance)
    # penetration goes negative
    inside = make_world([robot_at(0.5, 0.0)], [Obstacle(SQUARE, Static(), 0.0)], radii=(0.1,))
    assert min_clearance(inside, 0) < 0


def test_polygon_validation():
    with pytest.raises(ValueError):
        ConvexPolygon((0.0, 1.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        ConvexPolygon((0.0, 1.0, 2.0), (0.0, 1.0, 2.0))  # collinear
    with pytest.raises(ValueError):
        # non-convex chevron
        ConvexPolygon((0.0, 2.0, 1.0, 2.0, 0.0), (0.0, 0.0, 1.0, 2.0, 2.0))
    # clockwise input is normalized to counterclockwise
    cw = ConvexPolygon((0.0, 0.0, 1.0, 1.0), (0.0, 1.0, 1.0, 0.0))
    area2 = 0.0
    n = len(cw.xs)
    for i in range(n):
        j = (i + 1) % n
        area2 += cw.xs[i] * cw.ys[j] - cw.xs[j] * cw.ys[i]
    assert area2 > 0
