import math
import random

import pytest

from safeguardpf import (
    ClassicFieldParams,
    FieldGains,
    Perception,
    Rect,
    RobotParams,
    Vec2,
    attraction,
    classic_apf,
    repulsion,
    safe_speed_gradient,
    sample_field_grid,
    steering_rate,
    total_field,
    wrap_angle,
)
from safeguardpf.scenario import Scenario, Arena, RobotSpec
from safeguardpf.sim import SimConfig
from safeguardpf.verify import finite_diff_gradient
from safeguardpf.world import ConvexPolygon, Obstacle, Static
from safeguardpf.core import Pose

from .test_safety import BENCH, random_params

# Frozen from the central-finite-difference oracle at d=2, h=1e-6 with the
# benchmark params and k_rep = 1.
GRAD_D2 = 0.17846850641767276


def per(d=math.inf, alpha=None, beta=None, theta=0.0):
    return Perception(clearance=d, away_bearing=alpha, goal_bearing=beta, heading=theta)


def test_attraction_points_at_goal_with_constant_magnitude():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    f = attraction(per(beta=math.pi / 2), g)
    assert f.x == pytest.approx(0.0, abs=1e-12)
    assert f.y == pytest.approx(0.25)

    g2 = FieldGains(k_att=0.04, k_rep=1.0)
    f2 = attraction(per(beta=0.0), g2)
    assert (f2.x, f2.y) == (0.04, 0.0)


def test_attraction_zero_when_goal_reached():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    assert attraction(per(beta=None), g) == Vec2(0.0, 0.0)


def test_repulsion_magnitude_matches_finite_difference_oracle():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    f = repulsion(per(d=2.0, alpha=0.0), g, BENCH)
    assert f.y == pytest.approx(0.0, abs=1e-12)
    assert f.x == pytest.approx(GRAD_D2, rel=1e-6)
    assert f.x == pytest.approx(finite_diff_gradient(2.0, BENCH, 1e-6), rel=1e-6)


def test_repulsion_direction_and_tail():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    f = repulsion(per(d=2.0, alpha=math.pi / 2), g, BENCH)
    assert f.x == pytest.approx(0.0, abs=1e-12)
    assert f.y > 0
    far = repulsion(per(d=1e9, alpha=0.0), g, BENCH)
    assert far.norm() < 1e-4
    assert repulsion(per(d=math.inf, alpha=None), g, BENCH) == Vec2(0.0, 0.0)


def test_repulsion_strictly_decreasing_in_clearance():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    mags = [repulsion(per(d=d, alpha=0.0), g, BENCH).norm() for d in (0.0, 0.5, 1.0, 2.0, 5.0, 20.0)]
    assert all(a > b for a, b in zip(mags, mags[1:]))


def test_repulsion_grad_cap_clamps():
    capped = FieldGains(k_att=0.25, k_rep=1.0, grad_cap=0.05)
    f = repulsion(per(d=0.0, alpha=0.0), capped, BENCH)
    assert f.norm() == pytest.approx(0.05)


def test_total_field_is_vector_sum():
    g = FieldGains(k_att=0.25, k_rep=1.0)
    p = per(d=2.0, alpha=math.pi / 2, beta=0.0)
    f = total_field(p, g, BENCH)
    fa = attraction(p, g)
    fr = repulsion(p, g, BENCH)
    assert f == fa + fr
    # far from obstacles the total is essentially the attraction
    far = total_field(per(d=1e9, alpha=0.0, beta=0.0), g, BENCH)
    assert (far - fa).norm() < 1e-4


def test_gradient_fidelity_sampled():
    # The envelope clamps at zero where no speed is safe; the derivative is
    # only meaningful on the positive branch, so draws are filtered to it.
    from safeguardpf import max_safe_speed

    rng = random.Random(123)
    checked = 0
    while checked < 1000:
        p = random_params(rng)
        d = rng.uniform(0.0, 50.0)
        h = 1e-6 * max(1.0, d)
        if d - h < 0 or max_safe_speed(d - h, p) <= 0.0:
            continue
        analytic = safe_speed_gradient(d, p)
        fd = finite_diff_gradient(d, p, h)
        assert abs(analytic - fd) / analytic < 1e-6
        checked += 1


def test_steering_rate_examples():
    f = Vec2(0.3, 0.0)
    assert steering_rate(f, 0.0, BENCH) == 0.0

    strong = Vec2(0.0, 5.0)  # |F| * pi/2 far above the 2.0 rad/s bound
    assert steering_rate(strong, 0.0, BENCH) == BENCH.omega_max

    quarter = steering_rate(Vec2(0.0, 0.25), 0.0, BENCH)
    assert quarter == pytest.approx(0.25 * math.pi / 2)

    assert steering_rate(Vec2(0.0, 0.0), 1.0, BENCH) == 0.0


def test_steering_rate_odd_in_heading_error():
    rng = random.Random(5)
    for _ in range(100):
        mag = rng.uniform(0.01, 0.4)
        err = rng.uniform(-math.pi, math.pi)
        f_angle = rng.uniform(-math.pi, math.pi)
        f = Vec2(mag * math.cos(f_angle), mag * math.sin(f_angle))
        plus = steering_rate(f, wrap_angle(f_angle - err), BENCH)
        minus = steering_rate(f, wrap_angle(f_angle + err), BENCH)
        assert plus == pytest.approx(-minus, abs=1e-12)


def test_steering_rate_clamp_idempotent():
    f = Vec2(0.0, 10.0)
    w = steering_rate(f, 0.0, BENCH)
    assert abs(w) <= BENCH.omega_max
    assert max(-BENCH.omega_max, min(BENCH.omega_max, w)) == w


def test_heading_convergence_pins_sign_convention():
    # No obstacles, fixed goal: iterating theta' = omega* must shrink the
    # heading error monotonically below 1e-3 rad.
    g = FieldGains(k_att=0.25, k_rep=1.0)
    beta = 0.4
    dt = 0.1
    for theta0 in (-3.0, -1.5, 0.9, 2.8, math.pi):
        theta = theta0
        err = abs(wrap_angle(beta - theta))
        steps = 0
        while err > 1e-3:
            w = steering_rate(attraction(per(beta=beta), g), theta, BENCH)
            theta = wrap_angle(theta + w * dt)
            new_err = abs(wrap_angle(beta - theta))
            assert new_err < err + 1e-15
            err = new_err
            steps += 1
            assert steps < 10000
        assert err <= 1e-3


def test_classic_apf_cases():
    cp = ClassicFieldParams(eta=1.0, rho0=2.0, k_att=0.5)
    robot, goal = Vec2(0.0, 0.0), Vec2(4.0, 0.0)
    outward = Vec2(0.0, 1.0)

    # outside the influence radius only the goal pull remains
    f = classic_apf(robot, goal, 3.0, outward, cp)
    assert f == Vec2(2.0, 0.0)

    # continuous at the boundary
    f_at = classic_apf(robot, goal, 2.0, outward, cp)
    assert f_at == Vec2(2.0, 0.0)
    f_in = classic_apf(robot, goal, 2.0 - 1e-9, outward, cp)
    assert (f_in - f_at).norm() < 1e-6

    # at the goal the attraction vanishes
    f_goal = classic_apf(goal, goal, 3.0, outward, cp)
    assert f_goal == Vec2(0.0, 0.0)

    # repulsion grows without bound approaching contact
    near = classic_apf(robot, goal, 1e-3, outward, cp)
    assert near.y > 1e5

    with pytest.raises(ValueError):
        classic_apf(robot, goal, 0.0, outward, cp)


def _square_scenario():
    square = ConvexPolygon((-1.0, 1.0, 1.0, -1.0), (-1.0, -1.0, 1.0, 1.0))
    from safeguardpf.scenario import PIONEER_PARAMS

    robot = RobotSpec(
        spawn=Pose(Vec2(-8.0, -8.0), 0.0),
        params=PIONEER_PARAMS,
        gains=FieldGains(k_att=0.25, k_rep=1.0, grad_cap=1.0),
        waypoints=(Vec2(0.0, 5.0),),
    )
    return Scenario(
        arena=Arena(width=20.0, height=20.0, origin_x=-10.0, origin_y=-10.0),
        robots=[robot],
        obstacles=[Obstacle(shape=square, motion=Static(), speed_limit=0.0)],
        sim=SimConfig(duration=10.0, substep=0.005),
    )


def test_sample_field_grid_repulsion_points_outward():
    scn = _square_scenario()
    grid = sample_field_grid(
        Rect(-3.0, 3.0, -3.0, 3.0), 1.0, scn, scn.robots[0].gains, scn.robots[0].params,
        mode="repulsion",
    )
    assert grid.nx == 7 and grid.ny == 7
    saw_invalid = False
    for c in grid.cells:
        if not c.valid:
            saw_invalid = True
            continue
        hit_dx = c.x - max(-1.0, min(1.0, c.x))
        hit_dy = c.y - max(-1.0, min(1.0, c.y))
        assert c.force.x * hit_dx + c.force.y * hit_dy > 0.0
    assert saw_invalid  # cells inside the square are flagged


def test_sample_field_grid_single_cell_and_errors():
    scn = _square_scenario()
    g, p = scn.robots[0].gains, scn.robots[0].params
    grid = sample_field_grid(Rect(5.0, 5.0, 5.0, 5.0), 0.5, scn, g, p)
    assert grid.nx == grid.ny == 1
    with pytest.raises(ValueError):
        sample_field_grid(Rect(0.0, 1.0, 0.0, 1.0), 0.0, scn, g, p)
    with pytest.raises(ValueError):
        Rect(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        sample_field_grid(Rect(0.0, 1.0, 0.0, 1.0), 0.5, scn, g, p, mode="bogus")
