"""Potential fields and the steering law derived from them.

Attraction is a constant-magnitude pull toward the active goal.  Repulsion
pushes away from the closest obstacle point along the gradient of the safe
speed envelope, so following the combined field turns the robot toward
directions where it may drive faster.  A textbook inverse-distance field is
included as a baseline for comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .core import FieldGains, RobotParams, Vec2, angle_of, wrap_angle
from .safety import SQRT2

ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class Perception:
    """One sensor snapshot relative to the closest obstacle point and active goal.

    clearance      -- surface-to-surface distance to the closest obstacle point
                      (robot radius already subtracted); +inf when nothing sensed
    away_bearing   -- direction from the obstacle point toward the robot, or
                      None when nothing is sensed
    goal_bearing   -- direction from the robot toward the active goal, or None
                      when the goal is reached/undefined
    heading        -- current robot heading
    stamp          -- sensing time, used to reject stale snapshots
    trusted_static -- binding obstacle is flagged as genuinely immobile
    """

    clearance: float
    away_bearing: float | None
    goal_bearing: float | None
    heading: float
    stamp: float | None = None
    trusted_static: bool = False


def safe_speed_gradient(clearance: float, p: RobotParams) -> float:
    """Exact derivative of the speed envelope with respect to clearance.

    Equals (1/sqrt(2)) / sqrt((A/b + 1)*eps^2 + V^2/b^2 + sqrt(2)*d/b);
    finite even at zero clearance, decreasing toward zero far away.
    """
    ratio = p.accel_max / p.brake_decel + 1.0
    radicand = (
        ratio * p.cycle_max * p.cycle_max
        + (p.obstacle_vmax / p.brake_decel) ** 2
        + SQRT2 * clearance / p.brake_decel
    )
    return (1.0 / SQRT2) / math.sqrt(radicand)


def attraction(per: Perception, g: FieldGains) -> Vec2:
    """Constant-magnitude pull toward the goal; zero when the goal is reached."""
    if per.goal_bearing is None:
        return ZERO
    return Vec2(g.k_att * math.cos(per.goal_bearing), g.k_att * math.sin(per.goal_bearing))


def repulsion(per: Perception, g: FieldGains, p: RobotParams) -> Vec2:
    """Push away from the closest obstacle point, scaled by the envelope gradient."""
    if per.away_bearing is None or math.isinf(per.clearance):
        return ZERO
    grad = safe_speed_gradient(max(0.0, per.clearance), p)
    if g.grad_cap is not None:
        grad = min(grad, g.grad_cap)
    mag = g.k_rep * grad
    return Vec2(mag * math.cos(per.away_bearing), mag * math.sin(per.away_bearing))


def total_field(per: Perception, g: FieldGains, p: RobotParams) -> Vec2:
    return attraction(per, g) + repulsion(per, g, p)


def steering_rate(force: Vec2, heading: float, p: RobotParams) -> float:
    """Turn-rate command: field magnitude times the heading error, clamped.

    The error is taken the short way around so the robot turns toward the
    field direction; a vanishing field leaves the heading alone.
    """
    if force.x == 0.0 and force.y == 0.0:
        return 0.0
    raw = force.norm() * wrap_angle(angle_of(force) - heading)
    return max(-p.omega_max, min(p.omega_max, raw))


@dataclass(frozen=True, slots=True)
class ClassicFieldParams:
    """Gains of the textbook inverse-distance field."""

    eta: float
    rho0: float
    k_att: float

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if self.rho0 <= 0:
            raise ValueError("rho0 must be > 0")


def classic_apf(robot: Vec2, goal: Vec2, rho: float, obstacle_dir: Vec2, cp: ClassicFieldParams) -> Vec2:
    """Baseline gradient force: linear pull to the goal plus inverse-distance push.

    rho is the distance to the nearest obstacle and obstacle_dir points from
    it toward the robot.  Repulsion cuts off continuously at the influence
    radius and diverges at contact, hence the singularity guard.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0 (field is singular at contact)")
    force = Vec2(cp.k_att * (goal.x - robot.x), cp.k_att * (goal.y - robot.y))
    if rho <= cp.rho0:
        if obstacle_dir.x == 0.0 and obstacle_dir.y == 0.0:
            raise ValueError("obstacle direction undefined inside influence radius")
        u = obstacle_dir.unit()
        mag = cp.eta * (1.0 / rho - 1.0 / cp.rho0) / (rho * rho)
        force = force + Vec2(mag * u.x, mag * u.y)
    return force


@dataclass(frozen=True, slots=True)
class Rect:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("empty region")


@dataclass(frozen=True, slots=True)
class FieldCell:
    x: float
    y: float
    force: Vec2
    valid: bool
    clearance: float


@dataclass(frozen=True, slots=True)
class FieldGrid:
    cells: tuple[FieldCell, ...]
    nx: int
    ny: int


def sample_field_grid(
    region: Rect,
    resolution: float,
    scenario,
    g: FieldGains,
    p: RobotParams,
    mode: str = "total",
) -> FieldGrid:
    """Sample the field on a regular grid of point probes (no body radius).

    Cells on or inside an obstacle are flagged invalid.  mode selects the
    repulsion-only field or the combined one; the goal is the first robot's
    first waypoint.  Rows iterate y outer, x inner.
    """
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    if mode not in ("repulsion", "total"):
        raise ValueError(f"unknown field mode {mode!r}")
    from .world import closest_surface_point

    goal = scenario.robots[0].waypoints[0] if scenario.robots else None
    nx = int(math.floor((region.x_max - region.x_min) / resolution + 1e-9)) + 1
    ny = int(math.floor((region.y_max - region.y_min) / resolution + 1e-9)) + 1
    cells = []
    for j in range(ny):
        y = region.y_min + j * resolution
        for i in range(nx):
            x = region.x_min + i * resolution
            best = None
            for obs in scenario.obstacles:
                hit = closest_surface_point(obs.shape, x, y)
                if best is None or hit.signed_distance < best.signed_distance:
                    best = hit
            if best is None:
                clearance, away = math.inf, None
            elif best.signed_distance <= 0.0:
                cells.append(FieldCell(x, y, ZERO, False, 0.0))
                continue
            else:
                clearance = best.signed_distance
                away = math.atan2(y - best.qy, x - best.qx)
            goal_bearing = None
            if goal is not None and (goal.x != x or goal.y != y):
                goal_bearing = angle_of(Vec2(goal.x - x, goal.y - y))
            per = Perception(clearance=clearance, away_bearing=away, goal_bearing=goal_bearing, heading=0.0)
            force = repulsion(per, g, p) if mode == "repulsion" else total_field(per, g, p)
            cells.append(FieldCell(x, y, force, True, clearance))
    return FieldGrid(cells=tuple(cells), nx=nx, ny=ny)


def write_field_csv(grid: FieldGrid, path: str) -> None:
    """CSV export: x, y, fx, fy at 9 significant digits; invalid cells as nan."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "fx", "fy"])
        for c in grid.cells:
            if c.valid:
                w.writerow([f"{c.x:.9g}", f"{c.y:.9g}", f"{c.force.x:.9g}", f"{c.force.y:.9g}"])
            else:
                w.writerow([f"{c.x:.9g}", f"{c.y:.9g}", "nan", "nan"])
