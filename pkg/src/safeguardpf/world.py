"""Obstacle models, multi-body world snapshots, and the idealized sensor.

Shapes are discs and convex polygons; moving shapes translate without
rotating.  The sensor is 360-degree and noise-free: it reports the closest
point over every obstacle surface and every other robot's disc, with the
robot's own body radius subtracted.  World snapshots are immutable; stepping
produces new ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .core import Pose, RobotParams, Vec2, angle_of
from .field import Perception
from .safety import Mode


# ---------------------------------------------------------------------------
# Shapes

@dataclass(frozen=True, slots=True)
class Disc:
    cx: float
    cy: float
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("disc radius must be > 0")

    def translated(self, dx: float, dy: float) -> "Disc":
        return Disc(self.cx + dx, self.cy + dy, self.radius)

    @property
    def reference(self) -> tuple[float, float]:
        return (self.cx, self.cy)


@dataclass(frozen=True, slots=True)
class ConvexPolygon:
    """Counterclockwise convex polygon; constructor normalizes orientation."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.xs)
        if n < 3 or len(self.ys) != n:
            raise ValueError("polygon needs at least 3 matched vertices")
        area2 = 0.0
        for i in range(n):
            j = (i + 1) % n
            area2 += self.xs[i] * self.ys[j] - self.xs[j] * self.ys[i]
        if abs(area2) < 1e-12:
            raise ValueError("degenerate polygon")
        if area2 < 0:
            object.__setattr__(self, "xs", tuple(reversed(self.xs)))
            object.__setattr__(self, "ys", tuple(reversed(self.ys)))
        for i in range(n):
            j = (i + 1) % n
            k = (i + 2) % n
            cross = (self.xs[j] - self.xs[i]) * (self.ys[k] - self.ys[j]) - (
                self.ys[j] - self.ys[i]
            ) * (self.xs[k] - self.xs[j])
            if cross < -1e-12:
                raise ValueError("polygon must be convex")

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon(tuple(x + dx for x in self.xs), tuple(y + dy for y in self.ys))

    @property
    def reference(self) -> tuple[float, float]:
        n = len(self.xs)
        return (sum(self.xs) / n, sum(self.ys) / n)


Shape = Disc | ConvexPolygon


@dataclass(frozen=True, slots=True)
class SurfaceHit:
    """Closest point on a shape's surface, with penetration sign.

    signed_distance is negative when the query point is inside the shape;
    (qx, qy) is the closest surface point either way.
    """

    signed_distance: float
    qx: float
    qy: float


def closest_surface_point(shape: Shape, px: float, py: float) -> SurfaceHit:
    if isinstance(shape, Disc):
        dx = px - shape.cx
        dy = py - shape.cy
        dist = math.hypot(dx, dy)
        if dist == 0.0:
            return SurfaceHit(-shape.radius, shape.cx + shape.radius, shape.cy)
        scale = shape.radius / dist
        return SurfaceHit(dist - shape.radius, shape.cx + dx * scale, shape.cy + dy * scale)
    xs, ys = shape.xs, shape.ys
    n = len(xs)
    inside = True
    best_d2 = math.inf
    bx = by = 0.0
    for i in range(n):
        j = (i + 1) % n
        ax, ay = xs[i], ys[i]
        ex, ey = xs[j] - ax, ys[j] - ay
        rx, ry = px - ax, py - ay
        if ex * ry - ey * rx < 0.0:
            inside = False
        seg2 = ex * ex + ey * ey
        t = (rx * ex + ry * ey) / seg2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx = ax + t * ex
        qy = ay + t * ey
        d2 = (px - qx) ** 2 + (py - qy) ** 2
        if d2 < best_d2:
            best_d2 = d2
            bx, by = qx, qy
    dist = math.sqrt(best_d2)
    return SurfaceHit(-dist if inside else dist, bx, by)


# ---------------------------------------------------------------------------
# Obstacles and their motion models

@dataclass(frozen=True, slots=True)
class Static:
    pass


@dataclass(frozen=True, slots=True)
class Scripted:
    """Visit waypoints in order at per-leg speeds, starting from the current
    position; stops at the last waypoint.  leg/progress track the live state."""

    waypoints: tuple[Vec2, ...]
    speeds: tuple[float, ...]
    leg: int = 0

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("scripted motion needs at least one waypoint")
        if len(self.speeds) != len(self.waypoints):
            raise ValueError("need one speed per waypoint leg")
        if any(s <= 0 for s in self.speeds):
            raise ValueError("scripted speeds must be > 0")


@dataclass(frozen=True, slots=True)
class Pursuit:
    target: int
    speed: float

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ValueError("pursuit speed must be > 0")


@dataclass(frozen=True, slots=True)
class Teleop:
    channel: str

    def __post_init__(self) -> None:
        if not self.channel:
            raise ValueError("teleop channel must be non-empty")


Motion = Static | Scripted | Pursuit | Teleop


@dataclass(frozen=True, slots=True)
class Obstacle:
    shape: Shape
    motion: Motion
    speed_limit: float
    static_trusted: bool = False

    def __post_init__(self) -> None:
        if self.speed_limit < 0:
            raise ValueError("speed_limit must be >= 0")


@dataclass(frozen=True, slots=True)
class RobotState:
    pose: Pose
    v: float
    omega: float
    mode: Mode

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValueError("speed must be >= 0")


@dataclass(frozen=True, slots=True)
class WorldState:
    """Immutable snapshot: simulation clock, robot states and bodies, obstacles."""

    time: float
    robots: tuple[RobotState, ...]
    obstacles: tuple[Obstacle, ...]
    robot_radii: tuple[float, ...]


NO_OBSTACLE = math.inf


def closest_obstacle_point(
    world: WorldState,
    robot_index: int,
    p: RobotParams,
    goal: Vec2 | None = None,
    max_range: float = math.inf,
) -> Perception:
    """Sense the closest obstacle point for one robot.

    Other robots count as disc obstacles.  Nearness is judged by signed
    distance so a penetrated surface always binds; ties go to the lower
    obstacle index, with robots ordered after obstacles.  Beyond max_range
    the sensor reports an unbounded clearance.
    """
    me = world.robots[robot_index]
    px, py = me.pose.position.x, me.pose.position.y
    best_sd = math.inf
    best_hit: SurfaceHit | None = None
    best_ref: tuple[float, float] | None = None
    best_trusted = False
    for obs in world.obstacles:
        hit = closest_surface_point(obs.shape, px, py)
        if hit.signed_distance < best_sd:
            best_sd = hit.signed_distance
            best_hit = hit
            best_ref = obs.shape.reference
            best_trusted = obs.static_trusted
    for j, other in enumerate(world.robots):
        if j == robot_index:
            continue
        body = Disc(other.pose.position.x, other.pose.position.y, world.robot_radii[j])
        hit = closest_surface_point(body, px, py)
        if hit.signed_distance < best_sd:
            best_sd = hit.signed_distance
            best_hit = hit
            best_ref = body.reference
            best_trusted = False

    goal_bearing = None
    if goal is not None and (goal.x != px or goal.y != py):
        goal_bearing = angle_of(Vec2(goal.x - px, goal.y - py))

    if best_hit is None or best_sd - p.radius > max_range:
        return Perception(
            clearance=NO_OBSTACLE,
            away_bearing=None,
            goal_bearing=goal_bearing,
            heading=me.pose.heading,
            stamp=world.time,
        )
    dx, dy = px - best_hit.qx, py - best_hit.qy
    if dx == 0.0 and dy == 0.0:
        # Robot center exactly on the surface: fall back to the outward
        # direction from the shape's reference point.
        rx, ry = best_ref
        if px == rx and py == ry:
            away = 0.0
        else:
            away = angle_of(Vec2(px - rx, py - ry))
    else:
        away = math.atan2(dy, dx)
        if away == -math.pi:
            away = math.pi
    return Perception(
        clearance=max(0.0, best_sd - p.radius),
        away_bearing=away,
        goal_bearing=goal_bearing,
        heading=me.pose.heading,
        stamp=world.time,
        trusted_static=best_trusted,
    )


def min_clearance(world: WorldState, robot_index: int) -> float:
    """Smallest surface separation for one robot, negative when penetrating.

    Cheap helper for the collision monitor: no bearings, no goal.
    """
    me = world.robots[robot_index]
    px, py = me.pose.position.x, me.pose.position.y
    radius = world.robot_radii[robot_index]
    best = math.inf
    for obs in world.obstacles:
        sd = closest_surface_point(obs.shape, px, py).signed_distance
        if sd < best:
            best = sd
    for j, other in enumerate(world.robots):
        if j == robot_index:
            continue
        sd = (
            math.hypot(other.pose.position.x - px, other.pose.position.y - py)
            - world.robot_radii[j]
        )
        if sd < best:
            best = sd
    return best - radius


def _clamped_velocity(vx: float, vy: float, limit: float) -> tuple[float, float]:
    speed = math.hypot(vx, vy)
    if speed <= limit or speed == 0.0:
        return vx, vy
    scale = limit / speed
    return vx * scale, vy * scale


def _advance_scripted(obs: Obstacle, dt: float) -> Obstacle:
    motion: Scripted = obs.motion  # type: ignore[assignment]
    shape = obs.shape
    leg = motion.leg
    x, y = shape.reference
    remaining = dt
    while remaining > 1e-15 and leg < len(motion.waypoints):
        wp = motion.waypoints[leg]
        speed = min(motion.speeds[leg], obs.speed_limit)
        gap = math.hypot(wp.x - x, wp.y - y)
        if gap <= 1e-12:
            leg += 1
            continue
        step = speed * remaining
        if step >= gap:
            x, y = wp.x, wp.y
            remaining -= gap / speed
            leg += 1
        else:
            x += (wp.x - x) / gap * step
            y += (wp.y - y) / gap * step
            remaining = 0.0
    ref = shape.reference
    new_shape = shape.translated(x - ref[0], y - ref[1])
    return replace(obs, shape=new_shape, motion=replace(motion, leg=leg))


def step_obstacles(
    world: WorldState,
    dt: float,
    teleop_inputs: dict[str, tuple[float, float]] | None = None,
) -> WorldState:
    """Advance every obstacle by dt; robots are untouched.

    Pursuit obstacles head straight at their target's current position and
    never overshoot it; teleop obstacles apply the latest commanded velocity
    clamped to their speed limit.  No obstacle moves farther than
    speed_limit * dt.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    teleop_inputs = teleop_inputs or {}
    new_obstacles = []
    for obs in world.obstacles:
        m = obs.motion
        if isinstance(m, Static):
            new_obstacles.append(obs)
        elif isinstance(m, Scripted):
            new_obstacles.append(_advance_scripted(obs, dt))
        elif isinstance(m, Pursuit):
            target = world.robots[m.target].pose.position
            rx, ry = obs.shape.reference
            gap = math.hypot(target.x - rx, target.y - ry)
            speed = min(m.speed, obs.speed_limit)
            step = min(speed * dt, gap)
            if gap > 0.0:
                new_obstacles.append(
                    replace(obs, shape=obs.shape.translated((target.x - rx) / gap * step, (target.y - ry) / gap * step))
                )
            else:
                new_obstacles.append(obs)
        elif isinstance(m, Teleop):
            vx, vy = teleop_inputs.get(m.channel, (0.0, 0.0))
            vx, vy = _clamped_velocity(vx, vy, obs.speed_limit)
            new_obstacles.append(replace(obs, shape=obs.shape.translated(vx * dt, vy * dt)))
        else:  # pragma: no cover - exhaustive
            raise TypeError(f"unknown motion {m!r}")
    return replace(world, time=world.time + dt, obstacles=tuple(new_obstacles))
