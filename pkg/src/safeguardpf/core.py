"""Planar geometry primitives, angle arithmetic, and shared parameter bundles.

All quantities are SI (meters, seconds, radians). Angles are normalized to
(-pi, pi] at module boundaries; heading differences must take the short way
around, so everything funnels through :func:`wrap_angle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi], congruent mod 2*pi."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.remainder(a, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


def angle_of(v: Vec2) -> float:
    """Bearing of a nonzero vector, atan2-style, in (-pi, pi]."""
    if v.x == 0.0 and v.y == 0.0:
        raise ValueError("bearing of the zero vector is undefined")
    a = math.atan2(v.y, v.x)
    if a == -math.pi:
        a = math.pi
    return a


@dataclass(frozen=True, slots=True)
class Vec2:
    """Point or displacement in the plane. Components must be finite."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"components must be finite, got ({self.x!r}, {self.y!r})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Vec2(self.x / n, self.y / n)


@dataclass(frozen=True, slots=True)
class Pose:
    """Position plus heading; heading kept in (-pi, pi]."""

    position: Vec2
    heading: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading):
            raise ValueError("heading must be finite")
        if not (-math.pi < self.heading <= math.pi):
            object.__setattr__(self, "heading", wrap_angle(self.heading))


@dataclass(frozen=True, slots=True)
class RobotParams:
    """Physical and contract constants of one robot.

    accel_max      -- largest forward acceleration the drive can command (m/s^2)
    brake_decel    -- braking deceleration, always available (m/s^2, > 0)
    omega_max      -- angular speed bound (rad/s)
    cycle_max      -- upper bound on the nondeterministic control period (s)
    obstacle_vmax  -- assumed top speed of any obstacle (m/s)
    speed_margin   -- precision margin subtracted from the speed envelope (m/s)
    radius         -- body radius; sensed distances are surface-to-surface (m)
    """

    accel_max: float
    brake_decel: float
    omega_max: float
    cycle_max: float
    obstacle_vmax: float
    speed_margin: float = 0.01
    radius: float = 0.0

    def __post_init__(self) -> None:
        if self.brake_decel <= 0:
            raise ValueError("brake_decel must be > 0")
        if self.accel_max < 0:
            raise ValueError("accel_max must be >= 0")
        if self.omega_max < 0:
            raise ValueError("omega_max must be >= 0")
        if self.cycle_max <= 0:
            raise ValueError("cycle_max must be > 0")
        if self.obstacle_vmax < 0:
            raise ValueError("obstacle_vmax must be >= 0")
        if self.speed_margin <= 0:
            raise ValueError("speed_margin must be > 0")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")


@dataclass(frozen=True, slots=True)
class FieldGains:
    """Attraction/repulsion gains, plus an optional cap on the repulsion gradient."""

    k_att: float
    k_rep: float
    grad_cap: float | None = None

    def __post_init__(self) -> None:
        if self.k_att <= 0:
            raise ValueError("k_att must be > 0")
        if self.k_rep <= 0:
            raise ValueError("k_rep must be > 0")
        if self.grad_cap is not None and self.grad_cap <= 0:
            raise ValueError("grad_cap must be > 0 when present")
