"""The certified velocity envelope.

A state is *safe* when the robot, committing to one more control cycle of
worst-case acceleration and then braking flat out, still stops before a
head-on obstacle closing at the assumed top speed can reach it.  The check
budgets the clearance with a 1/sqrt(2) factor to cover planar motion:

    d/sqrt(2) > v^2/(2b) + V*v/b + (A/b + 1) * (A*eps^2/2 + eps*(v + V))

Everything else here is closed-form consequences of that inequality: the
largest safe speed for a given clearance, the per-cycle desired speed, and
the two-mode Drive/Brake automaton that gates acceleration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import RobotParams

SQRT2 = math.sqrt(2.0)


class Mode(enum.Enum):
    """Drive admits any acceleration in [-brake_decel, accel_max]; Brake forces -brake_decel."""

    DRIVE = "Drive"
    BRAKE = "Brake"


@dataclass(frozen=True, slots=True)
class SafetyInput:
    """Current speed and clearance to the closest obstacle point.

    clearance may be any finite value (negative during collision analysis);
    speed must be nonnegative.
    """

    speed: float
    clearance: float

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        if math.isnan(self.clearance):
            raise ValueError("clearance must not be NaN")


def is_safe(si: SafetyInput, p: RobotParams) -> bool:
    """Strict safety predicate; ties count as unsafe."""
    if math.isinf(si.clearance):
        return si.clearance > 0
    v = si.speed
    ratio = p.accel_max / p.brake_decel + 1.0
    budget = (
        v * v / (2.0 * p.brake_decel)
        + p.obstacle_vmax * v / p.brake_decel
        + ratio * (p.accel_max * p.cycle_max * p.cycle_max / 2.0 + p.cycle_max * (v + p.obstacle_vmax))
    )
    return si.clearance / SQRT2 > budget


def max_safe_speed(clearance: float, p: RobotParams) -> float:
    """Largest speed still safe at the given clearance, clamped at 0.

    This is the positive root of the safety quadratic.  A nonpositive root
    means no nonzero speed is safe (and for sufficiently small clearance not
    even standing still is), which callers detect through :func:`is_safe`.
    """
    if math.isinf(clearance) and clearance > 0:
        return math.inf
    ratio = p.accel_max / p.brake_decel + 1.0
    radicand = (
        ratio * p.cycle_max * p.cycle_max
        + (p.obstacle_vmax / p.brake_decel) ** 2
        + SQRT2 * clearance / p.brake_decel
    )
    if radicand < 0.0:
        return 0.0
    root = p.brake_decel * math.sqrt(radicand) - p.obstacle_vmax - ratio * p.cycle_max * p.brake_decel
    return max(0.0, root)


def desired_speed(si: SafetyInput, p: RobotParams) -> float:
    """Per-cycle speed setpoint: ride the envelope while safe, zero otherwise.

    While safe the robot may accelerate for a full cycle, so the setpoint is
    the envelope value less the precision margin plus one cycle of gain.
    """
    if not is_safe(si, p):
        return 0.0
    return max(0.0, max_safe_speed(si.clearance, p) - p.speed_margin + p.accel_max * p.cycle_max)


def step_mode(mode: Mode, si: SafetyInput, p: RobotParams) -> Mode:
    """Advance the two-mode automaton: Drive exactly while the state is safe.

    The automaton allows nondeterministic early braking; this resolves it by
    driving whenever permitted, so the previous mode does not influence the
    outcome.
    """
    del mode
    return Mode.DRIVE if is_safe(si, p) else Mode.BRAKE
