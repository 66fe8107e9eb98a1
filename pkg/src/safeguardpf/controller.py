"""The per-cycle control law and the waypoint supervisor.

Each cycle is a pure function of the fresh perception: pick the mode from
the safety predicate, the speed setpoint from the envelope, and the turn
rate from the combined field.  Steering stays active while braking; only
acceleration is constrained by the mode.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .core import FieldGains, RobotParams, Vec2
from .field import Perception, steering_rate, total_field
from .safety import Mode, SafetyInput, desired_speed, step_mode
from .world import RobotState

LOCAL_MIN_FORCE = 1e-6


class StalePerceptionError(RuntimeError):
    """Raised when a control cycle is fed a perception older than one cycle."""


@dataclass(frozen=True, slots=True)
class Command:
    """Desired speed and turn rate emitted once per control cycle."""

    v_star: float
    omega_star: float
    mode: Mode
    timestamp: float


@dataclass(frozen=True, slots=True)
class WaypointPlan:
    """Ordered goals from the supervisory planner; one active at a time."""

    waypoints: tuple[Vec2, ...]
    arrival_tolerance: float = 0.3
    active_index: int = 0
    complete: bool = False

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("plan needs at least one waypoint")
        if self.arrival_tolerance <= 0:
            raise ValueError("arrival_tolerance must be > 0")
        if not (0 <= self.active_index < len(self.waypoints)):
            raise ValueError("active_index out of range")

    @property
    def active_goal(self) -> Vec2:
        return self.waypoints[self.active_index]


def advance_waypoint(plan: WaypointPlan, position: Vec2) -> WaypointPlan:
    """Step to the next waypoint once the active one is reached.

    The final waypoint is never skipped: reaching it marks the plan complete.
    """
    if plan.complete:
        return plan
    if (position - plan.active_goal).norm() > plan.arrival_tolerance:
        return plan
    if plan.active_index + 1 < len(plan.waypoints):
        return replace(plan, active_index=plan.active_index + 1)
    return replace(plan, complete=True)


def control_cycle(
    state: RobotState,
    per: Perception,
    plan: WaypointPlan,
    g: FieldGains,
    p: RobotParams,
    t: float = 0.0,
) -> Command:
    """One reactive cycle: perception in, desired velocity pair out.

    A completed plan parks the robot (zero setpoints).  When the binding
    obstacle is flagged genuinely static its assumed speed drops to zero,
    relaxing the envelope; everything else is unchanged.
    """
    if per.stamp is not None and t - per.stamp > p.cycle_max:
        raise StalePerceptionError(
            f"perception stamped {per.stamp} is older than one cycle at t={t}"
        )
    p_eff = p
    if per.trusted_static and p.obstacle_vmax > 0.0:
        p_eff = replace(p, obstacle_vmax=0.0)
    si = SafetyInput(state.v, per.clearance)
    mode = step_mode(state.mode, si, p_eff)
    if plan.complete:
        return Command(v_star=0.0, omega_star=0.0, mode=mode, timestamp=t)
    v_star = desired_speed(si, p_eff)
    omega_star = steering_rate(total_field(per, g, p_eff), per.heading, p)
    return Command(v_star=v_star, omega_star=omega_star, mode=mode, timestamp=t)


def is_local_minimum(per: Perception, plan: WaypointPlan, g: FieldGains, p: RobotParams) -> bool:
    """Field cancellation away from the goal; flagged in traces, not resolved."""
    if plan.complete:
        return False
    force = total_field(per, g, p)
    return force.norm() < LOCAL_MIN_FORCE and per.goal_bearing is not None
