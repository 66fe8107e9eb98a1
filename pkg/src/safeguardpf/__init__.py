"""Passively safe reactive potential-field navigation.

Controller, kinematic simulator with moving obstacles, verification oracles,
and a live teleoperation bridge.  See README for the CLI and file formats.
"""

from .controller import Command, StalePerceptionError, WaypointPlan, advance_waypoint, control_cycle
from .core import FieldGains, Pose, RobotParams, Vec2, angle_of, wrap_angle
from .field import (
    ClassicFieldParams,
    Perception,
    Rect,
    attraction,
    classic_apf,
    repulsion,
    safe_speed_gradient,
    sample_field_grid,
    steering_rate,
    total_field,
)
from .safety import Mode, SafetyInput, desired_speed, is_safe, max_safe_speed, step_mode
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .sim import (
    JitterPolicy,
    SimConfig,
    Simulation,
    Trace,
    check_passive_safety,
    integrate_plant,
    run,
)
from .world import (
    ConvexPolygon,
    Disc,
    Obstacle,
    Pursuit,
    RobotState,
    Scripted,
    Static,
    Teleop,
    WorldState,
    closest_obstacle_point,
    step_obstacles,
)

__all__ = [
    "Command",
    "StalePerceptionError",
    "WaypointPlan",
    "advance_waypoint",
    "control_cycle",
    "FieldGains",
    "Pose",
    "RobotParams",
    "Vec2",
    "angle_of",
    "wrap_angle",
    "ClassicFieldParams",
    "Perception",
    "Rect",
    "attraction",
    "classic_apf",
    "repulsion",
    "safe_speed_gradient",
    "sample_field_grid",
    "steering_rate",
    "total_field",
    "Mode",
    "SafetyInput",
    "desired_speed",
    "is_safe",
    "max_safe_speed",
    "step_mode",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "parse_scenario",
    "JitterPolicy",
    "SimConfig",
    "Simulation",
    "Trace",
    "check_passive_safety",
    "integrate_plant",
    "run",
    "ConvexPolygon",
    "Disc",
    "Obstacle",
    "Pursuit",
    "RobotState",
    "Scripted",
    "Static",
    "Teleop",
    "WorldState",
    "closest_obstacle_point",
    "step_obstacles",
]
