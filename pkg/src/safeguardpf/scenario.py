"""Scenario files: parsing, validation, and randomized generation.

A scenario is a JSON document with top-level keys arena, robots, obstacles,
and sim.  All values are SI without unit suffixes.  Validation reports the
offending field path so configuration mistakes are cheap to find.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace

from .controller import WaypointPlan
from .core import FieldGains, Pose, RobotParams, Vec2
from .safety import Mode
from .sim import JitterPolicy, SimConfig
from .world import (
    ConvexPolygon,
    Disc,
    Motion,
    Obstacle,
    Pursuit,
    RobotState,
    Scripted,
    Static,
    Teleop,
    WorldState,
    closest_surface_point,
)


class ScenarioError(ValueError):
    """Validation failure, carrying the JSON path of the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True, slots=True)
class Arena:
    width: float
    height: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    @property
    def x_range(self) -> tuple[float, float]:
        return (self.origin_x, self.origin_x + self.width)

    @property
    def y_range(self) -> tuple[float, float]:
        return (self.origin_y, self.origin_y + self.height)

    def contains(self, x: float, y: float) -> bool:
        return (
            self.origin_x <= x <= self.origin_x + self.width
            and self.origin_y <= y <= self.origin_y + self.height
        )


@dataclass(frozen=True, slots=True)
class RobotSpec:
    spawn: Pose
    params: RobotParams
    gains: FieldGains
    waypoints: tuple[Vec2, ...]
    arrival_tolerance: float = 0.3

    def plan(self) -> WaypointPlan:
        return WaypointPlan(waypoints=self.waypoints, arrival_tolerance=self.arrival_tolerance)


@dataclass(slots=True)
class Scenario:
    arena: Arena
    robots: list[RobotSpec]
    obstacles: list[Obstacle]
    sim: SimConfig
    name: str = ""
    allow_assumption_breach: bool = False

    def initial_world(self) -> WorldState:
        return WorldState(
            time=0.0,
            robots=tuple(
                RobotState(pose=r.spawn, v=0.0, omega=0.0, mode=Mode.BRAKE) for r in self.robots
            ),
            obstacles=tuple(self.obstacles),
            robot_radii=tuple(r.params.radius for r in self.robots),
        )

    def validate(self) -> None:
        if not self.robots:
            raise ScenarioError("robots", "at least one robot required")
        for i, r in enumerate(self.robots):
            px, py = r.spawn.position.x, r.spawn.position.y
            if not self.arena.contains(px, py):
                raise ScenarioError(f"robots[{i}].spawn", "outside arena bounds")
            for k, obs in enumerate(self.obstacles):
                sd = closest_surface_point(obs.shape, px, py).signed_distance
                if sd <= r.params.radius:
                    raise ScenarioError(
                        f"robots[{i}].spawn", f"overlaps obstacles[{k}] (clearance {sd - r.params.radius:.3g})"
                    )
            for w, wp in enumerate(r.waypoints):
                if not self.arena.contains(wp.x, wp.y):
                    raise ScenarioError(f"robots[{i}].waypoints[{w}]", "outside arena bounds")
                for k, obs in enumerate(self.obstacles):
                    if closest_surface_point(obs.shape, wp.x, wp.y).signed_distance <= 0.0:
                        raise ScenarioError(
                            f"robots[{i}].waypoints[{w}]", f"inside obstacles[{k}]"
                        )
        for i in range(len(self.robots)):
            for j in range(i + 1, len(self.robots)):
                a, b = self.robots[i], self.robots[j]
                gap = (a.spawn.position - b.spawn.position).norm()
                if gap <= a.params.radius + b.params.radius:
                    raise ScenarioError(f"robots[{j}].spawn", f"overlaps robots[{i}]")
        v_assumed = min(r.params.obstacle_vmax for r in self.robots)
        for k, obs in enumerate(self.obstacles):
            moving = not isinstance(obs.motion, Static)
            if moving and obs.speed_limit > v_assumed + 1e-12 and not self.allow_assumption_breach:
                raise ScenarioError(
                    f"obstacles[{k}].speed_limit",
                    f"{obs.speed_limit} exceeds the assumed obstacle top speed {v_assumed}",
                )
            if isinstance(obs.motion, Pursuit):
                if not (0 <= obs.motion.target < len(self.robots)):
                    raise ScenarioError(f"obstacles[{k}].motion.target", "no such robot")
                if obs.motion.speed > obs.speed_limit + 1e-12:
                    raise ScenarioError(f"obstacles[{k}].motion.speed", "exceeds speed_limit")
            if isinstance(obs.motion, Scripted):
                for s, sp in enumerate(obs.motion.speeds):
                    if sp > obs.speed_limit + 1e-12:
                        raise ScenarioError(
                            f"obstacles[{k}].motion.speeds[{s}]", "exceeds speed_limit"
                        )
        channels = [o.motion.channel for o in self.obstacles if isinstance(o.motion, Teleop)]
        if len(channels) != len(set(channels)):
            raise ScenarioError("obstacles", "duplicate teleop channels")

    def teleop_channels(self) -> list[str]:
        return [o.motion.channel for o in self.obstacles if isinstance(o.motion, Teleop)]


# ---------------------------------------------------------------------------
# JSON parsing with path-tagged errors

def _expect(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ScenarioError(path, msg)


def _get(d: dict, key: str, path: str):
    _expect(isinstance(d, dict), path, "expected an object")
    _expect(key in d, path, f"missing required field {key!r}")
    return d[key]


def _num(d: dict, key: str, path: str, default=None) -> float:
    if default is not None and key not in d:
        return default
    v = _get(d, key, path)
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool), f"{path}.{key}", "expected a number")
    return float(v)


def _point(v, path: str) -> Vec2:
    _expect(isinstance(v, (list, tuple)) and len(v) == 2, path, "expected [x, y]")
    _expect(all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v), path, "expected numbers")
    return Vec2(float(v[0]), float(v[1]))


def _parse_shape(s: dict, path: str):
    kind = _get(s, "type", path)
    if kind == "disc":
        center = _point(_get(s, "center", path), f"{path}.center")
        radius = _num(s, "radius", path)
        _expect(radius > 0, f"{path}.radius", "must be > 0")
        return Disc(center.x, center.y, radius)
    if kind == "polygon":
        verts = _get(s, "vertices", path)
        _expect(isinstance(verts, list) and len(verts) >= 3, f"{path}.vertices", "need >= 3 vertices")
        pts = [_point(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts)]
        try:
            return ConvexPolygon(tuple(p.x for p in pts), tuple(p.y for p in pts))
        except ValueError as exc:
            raise ScenarioError(f"{path}.vertices", str(exc)) from exc
    raise ScenarioError(f"{path}.type", f"unknown shape type {kind!r}")


def _parse_motion(m: dict, path: str) -> Motion:
    kind = _get(m, "type", path)
    if kind == "static":
        return Static()
    if kind == "scripted":
        wps = _get(m, "waypoints", path)
        _expect(isinstance(wps, list) and wps, f"{path}.waypoints", "need >= 1 waypoint")
        speeds = _get(m, "speeds", path)
        _expect(
            isinstance(speeds, list) and len(speeds) == len(wps),
            f"{path}.speeds",
            "need one speed per waypoint",
        )
        try:
            return Scripted(
                waypoints=tuple(_point(w, f"{path}.waypoints[{i}]") for i, w in enumerate(wps)),
                speeds=tuple(float(s) for s in speeds),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.speeds", str(exc)) from exc
    if kind == "pursuit":
        target = _get(m, "target", path)
        _expect(isinstance(target, int) and not isinstance(target, bool), f"{path}.target", "expected an integer")
        speed = _num(m, "speed", path)
        try:
            return Pursuit(target=target, speed=speed)
        except ValueError as exc:
            raise ScenarioError(f"{path}.speed", str(exc)) from exc
    if kind == "teleop":
        channel = _get(m, "channel", path)
        _expect(isinstance(channel, str) and channel, f"{path}.channel", "expected a non-empty string")
        return Teleop(channel=channel)
    raise ScenarioError(f"{path}.type", f"unknown motion type {kind!r}")


def parse_scenario(doc: dict, name: str = "") -> Scenario:
    _expect(isinstance(doc, dict), "$", "scenario must be a JSON object")
    arena_doc = _get(doc, "arena", "$")
    arena = Arena(
        width=_num(arena_doc, "width", "arena"),
        height=_num(arena_doc, "height", "arena"),
        origin_x=_num(arena_doc, "origin_x", "arena", default=0.0),
        origin_y=_num(arena_doc, "origin_y", "arena", default=0.0),
    )
    _expect(arena.width > 0 and arena.height > 0, "arena", "width and height must be > 0")

    robots_doc = _get(doc, "robots", "$")
    _expect(isinstance(robots_doc, list) and robots_doc, "robots", "need >= 1 robot")
    robots = []
    for i, rd in enumerate(robots_doc):
        rp = f"robots[{i}]"
        spawn_doc = _get(rd, "spawn", rp)
        spawn = Pose(
            Vec2(_num(spawn_doc, "x", f"{rp}.spawn"), _num(spawn_doc, "y", f"{rp}.spawn")),
            _num(spawn_doc, "theta", f"{rp}.spawn", default=0.0),
        )
        pd = _get(rd, "params", rp)
        try:
            params = RobotParams(
                accel_max=_num(pd, "accel_max", f"{rp}.params"),
                brake_decel=_num(pd, "brake_decel", f"{rp}.params"),
                omega_max=_num(pd, "omega_max", f"{rp}.params"),
                cycle_max=_num(pd, "cycle_max", f"{rp}.params"),
                obstacle_vmax=_num(pd, "obstacle_vmax", f"{rp}.params"),
                speed_margin=_num(pd, "speed_margin", f"{rp}.params", default=0.01),
                radius=_num(pd, "radius", f"{rp}.params", default=0.0),
            )
        except ValueError as exc:
            raise ScenarioError(f"{rp}.params", str(exc)) from exc
        gd = _get(rd, "gains", rp)
        try:
            gains = FieldGains(
                k_att=_num(gd, "k_att", f"{rp}.gains"),
                k_rep=_num(gd, "k_rep", f"{rp}.gains"),
                grad_cap=(
                    _num(gd, "grad_cap", f"{rp}.gains") if "grad_cap" in gd else None
                ),
            )
        except ValueError as exc:
            raise ScenarioError(f"{rp}.gains", str(exc)) from exc
        wps_doc = _get(rd, "waypoints", rp)
        _expect(isinstance(wps_doc, list) and wps_doc, f"{rp}.waypoints", "need >= 1 waypoint")
        waypoints = tuple(_point(w, f"{rp}.waypoints[{k}]") for k, w in enumerate(wps_doc))
        tol = _num(rd, "arrival_tolerance", rp, default=0.3)
        _expect(tol > 0, f"{rp}.arrival_tolerance", "must be > 0")
        robots.append(
            RobotSpec(spawn=spawn, params=params, gains=gains, waypoints=waypoints, arrival_tolerance=tol)
        )

    obstacles = []
    for k, od in enumerate(doc.get("obstacles", [])):
        op = f"obstacles[{k}]"
        shape = _parse_shape(_get(od, "shape", op), f"{op}.shape")
        motion = _parse_motion(_get(od, "motion", op), f"{op}.motion")
        limit = _num(od, "speed_limit", op, default=0.0 if isinstance(motion, Static) else None)
        if limit is None:
            limit = _num(od, "speed_limit", op)
        _expect(limit >= 0, f"{op}.speed_limit", "must be >= 0")
        trusted = bool(od.get("static_trusted", False))
        obstacles.append(Obstacle(shape=shape, motion=motion, speed_limit=limit, static_trusted=trusted))

    sim_doc = doc.get("sim", {})
    eps_min = min(r.params.cycle_max for r in robots)
    jd = sim_doc.get("jitter", {})
    try:
        jitter = JitterPolicy(
            kind=jd.get("policy", "uniform"),
            low_frac=float(jd.get("low_frac", 0.5)),
        )
        sim_cfg = SimConfig(
            duration=_num(sim_doc, "duration", "sim", default=60.0),
            substep=_num(sim_doc, "substep", "sim", default=eps_min / 20.0),
            jitter=jitter,
            seed=int(sim_doc.get("seed", 0)),
        )
    except ValueError as exc:
        raise ScenarioError("sim", str(exc)) from exc
    _expect(sim_cfg.substep <= eps_min / 10 + 1e-12, "sim.substep", f"must be <= cycle_max/10 = {eps_min / 10}")

    return Scenario(
        arena=arena,
        robots=robots,
        obstacles=obstacles,
        sim=sim_cfg,
        name=doc.get("name", name),
        allow_assumption_breach=bool(doc.get("allow_assumption_breach", False)),
    )


def load_scenario(path: str, validate: bool = True) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"invalid JSON: {exc}") from exc
    scn = parse_scenario(doc, name=path)
    if validate:
        scn.validate()
    return scn


# ---------------------------------------------------------------------------
# Randomized scenarios for fuzzing

PIONEER_PARAMS = RobotParams(
    accel_max=0.3,
    brake_decel=0.3,
    omega_max=1.745,
    cycle_max=0.1,
    obstacle_vmax=0.75,
    speed_margin=0.01,
    radius=0.25,
)


@dataclass(frozen=True, slots=True)
class FuzzTemplate:
    """Generation envelope for randomized passive-safety scenarios."""

    params: RobotParams = PIONEER_PARAMS
    arena_size: float = 12.0
    duration: float = 12.0
    substep: float = 0.005
    min_obstacles: int = 1
    max_obstacles: int = 8
    k_att_range: tuple[float, float] = (0.04, 0.25)
    k_rep_range: tuple[float, float] = (0.09, 1.0)
    breach: bool = False

    def with_breach(self) -> "FuzzTemplate":
        return replace(self, breach=True)

    def describe(self) -> dict:
        v = self.params.obstacle_vmax
        return {
            "params": {
                "accel_max": self.params.accel_max,
                "brake_decel": self.params.brake_decel,
                "omega_max": self.params.omega_max,
                "cycle_max": self.params.cycle_max,
                "obstacle_vmax": v,
                "speed_margin": self.params.speed_margin,
                "radius": self.params.radius,
            },
            "arena_size": self.arena_size,
            "duration": self.duration,
            "obstacles": [self.min_obstacles, self.max_obstacles],
            "obstacle_speed_range": [0.0, 2.0 * v if self.breach else v],
            "k_att_range": list(self.k_att_range),
            "k_rep_range": list(self.k_rep_range),
            "assumption_breach": self.breach,
        }


def _random_shape(rng: random.Random, arena: float):
    x = rng.uniform(1.0, arena - 1.0)
    y = rng.uniform(1.0, arena - 1.0)
    if rng.random() < 0.5:
        return Disc(x, y, rng.uniform(0.2, 0.8))
    hw = rng.uniform(0.2, 1.0)
    hh = rng.uniform(0.2, 1.0)
    return ConvexPolygon((x - hw, x + hw, x + hw, x - hw), (y - hh, y - hh, y + hh, y + hh))


def random_scenario(seed: int, tpl: FuzzTemplate | None = None) -> Scenario:
    """One randomized scenario: mixed static/scripted/pursuit obstacles, with
    at least one pursuit adversary at exactly the assumed top speed."""
    tpl = tpl or FuzzTemplate()
    rng = random.Random(seed)
    arena = Arena(width=tpl.arena_size, height=tpl.arena_size)
    v = tpl.params.obstacle_vmax
    speed_cap = 2.0 * v if tpl.breach else v

    count = rng.randint(tpl.min_obstacles, tpl.max_obstacles)
    obstacles: list[Obstacle] = []
    for k in range(count):
        shape = _random_shape(rng, tpl.arena_size)
        if k == 0:
            speed = speed_cap if tpl.breach else v
            obstacles.append(Obstacle(shape=shape, motion=Pursuit(target=0, speed=speed), speed_limit=speed))
            continue
        kind = rng.random()
        if kind < 0.34:
            obstacles.append(Obstacle(shape=shape, motion=Static(), speed_limit=0.0))
        elif kind < 0.67:
            n_wp = rng.randint(2, 4)
            wps = tuple(
                Vec2(rng.uniform(0.5, tpl.arena_size - 0.5), rng.uniform(0.5, tpl.arena_size - 0.5))
                for _ in range(n_wp)
            )
            speeds = tuple(rng.uniform(0.2 * speed_cap, speed_cap) for _ in range(n_wp))
            obstacles.append(
                Obstacle(shape=shape, motion=Scripted(waypoints=wps, speeds=speeds), speed_limit=speed_cap)
            )
        else:
            speed = rng.uniform(0.3 * speed_cap, speed_cap)
            obstacles.append(Obstacle(shape=shape, motion=Pursuit(target=0, speed=speed), speed_limit=speed))

    def clear_point(min_clear: float) -> Vec2:
        for _ in range(500):
            pt = Vec2(rng.uniform(0.8, tpl.arena_size - 0.8), rng.uniform(0.8, tpl.arena_size - 0.8))
            if all(
                closest_surface_point(o.shape, pt.x, pt.y).signed_distance > min_clear
                for o in obstacles
            ):
                return pt
        raise RuntimeError(f"could not place a clear point for seed {seed}")

    spawn = clear_point(tpl.params.radius + 0.3)
    goal = clear_point(0.1)
    for _ in range(200):
        if (goal - spawn).norm() >= 2.0:
            break
        goal = clear_point(0.1)
    heading = rng.uniform(-math.pi, math.pi)

    robot = RobotSpec(
        spawn=Pose(spawn, heading),
        params=tpl.params,
        gains=FieldGains(
            k_att=rng.uniform(*tpl.k_att_range),
            k_rep=rng.uniform(*tpl.k_rep_range),
        ),
        waypoints=(goal,),
    )
    return Scenario(
        arena=arena,
        robots=[robot],
        obstacles=obstacles,
        sim=SimConfig(duration=tpl.duration, substep=tpl.substep, jitter=JitterPolicy(), seed=seed),
        name=f"fuzz-{seed}",
        allow_assumption_breach=tpl.breach,
    )
