"""Plant integration, the simulation loop, traces, and the safety checker.

The plant is the planar unicycle x' = v cos(theta), y' = v sin(theta),
v' = a, theta' = omega.  Within one control cycle the robot holds the
curvature implied by the commanded turn rate at the cycle-start speed, so
omega scales with v (omega' = a/r_c); from rest it holds the turn rate
itself instead.  Both regimes integrate in closed form for piecewise-linear
speed, with the turn rate saturated at the hardware bound.

The loop draws a nondeterministic cycle period, runs every controller
against one immutable snapshot, then advances robots and obstacles in
substeps while monitoring collisions (with bisection against tunneling).
Identical seeds give byte-identical traces.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field, replace

from .controller import Command, WaypointPlan, advance_waypoint, control_cycle, is_local_minimum
from .core import Pose, RobotParams, Vec2, wrap_angle
from .field import Perception
from .safety import Mode
from .world import RobotState, WorldState, closest_obstacle_point, min_clearance, step_obstacles

REST_SPEED = 1e-9  # below this a robot counts as at rest
_KAPPA_EPS = 1e-9  # below this curvature the path is a straight line
_OMEGA_EPS = 1e-9  # below this turn rate the heading is held


# ---------------------------------------------------------------------------
# Cycle kinematics and plant integration

@dataclass(frozen=True, slots=True)
class Arc:
    """Constant-curvature regime: omega tracks kappa * v."""

    kappa: float


@dataclass(frozen=True, slots=True)
class FixedOmega:
    """Constant turn-rate regime, used when the cycle starts from rest."""

    omega: float


CycleKinematics = Arc | FixedOmega


def cycle_kinematics(v0: float, omega_star: float) -> CycleKinematics:
    if v0 > REST_SPEED:
        return Arc(omega_star / v0)
    return FixedOmega(omega_star)


def _tracking_accel(state: RobotState, cmd: Command, p: RobotParams) -> float:
    if cmd.mode is Mode.BRAKE:
        return -p.brake_decel if state.v > 0.0 else 0.0
    raw = (cmd.v_star - state.v) / p.cycle_max
    return max(-p.brake_decel, min(p.accel_max, raw))


def _arc_segment(x: float, y: float, th: float, v: float, a: float, kappa: float, tau: float):
    s = v * tau + 0.5 * a * tau * tau
    if abs(kappa) < _KAPPA_EPS:
        return x + s * math.cos(th), y + s * math.sin(th), th + kappa * s, v + a * tau
    th1 = th + kappa * s
    x1 = x + (math.sin(th1) - math.sin(th)) / kappa
    y1 = y - (math.cos(th1) - math.cos(th)) / kappa
    return x1, y1, th1, v + a * tau


def _fixed_omega_segment(x: float, y: float, th: float, v: float, a: float, w: float, tau: float):
    v1 = v + a * tau
    th1 = th + w * tau
    if abs(w) < _OMEGA_EPS:
        s = v * tau + 0.5 * a * tau * tau
        return x + s * math.cos(th), y + s * math.sin(th), th1, v1
    x1 = x + (v1 * math.sin(th1) - v * math.sin(th)) / w + (a / (w * w)) * (math.cos(th1) - math.cos(th))
    y1 = y - (v1 * math.cos(th1) - v * math.cos(th)) / w + (a / (w * w)) * (math.sin(th1) - math.sin(th))
    return x1, y1, th1, v1


def integrate_plant(
    state: RobotState,
    cmd: Command,
    dt: float,
    p: RobotParams,
    kin: CycleKinematics | None = None,
) -> RobotState:
    """Advance the unicycle by dt under one command.

    Speed follows a constant acceleration from the tracking rule and clamps
    at zero (no reversing).  When kin is omitted it is derived from the
    current state, which matches the in-cycle relationship the simulator
    maintains.  The turn rate never exceeds the hardware bound: in the arc
    regime it saturates once kappa * v crosses it, splitting the step into
    exact pieces.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if kin is None:
        kin = cycle_kinematics(state.v, state.omega) if state.v > REST_SPEED else FixedOmega(state.omega)

    a = _tracking_accel(state, cmd, p)
    v0 = state.v
    # Time actually spent moving: speed hits zero and sticks.
    if a < 0.0 and v0 + a * dt < 0.0:
        t_m = v0 / (-a)
    else:
        t_m = dt

    x, y, th, v = state.pose.position.x, state.pose.position.y, state.pose.heading, v0

    if isinstance(kin, FixedOmega):
        w = kin.omega
        if t_m > 0.0:
            x, y, th, v = _fixed_omega_segment(x, y, th, v, a, w, t_m)
        # Heading keeps rotating at w after the stop (pivot in place).
        th += w * (dt - t_m)
        v = max(0.0, v if t_m == dt else 0.0)
        omega_end = w
    else:
        kappa = kin.kappa
        omega_cap = p.omega_max
        if omega_cap <= 0.0:
            kappa = 0.0  # no turning authority at all
        if t_m > 0.0 and abs(kappa) >= _KAPPA_EPS:
            v_sat = omega_cap / abs(kappa)
            w_sat = math.copysign(omega_cap, kappa)
            v_end = v0 + a * t_m
            if v0 <= v_sat and v_end <= v_sat:
                x, y, th, v = _arc_segment(x, y, th, v, a, kappa, t_m)
            elif v0 > v_sat and v_end > v_sat:
                x, y, th, v = _fixed_omega_segment(x, y, th, v, a, w_sat, t_m)
            else:
                t_x = (v_sat - v0) / a
                if v0 < v_sat:  # accelerating through the cap
                    x, y, th, v = _arc_segment(x, y, th, v, a, kappa, t_x)
                    x, y, th, v = _fixed_omega_segment(x, y, th, v, a, w_sat, t_m - t_x)
                else:  # decelerating back under the cap
                    x, y, th, v = _fixed_omega_segment(x, y, th, v, a, w_sat, t_x)
                    x, y, th, v = _arc_segment(x, y, th, v, a, kappa, t_m - t_x)
        elif t_m > 0.0:
            x, y, th, v = _arc_segment(x, y, th, v, a, kappa, t_m)
        v = max(0.0, v if t_m == dt else 0.0)
        omega_end = max(-p.omega_max, min(p.omega_max, kappa * v))

    return RobotState(
        pose=Pose(Vec2(x, y), wrap_angle(th)),
        v=v,
        omega=omega_end,
        mode=cmd.mode,
    )


# ---------------------------------------------------------------------------
# Simulation configuration and traces

@dataclass(frozen=True, slots=True)
class JitterPolicy:
    """Cycle-period draw: the full nondeterministic range or a fixed period."""

    kind: str = "uniform"
    low_frac: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "fixed"):
            raise ValueError(f"unknown jitter kind {self.kind!r}")
        if not (0.0 < self.low_frac <= 1.0):
            raise ValueError("low_frac must be in (0, 1]")

    def draw(self, rng: random.Random, cycle_max: float) -> float:
        if self.kind == "fixed":
            return cycle_max
        return rng.uniform(self.low_frac * cycle_max, cycle_max)


@dataclass(frozen=True, slots=True)
class SimConfig:
    duration: float
    substep: float
    jitter: JitterPolicy = JitterPolicy()
    seed: int = 0
    max_range: float = math.inf

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.substep <= 0:
            raise ValueError("substep must be > 0")


@dataclass(frozen=True, slots=True)
class RobotSample:
    x: float
    y: float
    theta: float
    v: float
    omega: float
    mode: str
    v_star: float
    omega_star: float
    d: float
    alpha: float | None
    collision: bool
    local_min: bool


@dataclass(frozen=True, slots=True)
class TraceRecord:
    t: float
    robots: tuple[RobotSample, ...]


@dataclass(slots=True)
class Trace:
    records: list[TraceRecord] = field(default_factory=list)
    outcome: str = "unknown"


OUTCOME_GOALS = "goals_reached"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_FATAL = "fatal_collision"


# ---------------------------------------------------------------------------
# The simulation stepper

class Simulation:
    """Cycle-by-cycle stepper shared by headless runs and live sessions."""

    def __init__(self, scenario, cfg: SimConfig):
        eps_min = min(r.params.cycle_max for r in scenario.robots)
        if cfg.substep > eps_min / 10 + 1e-12:
            raise ValueError(f"substep {cfg.substep} exceeds cycle_max/10 = {eps_min / 10}")
        self.scenario = scenario
        self.cfg = cfg
        self.world: WorldState = scenario.initial_world()
        self.params = [r.params for r in scenario.robots]
        self.gains = [r.gains for r in scenario.robots]
        self.plans: list[WaypointPlan] = [r.plan() for r in scenario.robots]
        self.rng = random.Random(cfg.seed)
        self.trace = Trace()
        self.cycle = 0
        self.done = False
        self.last_commands: list[Command] = [
            Command(0.0, 0.0, Mode.BRAKE, 0.0) for _ in scenario.robots
        ]
        self.last_perceptions: list[Perception] = [
            self._sense(i) for i in range(len(scenario.robots))
        ]
        self._contact = [False] * len(scenario.robots)
        self._clearances = [min_clearance(self.world, i) for i in range(len(scenario.robots))]
        self._local_min = [False] * len(scenario.robots)
        self._eps_min = eps_min
        self.last_period = 0.0

    @property
    def local_min_flags(self) -> list[bool]:
        return list(self._local_min)

    # -- helpers ------------------------------------------------------------

    def _sense(self, i: int) -> Perception:
        goal = None if self.plans[i].complete else self.plans[i].active_goal
        return closest_obstacle_point(
            self.world, i, self.params[i], goal=goal, max_range=self.cfg.max_range
        )

    def _sample(self, i: int, per: Perception, cmd: Command) -> RobotSample:
        st = self.world.robots[i]
        return RobotSample(
            x=st.pose.position.x,
            y=st.pose.position.y,
            theta=st.pose.heading,
            v=st.v,
            omega=st.omega,
            mode=cmd.mode.value,
            v_star=cmd.v_star,
            omega_star=cmd.omega_star,
            d=per.clearance,
            alpha=per.away_bearing,
            collision=self._contact[i],
            local_min=self._local_min[i],
        )

    def _record(self) -> TraceRecord:
        rec = TraceRecord(
            t=self.world.time,
            robots=tuple(
                self._sample(i, self.last_perceptions[i], self.last_commands[i])
                for i in range(len(self.world.robots))
            ),
        )
        self.trace.records.append(rec)
        return rec

    def _finish(self, outcome: str) -> None:
        self.trace.outcome = outcome
        self.done = True

    # -- the cycle ----------------------------------------------------------

    def step_cycle(self, teleop: dict[str, tuple[float, float]] | None = None) -> list[TraceRecord]:
        """Run one control cycle and its substeps; returns the new records.

        Teleop commands are latched here and applied to every obstacle step
        of this cycle.
        """
        if self.done:
            return []
        start_len = len(self.trace.records)

        self.plans = [
            advance_waypoint(self.plans[i], self.world.robots[i].pose.position)
            for i in range(len(self.plans))
        ]
        if all(p.complete for p in self.plans):
            self.last_perceptions = [self._sense(i) for i in range(len(self.plans))]
            self.last_commands = [
                Command(0.0, 0.0, self.last_commands[i].mode, self.world.time)
                for i in range(len(self.plans))
            ]
            self._record()
            self._finish(OUTCOME_GOALS)
            self.last_period = 0.0
            return self.trace.records[start_len:]

        remaining = self.cfg.duration - self.world.time
        tau = min(self.jitter_draw(), remaining)
        self.last_period = tau

        percs = [self._sense(i) for i in range(len(self.plans))]
        cmds = [
            control_cycle(
                self.world.robots[i], percs[i], self.plans[i], self.gains[i], self.params[i],
                t=self.world.time,
            )
            for i in range(len(self.plans))
        ]
        self._local_min = [
            is_local_minimum(percs[i], self.plans[i], self.gains[i], self.params[i])
            for i in range(len(self.plans))
        ]
        self.last_perceptions = percs
        self.last_commands = cmds
        self._record()

        # Snap turn rates to the fresh commands and fix the cycle kinematics.
        kins = [cycle_kinematics(st.v, cmd.omega_star) for st, cmd in zip(self.world.robots, cmds)]
        self.world = replace(
            self.world,
            robots=tuple(
                replace(st, omega=cmd.omega_star) for st, cmd in zip(self.world.robots, cmds)
            ),
        )

        n_sub = max(1, math.ceil(tau / self.cfg.substep - 1e-12))
        h = tau / n_sub
        teleop = teleop or {}
        for _ in range(n_sub):
            if self.done:
                break
            self._advance(h, kins, cmds, teleop, self.cfg.substep / 64.0)

        self.cycle += 1
        if not self.done and self.world.time >= self.cfg.duration - 1e-9:
            self.last_perceptions = [self._sense(i) for i in range(len(self.plans))]
            self._record()
            self._finish(OUTCOME_TIMEOUT)
        return self.trace.records[start_len:]

    def jitter_draw(self) -> float:
        return self.cfg.jitter.draw(self.rng, self._eps_min)

    def _advance(self, h, kins, cmds, teleop, h_floor) -> None:
        # Split the step while some robot could close its whole clearance
        # within it (anti-tunneling sweep).
        v_env = max(
            [o.speed_limit for o in self.world.obstacles]
            + [st.v + p.accel_max * h for st, p in zip(self.world.robots, self.params)]
            + [0.0]
        )
        if h > h_floor:
            for i, st in enumerate(self.world.robots):
                cl = self._clearances[i]
                closure = (st.v + self.params[i].accel_max * h + v_env) * h
                if 0.0 < cl <= closure:
                    self._advance(h / 2.0, kins, cmds, teleop, h_floor)
                    if not self.done:
                        self._advance(h / 2.0, kins, cmds, teleop, h_floor)
                    return

        stepped = step_obstacles(self.world, h, teleop)
        new_robots = tuple(
            integrate_plant(st, cmds[i], h, self.params[i], kins[i])
            for i, st in enumerate(self.world.robots)
        )
        self.world = replace(stepped, robots=new_robots)

        onset = []
        for i in range(len(new_robots)):
            cl = min_clearance(self.world, i)
            self._clearances[i] = cl
            contact = cl <= 0.0
            if contact and not self._contact[i]:
                onset.append(i)
            self._contact[i] = contact
        if onset:
            self.last_perceptions = [self._sense(i) for i in range(len(self.plans))]
            self._record()
            if any(self.world.robots[i].v > REST_SPEED for i in onset):
                self._finish(OUTCOME_FATAL)


def run(scenario, cfg: SimConfig, teleop_provider=None) -> Trace:
    """Headless run to completion; see Simulation for the cycle semantics."""
    scenario.validate()
    sim = Simulation(scenario, cfg)
    while not sim.done:
        latched = teleop_provider(sim.cycle, sim.world.time) if teleop_provider else None
        sim.step_cycle(latched)
    return sim.trace


# ---------------------------------------------------------------------------
# Passive-safety verdict

@dataclass(frozen=True, slots=True)
class SafetyVerdict:
    passed: bool
    first_violation: tuple[int, int] | None = None  # (record index, robot index)
    message: str = ""


def check_passive_safety(trace: Trace | list[TraceRecord]) -> SafetyVerdict:
    """Contact is permitted only at rest: any flagged record must show the
    involved robot at (numerically) zero speed."""
    records = trace.records if isinstance(trace, Trace) else trace
    for ri, rec in enumerate(records):
        for bi, robot in enumerate(rec.robots):
            if robot.collision and robot.v > REST_SPEED:
                return SafetyVerdict(
                    passed=False,
                    first_violation=(ri, bi),
                    message=f"robot {bi} in contact at v={robot.v} (record {ri}, t={rec.t})",
                )
    return SafetyVerdict(passed=True)


# ---------------------------------------------------------------------------
# Trace serialization (fixed external schema)

_FIELDS = [
    "t", "robot", "x", "y", "theta", "v", "omega", "mode",
    "v_star", "omega_star", "d", "alpha", "collision", "local_min",
]


class TraceParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _rows(trace: Trace):
    for rec in trace.records:
        for i, r in enumerate(rec.robots):
            yield rec.t, i, r


def dumps_jsonl(trace: Trace) -> str:
    out = []
    for t, i, r in _rows(trace):
        out.append(
            json.dumps(
                {
                    "t": t,
                    "robot": i,
                    "x": r.x,
                    "y": r.y,
                    "theta": r.theta,
                    "v": r.v,
                    "omega": r.omega,
                    "mode": r.mode,
                    "v_star": None if math.isinf(r.v_star) else r.v_star,
                    "omega_star": r.omega_star,
                    "d": None if math.isinf(r.d) else r.d,
                    "alpha": r.alpha,
                    "collision": r.collision,
                    "local_min": r.local_min,
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(out) + ("\n" if out else "")


def write_jsonl(trace: Trace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_jsonl(trace))


def write_csv(trace: Trace, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_FIELDS)
        for t, i, r in _rows(trace):
            w.writerow(
                [
                    repr(t), i, repr(r.x), repr(r.y), repr(r.theta), repr(r.v), repr(r.omega),
                    r.mode,
                    "inf" if math.isinf(r.v_star) else repr(r.v_star),
                    repr(r.omega_star),
                    "inf" if math.isinf(r.d) else repr(r.d),
                    "" if r.alpha is None else repr(r.alpha),
                    int(r.collision), int(r.local_min),
                ]
            )


def _sample_from_row(row: dict) -> RobotSample:
    return RobotSample(
        x=row["x"], y=row["y"], theta=row["theta"], v=row["v"], omega=row["omega"],
        mode=row["mode"],
        v_star=math.inf if row["v_star"] is None else row["v_star"],
        omega_star=row["omega_star"],
        d=math.inf if row["d"] is None else row["d"],
        alpha=row["alpha"],
        collision=bool(row["collision"]),
        local_min=bool(row["local_min"]),
    )


def _group_rows(rows: list[tuple[float, int, RobotSample]]) -> list[TraceRecord]:
    records: list[TraceRecord] = []
    bucket: list[RobotSample] = []
    current_t: float | None = None
    for t, _i, sample in rows:
        if current_t is not None and t != current_t:
            records.append(TraceRecord(t=current_t, robots=tuple(bucket)))
            bucket = []
        current_t = t
        bucket.append(sample)
    if bucket:
        records.append(TraceRecord(t=current_t, robots=tuple(bucket)))
    return records


def read_jsonl(path: str) -> Trace:
    rows = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                rows.append((row["t"], row["robot"], _sample_from_row(row)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise TraceParseError(ln, str(exc)) from exc
    return Trace(records=_group_rows(rows), outcome="unknown")


def read_csv(path: str) -> Trace:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return Trace(records=[], outcome="unknown")
        if header != _FIELDS:
            raise TraceParseError(1, f"unexpected header {header!r}")
        for ln, raw in enumerate(reader, start=2):
            if len(raw) != len(_FIELDS):
                raise TraceParseError(ln, f"expected {len(_FIELDS)} columns, got {len(raw)}")
            try:
                row = {
                    "t": float(raw[0]),
                    "robot": int(raw[1]),
                    "x": float(raw[2]),
                    "y": float(raw[3]),
                    "theta": float(raw[4]),
                    "v": float(raw[5]),
                    "omega": float(raw[6]),
                    "mode": raw[7],
                    "v_star": None if raw[8] == "inf" else float(raw[8]),
                    "omega_star": float(raw[9]),
                    "d": None if raw[10] == "inf" else float(raw[10]),
                    "alpha": None if raw[11] == "" else float(raw[11]),
                    "collision": int(raw[12]),
                    "local_min": int(raw[13]),
                }
            except ValueError as exc:
                raise TraceParseError(ln, str(exc)) from exc
            rows.append((row["t"], row["robot"], _sample_from_row(row)))
    return Trace(records=_group_rows(rows), outcome="unknown")


def read_trace(path: str) -> Trace:
    if path.endswith(".csv"):
        return read_csv(path)
    return read_jsonl(path)
