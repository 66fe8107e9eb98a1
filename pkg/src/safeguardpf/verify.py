"""Independent oracles: brute-force counterparts of every closed form.

Nothing in this module reuses the algebra it checks.  The speed envelope is
recovered by bisection on the raw safety predicate, the field gradient by
central differences, and the braking guarantee by direct simulation of the
worst-case head-on encounter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .core import RobotParams
from .safety import SafetyInput, is_safe

BISECT_TOL = 1e-12


def bisect_vmax(clearance: float, p: RobotParams) -> float:
    """Largest safe speed found by bisection on the safety predicate.

    The upper bracket b*(1 + sqrt(2 + V^2/b^2 + 2d/b)) + V provably exceeds
    the true boundary (term-by-term sqrt subadditivity), so the boundary is
    always inside [0, hi].
    """
    if not is_safe(SafetyInput(0.0, clearance), p):
        return 0.0
    b = p.brake_decel
    v = p.obstacle_vmax
    hi = b * (1.0 + math.sqrt(2.0 + (v / b) ** 2 + 2.0 * max(clearance, 0.0) / b)) + v
    lo = 0.0
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if is_safe(SafetyInput(mid, clearance), p):
            lo = mid
        else:
            hi = mid
    return lo


def finite_diff_gradient(clearance: float, p: RobotParams, h: float) -> float:
    """Central finite difference of the speed envelope w.r.t. clearance."""
    if h <= 0:
        raise ValueError("step must be > 0")
    if clearance - h < 0:
        raise ValueError("clearance - h must be >= 0")
    from .safety import max_safe_speed

    return (max_safe_speed(clearance + h, p) - max_safe_speed(clearance - h, p)) / (2.0 * h)


@dataclass(frozen=True, slots=True)
class BrakeCheckResult:
    passed: bool
    min_separation: float
    stop_time: float


def worst_case_brake_check(speed: float, clearance: float, p: RobotParams, samples: int = 4096) -> BrakeCheckResult:
    """Replay the worst case: one full cycle at max acceleration, then braking,
    against a head-on obstacle closing at the assumed top speed.

    Passes iff separation stays positive until the robot is at rest.  States
    the controller emits in Drive mode must pass; the safety budget covers
    this scenario with a sqrt(2) margin to spare.
    """
    if speed < 0:
        raise ValueError("speed must be >= 0")
    a, b, eps, vo = p.accel_max, p.brake_decel, p.cycle_max, p.obstacle_vmax
    v1 = speed + a * eps
    stop_time = eps + v1 / b

    def robot_travel(t: float) -> float:
        if t <= eps:
            return speed * t + 0.5 * a * t * t
        tb = t - eps
        return speed * eps + 0.5 * a * eps * eps + v1 * tb - 0.5 * b * tb * tb

    min_sep = math.inf
    for i in range(samples + 1):
        t = stop_time * i / samples
        sep = clearance - robot_travel(t) - vo * t
        if sep < min_sep:
            min_sep = sep
    return BrakeCheckResult(passed=min_sep > 0.0, min_separation=min_sep, stop_time=stop_time)


@dataclass(slots=True)
class FuzzFailure:
    seed: int
    first_violation_record: int
    robot: int
    speed: float
    assumption_violated: bool


@dataclass(slots=True)
class FuzzReport:
    runs: int
    failures: list[FuzzFailure] = field(default_factory=list)
    param_ranges: dict = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return not any(not f.assumption_violated for f in self.failures)

    def to_json(self) -> str:
        return json.dumps(
            {
                "runs": self.runs,
                "failures": [
                    {
                        "seed": f.seed,
                        "first_violation_record": f.first_violation_record,
                        "robot": f.robot,
                        "speed": f.speed,
                        "assumption_violated": f.assumption_violated,
                    }
                    for f in self.failures
                ],
                "param_ranges": self.param_ranges,
            },
            indent=2,
        )


def fuzz_passive_safety(n: int, seed: int = 0, template=None, breach_assumptions: bool = False) -> FuzzReport:
    """Run n randomized scenarios and aggregate passive-safety verdicts.

    Scenario generation lives in :mod:`safeguardpf.scenario`; each run gets
    its own RNG stream derived from (seed, index) so failures reproduce in
    isolation.  With breach_assumptions, obstacles may exceed the assumed
    top speed and any failures are labeled rather than counted as clean-run
    violations.
    """
    if n <= 0:
        raise ValueError("n must be > 0")
    from .scenario import FuzzTemplate, random_scenario
    from .sim import SimConfig, check_passive_safety, run

    tpl = template or FuzzTemplate()
    if breach_assumptions:
        tpl = tpl.with_breach()
    report = FuzzReport(runs=n, param_ranges=tpl.describe())
    for i in range(n):
        scn_seed = seed * 1_000_003 + i
        scn = random_scenario(scn_seed, tpl)
        cfg = SimConfig(
            duration=tpl.duration,
            substep=tpl.substep,
            jitter=scn.sim.jitter,
            seed=scn_seed,
        )
        trace = run(scn, cfg)
        verdict = check_passive_safety(trace)
        if not verdict.passed:
            rec, robot = verdict.first_violation
            report.failures.append(
                FuzzFailure(
                    seed=scn_seed,
                    first_violation_record=rec,
                    robot=robot,
                    speed=trace.records[rec].robots[robot].v,
                    assumption_violated=breach_assumptions,
                )
            )
    return report
