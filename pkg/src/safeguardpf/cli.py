"""Command-line entry point: runs, field-grid export, fuzzing, trace checks,
and the live teleoperation server.

Exit codes are part of the public interface: 0 on pass (goals reached or a
clean timeout), 1 on configuration errors, 2 on a fatal collision or a
failed safety check.
"""

from __future__ import annotations

import logging
import os
import sys

import click

from .field import Rect, sample_field_grid, write_field_csv
from .scenario import ScenarioError, load_scenario
from .sim import (
    JitterPolicy,
    SimConfig,
    TraceParseError,
    check_passive_safety,
    read_trace,
    run,
    write_csv,
    write_jsonl,
)
from .verify import fuzz_passive_safety

log = logging.getLogger("safeguardpf")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COLLISION = 2


def _setup_logging() -> None:
    level = os.environ.get("SAFEGUARDPF_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _load(scenario_path: str):
    try:
        return load_scenario(scenario_path)
    except ScenarioError as exc:
        click.echo(f"scenario error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"cannot read scenario: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _config(scn, seed: int | None, duration: float | None) -> SimConfig:
    cfg = scn.sim
    return SimConfig(
        duration=duration if duration is not None else cfg.duration,
        substep=cfg.substep,
        jitter=cfg.jitter,
        seed=seed if seed is not None else cfg.seed,
        max_range=cfg.max_range,
    )


@click.group()
def main() -> None:
    """Provably safe potential-field navigation toolkit."""
    _setup_logging()


@main.command("run")
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--duration", type=float, default=None, help="Override the scenario duration (s).")
@click.option("--out", "out_path", default=None, help="Trace output path.")
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--serve", is_flag=True, help="Run live instead: serve the session over WebSocket.")
@click.option("--port", type=int, default=8765, help="Port for --serve.")
@click.option("--pace", type=float, default=1.0, help="Wall-clock pace factor for --serve (>1 is faster).")
def cmd_run(scenario_path, seed, duration, out_path, fmt, serve, port, pace):
    """Execute a scenario headlessly (or live with --serve) and write the trace."""
    scn = _load(scenario_path)
    cfg = _config(scn, seed, duration)
    if serve:
        from .bridge import serve_session

        try:
            session = serve_session(scn, cfg, port=port, pace=pace)
        except OSError as exc:
            click.echo(f"cannot serve on port {port}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        trace = session.trace
        if out_path:
            session.write_teleop_log(out_path + ".teleop.json")
    else:
        trace = run(scn, cfg)
    if out_path:
        if fmt == "jsonl":
            write_jsonl(trace, out_path)
        else:
            write_csv(trace, out_path)
        log.info("trace written to %s", out_path)
    verdict = check_passive_safety(trace)
    click.echo(f"outcome: {trace.outcome}; passive safety: {'pass' if verdict.passed else 'FAIL'}")
    if trace.outcome == "fatal_collision" or not verdict.passed:
        sys.exit(EXIT_COLLISION)
    sys.exit(EXIT_OK)


@main.command("field")
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--region", default="-10,10,-10,10", help="x_min,x_max,y_min,y_max")
@click.option("--resolution", type=float, default=0.5)
@click.option("--mode", type=click.Choice(["repulsion", "total"]), default="total")
@click.option("--out", "out_path", required=True)
def cmd_field(scenario_path, region, resolution, mode, out_path):
    """Sample the field on a grid and export it as CSV (x, y, fx, fy)."""
    scn = _load(scenario_path)
    try:
        parts = [float(tok) for tok in region.split(",")]
        if len(parts) != 4:
            raise ValueError("expected 4 comma-separated numbers")
        rect = Rect(parts[0], parts[1], parts[2], parts[3])
        grid = sample_field_grid(
            rect, resolution, scn, scn.robots[0].gains, scn.robots[0].params, mode=mode
        )
    except ValueError as exc:
        click.echo(f"field error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    write_field_csv(grid, out_path)
    click.echo(f"{grid.nx * grid.ny} cells written to {out_path}")
    sys.exit(EXIT_OK)


@main.command("fuzz")
@click.option("--n", type=int, required=True, help="Number of randomized scenarios.")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", default=None, help="Report path (JSON).")
@click.option("--breach-assumptions", is_flag=True, help="Let obstacles exceed the assumed top speed.")
def cmd_fuzz(n, seed, out_path, breach_assumptions):
    """Fuzz passive safety over randomized scenarios; exit 0 iff clean."""
    if n <= 0:
        click.echo("fuzz error: --n must be > 0", err=True)
        sys.exit(EXIT_CONFIG)
    report = fuzz_passive_safety(n, seed=seed, breach_assumptions=breach_assumptions)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(report.to_json())
    labeled = sum(1 for f in report.failures if f.assumption_violated)
    hard = len(report.failures) - labeled
    click.echo(f"runs: {report.runs}; violations: {hard}; assumption-breach failures: {labeled}")
    sys.exit(EXIT_OK if report.clean else EXIT_COLLISION)


@main.command("check")
@click.option("--trace", "trace_path", required=True, type=click.Path())
def cmd_check(trace_path):
    """Re-check a stored trace for passive safety."""
    try:
        trace = read_trace(trace_path)
    except TraceParseError as exc:
        click.echo(f"trace parse error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"cannot read trace: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    verdict = check_passive_safety(trace)
    if verdict.passed:
        click.echo("passive safety: pass")
        sys.exit(EXIT_OK)
    rec, robot = verdict.first_violation
    click.echo(f"passive safety: FAIL at record {rec} (robot {robot}): {verdict.message}")
    sys.exit(EXIT_COLLISION)


@main.command("serve")
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--port", type=int, default=8765)
@click.option("--pace", type=float, default=1.0)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, help="Write trace (JSONL) and teleop log after the session.")
def cmd_serve(scenario_path, port, pace, seed, out_path):
    """Serve a live session over WebSocket for the browser console."""
    scn = _load(scenario_path)
    cfg = _config(scn, seed, None)
    from .bridge import serve_session

    try:
        session = serve_session(scn, cfg, port=port, pace=pace)
    except OSError as exc:
        click.echo(f"cannot serve on port {port}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if out_path:
        write_jsonl(session.trace, out_path)
        session.write_teleop_log(out_path + ".teleop.json")
    verdict = check_passive_safety(session.trace)
    click.echo(f"outcome: {session.trace.outcome}; passive safety: {'pass' if verdict.passed else 'FAIL'}")
    sys.exit(EXIT_OK if verdict.passed else EXIT_COLLISION)


if __name__ == "__main__":
    main()
