"""Live session server: streams simulation state and accepts teleop commands.

Clients speak JSON over a WebSocket (a persistent bidirectional text channel
over TCP).  Every message carries a version field.  Server to client: one
state message per control cycle.  Client to server: teleop velocity for one
obstacle, or pause/resume/reset.  Teleop commands are latched once per cycle
before the cycle's obstacle steps, so a command received before cycle k is
applied at cycle k and never later than the next one; the latched log makes
a served session replayable headlessly, byte for byte.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
from dataclasses import dataclass, field

from websockets.asyncio.server import broadcast, serve

from .sim import SimConfig, Simulation, Trace
from .world import ConvexPolygon, Disc, Teleop

log = logging.getLogger("safeguardpf.bridge")

PROTOCOL_VERSION = 1


def _num(value: float) -> float | None:
    return None if math.isinf(value) or math.isnan(value) else value


def encode_state(sim: Simulation, paused: bool = False) -> dict:
    """One self-describing state message for the current cycle."""
    world = sim.world
    robots = []
    for i, st in enumerate(world.robots):
        per = sim.last_perceptions[i]
        cmd = sim.last_commands[i]
        robots.append(
            {
                "x": st.pose.position.x,
                "y": st.pose.position.y,
                "theta": st.pose.heading,
                "v": st.v,
                "omega": st.omega,
                "mode": cmd.mode.value,
                "d": _num(per.clearance),
                "alpha": per.away_bearing,
                "v_star": _num(cmd.v_star),
                "omega_star": cmd.omega_star,
                "radius": world.robot_radii[i],
            }
        )
    obstacles = []
    for k, obs in enumerate(world.obstacles):
        if isinstance(obs.shape, Disc):
            shape = {"type": "disc", "center": [obs.shape.cx, obs.shape.cy], "radius": obs.shape.radius}
        else:
            poly: ConvexPolygon = obs.shape
            shape = {"type": "polygon", "vertices": [[x, y] for x, y in zip(poly.xs, poly.ys)]}
        rx, ry = obs.shape.reference
        obstacles.append(
            {
                "id": obs.motion.channel if isinstance(obs.motion, Teleop) else str(k),
                "shape": shape,
                "pose": [rx, ry],
                "speed_limit": obs.speed_limit,
                "teleop": isinstance(obs.motion, Teleop),
            }
        )
    arena = sim.scenario.arena
    return {
        "version": PROTOCOL_VERSION,
        "type": "state",
        "t": world.time,
        "robots": robots,
        "obstacles": obstacles,
        "flags": {
            "collision": [r.collision for r in sim.trace.records[-1].robots] if sim.trace.records else [],
            "local_min": sim.local_min_flags,
            "outcome": sim.trace.outcome if sim.done else None,
            "paused": paused,
        },
        "arena": {
            "origin_x": arena.origin_x,
            "origin_y": arena.origin_y,
            "width": arena.width,
            "height": arena.height,
        },
    }


@dataclass(slots=True)
class TeleopLogEntry:
    cycle: int
    t: float
    commands: dict[str, tuple[float, float]]


def replay_teleop(entries: list[TeleopLogEntry]):
    """Teleop provider that replays a recorded command log cycle by cycle."""
    by_cycle = {e.cycle: e.commands for e in entries}

    def provider(cycle: int, t: float) -> dict[str, tuple[float, float]]:
        return by_cycle.get(cycle, {})

    return provider


def load_teleop_log(path: str) -> list[TeleopLogEntry]:
    with open(path) as fh:
        doc = json.load(fh)
    return [
        TeleopLogEntry(
            cycle=e["cycle"],
            t=e["t"],
            commands={k: (v[0], v[1]) for k, v in e["commands"].items()},
        )
        for e in doc["entries"]
    ]


@dataclass(slots=True)
class Session:
    trace: Trace
    teleop_log: list[TeleopLogEntry]
    malformed_count: int
    teleop_log_path: str | None = None

    def write_teleop_log(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(
                {
                    "version": PROTOCOL_VERSION,
                    "entries": [
                        {"cycle": e.cycle, "t": e.t, "commands": {k: list(v) for k, v in e.commands.items()}}
                        for e in self.teleop_log
                    ],
                },
                fh,
            )
        self.teleop_log_path = path


class BridgeServer:
    """One real-time simulation task plus any number of viewer/driver clients."""

    def __init__(self, scenario, cfg: SimConfig, port: int = 0, pace: float = 1.0):
        scenario.validate()
        self.scenario = scenario
        self.cfg = cfg
        self.requested_port = port
        self.port: int | None = None
        self.pace = pace
        self.sim = Simulation(scenario, cfg)
        self.channels = scenario.teleop_channels()
        self.teleop_latest: dict[str, tuple[float, float]] = {}
        self.teleop_log: list[TeleopLogEntry] = []
        self.malformed = 0
        self.paused = False
        self._reset = False
        self._clients: set = set()
        self.started = asyncio.Event()

    # -- client side ---------------------------------------------------------

    async def _handler(self, ws) -> None:
        self._clients.add(ws)
        try:
            await ws.send(json.dumps(encode_state(self.sim, self.paused)))
            async for raw in ws:
                self._on_message(raw)
        except Exception:  # client errors never touch the simulation
            log.debug("client connection dropped", exc_info=True)
        finally:
            self._clients.discard(ws)

    def _on_message(self, raw) -> None:
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            self.malformed += 1
            return
        if not isinstance(msg, dict) or msg.get("version") != PROTOCOL_VERSION:
            self.malformed += 1
            return
        kind = msg.get("type")
        if kind == "teleop":
            oid = msg.get("obstacle_id")
            vx, vy = msg.get("vx"), msg.get("vy")
            if (
                isinstance(oid, str)
                and oid in self.channels
                and isinstance(vx, (int, float))
                and isinstance(vy, (int, float))
                and not isinstance(vx, bool)
                and not isinstance(vy, bool)
                and math.isfinite(vx)
                and math.isfinite(vy)
            ):
                self.teleop_latest[oid] = (float(vx), float(vy))
            else:
                self.malformed += 1
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "reset":
            self._reset = True
        else:
            self.malformed += 1

    # -- simulation side ------------------------------------------------------

    async def run(self) -> Session:
        async with serve(self._handler, "127.0.0.1", self.requested_port) as server:
            self.port = server.sockets[0].getsockname()[1]
            self.started.set()
            log.info("bridge serving on port %d", self.port)
            while not self.sim.done:
                if self._reset:
                    self.sim = Simulation(self.scenario, self.cfg)
                    self.teleop_log.clear()
                    self._reset = False
                    broadcast(self._clients, json.dumps(encode_state(self.sim, self.paused)))
                if self.paused:
                    await asyncio.sleep(0.02)
                    continue
                latched = {ch: self.teleop_latest.get(ch, (0.0, 0.0)) for ch in self.channels}
                cycle = self.sim.cycle
                t = self.sim.world.time
                self.sim.step_cycle(latched)
                self.teleop_log.append(TeleopLogEntry(cycle=cycle, t=t, commands=latched))
                broadcast(self._clients, json.dumps(encode_state(self.sim, self.paused)))
                period = self.sim.last_period
                if period > 0.0 and self.pace > 0.0:
                    await asyncio.sleep(period / self.pace)
        return Session(trace=self.sim.trace, teleop_log=self.teleop_log, malformed_count=self.malformed)


def serve_session(scenario, cfg: SimConfig, port: int = 8765, pace: float = 1.0) -> Session:
    """Blocking wrapper: serve until the scenario ends, return the session."""
    server = BridgeServer(scenario, cfg, port=port, pace=pace)
    return asyncio.run(server.run())
