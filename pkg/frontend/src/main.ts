// Adversary console: connects to the bridge, renders the arena, and maps
// keyboard/pointer input to teleop commands for one obstacle.
//
// URL query: ?host=127.0.0.1&port=8765&obstacle_id=human

import { reconnectDelay } from "./backoff.js";
import { DragDrive, KeyboardDrive, OncePerFrame, clampToSpeed } from "./input.js";
import { drawStrip } from "./plots.js";
import {
  controlMessage,
  parseStateMessage,
  teleopMessage,
  type StateMessage,
} from "./protocol.js";
import { drawScene } from "./render.js";
import { RingSeries } from "./series.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? window.location.hostname ?? "127.0.0.1";
const port = params.get("port") ?? "8765";
const requestedObstacle = params.get("obstacle_id");

const arenaCanvas = document.getElementById("arena") as HTMLCanvasElement;
const plotD = document.getElementById("plot-d") as HTMLCanvasElement;
const plotV = document.getElementById("plot-v") as HTMLCanvasElement;
const plotW = document.getElementById("plot-w") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const statusLine = document.getElementById("status") as HTMLDivElement;

const seriesD = new RingSeries(4096);
const seriesV = new RingSeries(4096);
const seriesW = new RingSeries(4096);
const PLOT_WINDOW_S = 20;

let socket: WebSocket | null = null;
let latest: StateMessage | null = null;
let attempts = 0;
let frameId = 0;

const keys = new KeyboardDrive();
const drag = new DragDrive();
const limiter = new OncePerFrame();

function activeObstacle(state: StateMessage) {
  const teleops = state.obstacles.filter((o) => o.teleop);
  if (requestedObstacle) return teleops.find((o) => o.id === requestedObstacle) ?? null;
  return teleops[0] ?? null;
}

function connect(): void {
  const url = `ws://${host}:${port}`;
  banner.textContent = `connecting to ${url} ...`;
  banner.className = "banner warn";
  const ws = new WebSocket(url);
  socket = ws;

  ws.onopen = () => {
    attempts = 0;
    banner.textContent = "";
    banner.className = "banner";
  };
  ws.onmessage = (ev: MessageEvent) => {
    const state = parseStateMessage(String(ev.data));
    if (!state) return;
    latest = state;
    const robot = state.robots[0];
    if (robot) {
      if (robot.d !== null) seriesD.push(state.t, robot.d);
      seriesV.push(state.t, robot.v);
      seriesW.push(state.t, robot.omega);
    }
  };
  ws.onclose = () => {
    if (socket !== ws) return;
    socket = null;
    const delay = reconnectDelay(attempts);
    attempts += 1;
    banner.textContent = `disconnected; retrying in ${(delay / 1000).toFixed(1)} s`;
    banner.className = "banner error";
    setTimeout(connect, delay);
  };
  ws.onerror = () => ws.close();
}

function sendControl(kind: "pause" | "resume" | "reset"): void {
  if (socket && socket.readyState === WebSocket.OPEN) socket.send(controlMessage(kind));
  if (kind === "reset") {
    seriesD.clear();
    seriesV.clear();
    seriesW.clear();
  }
}

document.getElementById("btn-pause")?.addEventListener("click", () => sendControl("pause"));
document.getElementById("btn-resume")?.addEventListener("click", () => sendControl("resume"));
document.getElementById("btn-reset")?.addEventListener("click", () => sendControl("reset"));

document.addEventListener("keydown", (ev) => keys.keyDown(ev.code));
document.addEventListener("keyup", (ev) => keys.keyUp(ev.code));
window.addEventListener("blur", () => keys.clear());

let dragOrigin: [number, number] | null = null;
arenaCanvas.addEventListener("pointerdown", (ev) => {
  dragOrigin = [ev.offsetX, ev.offsetY];
  drag.start();
  arenaCanvas.setPointerCapture(ev.pointerId);
});
arenaCanvas.addEventListener("pointermove", (ev) => {
  if (dragOrigin) drag.move(ev.offsetX - dragOrigin[0], ev.offsetY - dragOrigin[1]);
});
const endDrag = () => {
  dragOrigin = null;
  drag.end();
};
arenaCanvas.addEventListener("pointerup", endDrag);
arenaCanvas.addEventListener("pointercancel", endDrag);

function frame(): void {
  frameId += 1;
  const ctx = arenaCanvas.getContext("2d");
  if (ctx && latest) {
    drawScene(ctx, latest);
    const now = latest.t;
    const dCtx = plotD.getContext("2d");
    const vCtx = plotV.getContext("2d");
    const wCtx = plotW.getContext("2d");
    if (dCtx) drawStrip(dCtx, seriesD, now, PLOT_WINDOW_S, { label: "d [m]", color: "#ffd75a", yMin: 0, yMax: 6 });
    if (vCtx) drawStrip(vCtx, seriesV, now, PLOT_WINDOW_S, { label: "v [m/s]", color: "#6fc2ff", yMin: 0, yMax: 1 });
    if (wCtx) drawStrip(wCtx, seriesW, now, PLOT_WINDOW_S, { label: "omega [rad/s]", color: "#9f8bff", yMin: -2, yMax: 2 });

    const obstacle = activeObstacle(latest);
    if (obstacle && socket && socket.readyState === WebSocket.OPEN && limiter.shouldSend(frameId)) {
      const limit = obstacle.speed_limit;
      const cmd = drag.dragging ? drag.command(limit) : keys.command(limit);
      const safe = clampToSpeed(cmd.vx, cmd.vy, limit);
      socket.send(teleopMessage(obstacle.id, safe.vx, safe.vy));
    }
    statusLine.textContent = obstacle
      ? `driving "${obstacle.id}" (limit ${obstacle.speed_limit} m/s) - arrows/WASD or drag`
      : "no teleop obstacle in this scenario (viewing only)";
  }
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
