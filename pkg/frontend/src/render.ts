// Canvas drawing: arena, obstacles, robots as velocity arrows, mode badge,
// and the closest-obstacle ray. Everything rendered comes straight from the
// latest bridge message; the client never extrapolates.

import type { ObstacleInfo, RobotTelemetry, StateMessage } from "./protocol.js";

export interface Viewport {
  scale: number; // px per meter
  ox: number; // screen x of world origin
  oy: number; // screen y of world origin
}

export function fitViewport(
  canvasW: number,
  canvasH: number,
  arena: { origin_x: number; origin_y: number; width: number; height: number },
): Viewport {
  const margin = 0.92;
  const scale = margin * Math.min(canvasW / arena.width, canvasH / arena.height);
  const cx = arena.origin_x + arena.width / 2;
  const cy = arena.origin_y + arena.height / 2;
  return {
    scale,
    ox: canvasW / 2 - cx * scale,
    oy: canvasH / 2 + cy * scale,
  };
}

export function toScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [vp.ox + x * vp.scale, vp.oy - y * vp.scale];
}

const ARROW_SECONDS = 2.0; // arrow length = this many seconds of travel
const HEADING_TICK_M = 0.35;

function drawObstacle(ctx: CanvasRenderingContext2D, vp: Viewport, obs: ObstacleInfo): void {
  ctx.fillStyle = obs.teleop ? "#b5651d" : "#555a66";
  ctx.strokeStyle = obs.teleop ? "#ff9d45" : "#7c8294";
  ctx.lineWidth = 2;
  ctx.beginPath();
  if (obs.shape.type === "disc") {
    const [sx, sy] = toScreen(vp, obs.shape.center[0], obs.shape.center[1]);
    ctx.arc(sx, sy, obs.shape.radius * vp.scale, 0, 2 * Math.PI);
  } else {
    const verts = obs.shape.vertices;
    const [sx0, sy0] = toScreen(vp, verts[0][0], verts[0][1]);
    ctx.moveTo(sx0, sy0);
    for (let i = 1; i < verts.length; i++) {
      const [sx, sy] = toScreen(vp, verts[i][0], verts[i][1]);
      ctx.lineTo(sx, sy);
    }
    ctx.closePath();
  }
  ctx.fill();
  ctx.stroke();
  if (obs.teleop) {
    const [sx, sy] = toScreen(vp, obs.pose[0], obs.pose[1]);
    ctx.fillStyle = "#ffe0bf";
    ctx.font = "11px sans-serif";
    ctx.fillText(obs.id, sx + 8, sy - 8);
  }
}

function drawRobot(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  robot: RobotTelemetry,
  index: number,
  collided: boolean,
): void {
  const [sx, sy] = toScreen(vp, robot.x, robot.y);
  const braking = robot.mode === "Brake";

  // closest-obstacle ray: from the robot toward the nearest obstacle point
  if (robot.d !== null && robot.alpha !== null) {
    const toward = robot.alpha + Math.PI;
    const [ex, ey] = toScreen(
      vp,
      robot.x + (robot.d + robot.radius) * Math.cos(toward),
      robot.y + (robot.d + robot.radius) * Math.sin(toward),
    );
    ctx.strokeStyle = "rgba(255, 215, 90, 0.55)";
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(sx, sy);
    ctx.lineTo(ex, ey);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // body
  ctx.fillStyle = collided ? "#d2322f" : braking ? "#c78f2e" : "#2e86c7";
  ctx.beginPath();
  ctx.arc(sx, sy, Math.max(3, robot.radius * vp.scale), 0, 2 * Math.PI);
  ctx.fill();

  // velocity arrow (length proportional to speed), heading tick at rest
  const len = robot.v > 1e-9 ? robot.v * ARROW_SECONDS : HEADING_TICK_M;
  const [tx, ty] = toScreen(
    vp,
    robot.x + len * Math.cos(robot.theta),
    robot.y + len * Math.sin(robot.theta),
  );
  ctx.strokeStyle = robot.v > 1e-9 ? "#e8eef7" : "#9aa4b5";
  ctx.lineWidth = robot.v > 1e-9 ? 2.5 : 1.5;
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  ctx.lineTo(tx, ty);
  ctx.stroke();
  if (robot.v > 1e-9) {
    const ang = Math.atan2(ty - sy, tx - sx);
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - 8 * Math.cos(ang - 0.45), ty - 8 * Math.sin(ang - 0.45));
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - 8 * Math.cos(ang + 0.45), ty - 8 * Math.sin(ang + 0.45));
    ctx.stroke();
  }

  // mode badge
  ctx.font = "bold 11px sans-serif";
  ctx.fillStyle = braking ? "#ffb347" : "#7fd07f";
  ctx.fillText(`R${index} ${robot.mode}`, sx + 10, sy + 14);
}

export function drawScene(ctx: CanvasRenderingContext2D, state: StateMessage): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#14161c";
  ctx.fillRect(0, 0, width, height);
  const vp = fitViewport(width, height, state.arena);

  // arena frame
  const [ax, ay] = toScreen(vp, state.arena.origin_x, state.arena.origin_y + state.arena.height);
  ctx.strokeStyle = "#3a3f4d";
  ctx.lineWidth = 1.5;
  ctx.strokeRect(ax, ay, state.arena.width * vp.scale, state.arena.height * vp.scale);

  for (const obs of state.obstacles) drawObstacle(ctx, vp, obs);
  state.robots.forEach((robot, i) =>
    drawRobot(ctx, vp, robot, i, state.flags.collision[i] ?? false),
  );

  ctx.font = "12px sans-serif";
  ctx.fillStyle = "#9aa4b5";
  ctx.fillText(`t = ${state.t.toFixed(2)} s`, 12, 18);
  if (state.flags.outcome) {
    ctx.fillStyle = "#ffd75a";
    ctx.fillText(`outcome: ${state.flags.outcome}`, 12, 34);
  }
  if (state.flags.paused) {
    ctx.fillStyle = "#ff9d45";
    ctx.fillText("paused", width - 60, 18);
  }
}
