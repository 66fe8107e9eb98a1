// Wire protocol for the live session bridge. Every message carries a
// version field; anything that fails the guards is dropped by the caller.

export const PROTOCOL_VERSION = 1;

export type Mode = "Drive" | "Brake";

export interface RobotTelemetry {
  x: number;
  y: number;
  theta: number;
  v: number;
  omega: number;
  mode: Mode;
  d: number | null;
  alpha: number | null;
  v_star: number | null;
  omega_star: number;
  radius: number;
}

export interface DiscShape {
  type: "disc";
  center: [number, number];
  radius: number;
}

export interface PolygonShape {
  type: "polygon";
  vertices: [number, number][];
}

export interface ObstacleInfo {
  id: string;
  shape: DiscShape | PolygonShape;
  pose: [number, number];
  speed_limit: number;
  teleop: boolean;
}

export interface ArenaInfo {
  origin_x: number;
  origin_y: number;
  width: number;
  height: number;
}

export interface StateFlags {
  collision: boolean[];
  local_min: boolean[];
  outcome: string | null;
  paused: boolean;
}

export interface StateMessage {
  version: number;
  type: "state";
  t: number;
  robots: RobotTelemetry[];
  obstacles: ObstacleInfo[];
  flags: StateFlags;
  arena: ArenaInfo;
}

function isNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

export function parseStateMessage(raw: string): StateMessage | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  const m = msg as Record<string, unknown>;
  if (m.version !== PROTOCOL_VERSION || m.type !== "state") return null;
  if (!isNumber(m.t) || !Array.isArray(m.robots) || !Array.isArray(m.obstacles)) return null;
  if (typeof m.arena !== "object" || m.arena === null) return null;
  return m as unknown as StateMessage;
}

export function teleopMessage(obstacleId: string, vx: number, vy: number): string {
  return JSON.stringify({
    version: PROTOCOL_VERSION,
    type: "teleop",
    obstacle_id: obstacleId,
    vx,
    vy,
  });
}

export function controlMessage(kind: "pause" | "resume" | "reset"): string {
  return JSON.stringify({ version: PROTOCOL_VERSION, type: kind });
}
