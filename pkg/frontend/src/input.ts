// Keyboard/pointer to obstacle velocity commands. The magnitude is capped
// client-side to the obstacle's speed limit; the server clamps regardless.

export interface Velocity {
  vx: number;
  vy: number;
}

export function clampToSpeed(vx: number, vy: number, maxSpeed: number): Velocity {
  const speed = Math.hypot(vx, vy);
  if (speed <= maxSpeed || speed === 0) return { vx, vy };
  const k = maxSpeed / speed;
  return { vx: vx * k, vy: vy * k };
}

const KEY_AXES: Record<string, [number, number]> = {
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  KeyW: [0, 1],
  KeyS: [0, -1],
  KeyA: [-1, 0],
  KeyD: [1, 0],
};

/** Tracks held keys; opposite keys cancel, diagonals run at full speed. */
export class KeyboardDrive {
  private pressed = new Set<string>();

  keyDown(code: string): void {
    if (code in KEY_AXES) this.pressed.add(code);
  }

  keyUp(code: string): void {
    this.pressed.delete(code);
  }

  clear(): void {
    this.pressed.clear();
  }

  get active(): boolean {
    return this.pressed.size > 0;
  }

  command(maxSpeed: number): Velocity {
    let ax = 0;
    let ay = 0;
    for (const code of this.pressed) {
      const [dx, dy] = KEY_AXES[code];
      ax += dx;
      ay += dy;
    }
    ax = Math.sign(ax);
    ay = Math.sign(ay);
    if (ax === 0 && ay === 0) return { vx: 0, vy: 0 };
    const norm = Math.hypot(ax, ay);
    return { vx: (ax / norm) * maxSpeed, vy: (ay / norm) * maxSpeed };
  }
}

/** Maps a pointer drag vector to a velocity; saturates at the drag radius. */
export class DragDrive {
  private dx = 0;
  private dy = 0;
  dragging = false;

  constructor(private fullSpeedRadiusPx = 80) {}

  start(): void {
    this.dragging = true;
    this.dx = 0;
    this.dy = 0;
  }

  move(dxPx: number, dyPx: number): void {
    if (!this.dragging) return;
    this.dx = dxPx;
    this.dy = dyPx;
  }

  end(): void {
    this.dragging = false;
    this.dx = 0;
    this.dy = 0;
  }

  command(maxSpeed: number): Velocity {
    if (!this.dragging) return { vx: 0, vy: 0 };
    // screen y grows downward; world y grows upward
    const vx = (this.dx / this.fullSpeedRadiusPx) * maxSpeed;
    const vy = (-this.dy / this.fullSpeedRadiusPx) * maxSpeed;
    return clampToSpeed(vx, vy, maxSpeed);
  }
}

/** At most one outbound command per render frame. */
export class OncePerFrame {
  private lastFrame = -1;

  shouldSend(frameId: number): boolean {
    if (frameId === this.lastFrame) return false;
    this.lastFrame = frameId;
    return true;
  }
}
