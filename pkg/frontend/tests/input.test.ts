import { describe, expect, it } from "vitest";

import { DragDrive, KeyboardDrive, OncePerFrame, clampToSpeed } from "../src/input.js";

const V = 0.75;

describe("clampToSpeed", () => {
  it("caps the magnitude at the limit", () => {
    const out = clampToSpeed(2 * V, 0, V);
    expect(out.vx).toBeCloseTo(V, 12);
    expect(out.vy).toBe(0);
  });

  it("leaves slow commands untouched", () => {
    expect(clampToSpeed(0.1, -0.2, V)).toEqual({ vx: 0.1, vy: -0.2 });
    expect(clampToSpeed(0, 0, V)).toEqual({ vx: 0, vy: 0 });
  });

  it("preserves direction when clamping", () => {
    const out = clampToSpeed(3, 4, V);
    expect(Math.hypot(out.vx, out.vy)).toBeCloseTo(V, 12);
    expect(out.vy / out.vx).toBeCloseTo(4 / 3, 12);
  });
});

describe("KeyboardDrive", () => {
  it("no key pressed gives the zero command", () => {
    expect(new KeyboardDrive().command(V)).toEqual({ vx: 0, vy: 0 });
  });

  it("a single key drives at full speed", () => {
    const k = new KeyboardDrive();
    k.keyDown("ArrowRight");
    expect(k.command(V)).toEqual({ vx: V, vy: 0 });
  });

  it("diagonals are normalized to the speed limit", () => {
    const k = new KeyboardDrive();
    k.keyDown("ArrowUp");
    k.keyDown("ArrowRight");
    const cmd = k.command(V);
    expect(Math.hypot(cmd.vx, cmd.vy)).toBeCloseTo(V, 12);
    expect(cmd.vx).toBeCloseTo(V / Math.SQRT2, 12);
    expect(cmd.vy).toBeCloseTo(V / Math.SQRT2, 12);
  });

  it("opposite keys cancel and key release stops", () => {
    const k = new KeyboardDrive();
    k.keyDown("KeyA");
    k.keyDown("KeyD");
    expect(k.command(V)).toEqual({ vx: 0, vy: 0 });
    k.keyUp("KeyA");
    expect(k.command(V)).toEqual({ vx: V, vy: 0 });
    k.keyUp("KeyD");
    expect(k.command(V)).toEqual({ vx: 0, vy: 0 });
  });

  it("ignores unmapped keys", () => {
    const k = new KeyboardDrive();
    k.keyDown("KeyQ");
    expect(k.active).toBe(false);
  });

  it("every possible command respects the limit", () => {
    const codes = ["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight", "KeyW", "KeyA", "KeyS", "KeyD"];
    for (let mask = 0; mask < 1 << codes.length; mask++) {
      const k = new KeyboardDrive();
      codes.forEach((c, i) => {
        if (mask & (1 << i)) k.keyDown(c);
      });
      const cmd = k.command(V);
      expect(Math.hypot(cmd.vx, cmd.vy)).toBeLessThanOrEqual(V + 1e-12);
    }
  });
});

describe("DragDrive", () => {
  it("maps a drag vector to velocity with screen-y flipped", () => {
    const d = new DragDrive(80);
    d.start();
    d.move(40, -40); // right and up on screen
    const cmd = d.command(V);
    expect(cmd.vx).toBeCloseTo(V / 2, 12);
    expect(cmd.vy).toBeCloseTo(V / 2, 12);
  });

  it("saturates at the full-speed radius", () => {
    const d = new DragDrive(80);
    d.start();
    d.move(400, 0);
    const cmd = d.command(V);
    expect(Math.hypot(cmd.vx, cmd.vy)).toBeCloseTo(V, 12);
  });

  it("is zero unless dragging", () => {
    const d = new DragDrive(80);
    expect(d.command(V)).toEqual({ vx: 0, vy: 0 });
    d.start();
    d.move(10, 10);
    d.end();
    expect(d.command(V)).toEqual({ vx: 0, vy: 0 });
  });
});

describe("OncePerFrame", () => {
  it("allows one send per frame id", () => {
    const lim = new OncePerFrame();
    expect(lim.shouldSend(1)).toBe(true);
    expect(lim.shouldSend(1)).toBe(false);
    expect(lim.shouldSend(2)).toBe(true);
    expect(lim.shouldSend(2)).toBe(false);
  });
});
