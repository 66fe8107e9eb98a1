import { describe, expect, it } from "vitest";

import { reconnectDelay, BASE_DELAY_MS, MAX_DELAY_MS } from "../src/backoff.js";
import { RingSeries } from "../src/series.js";

describe("RingSeries", () => {
  it("keeps insertion order before wrapping", () => {
    const s = new RingSeries(4);
    s.push(0, 10);
    s.push(1, 11);
    expect(s.toArrays()).toEqual({ ts: [0, 1], vs: [10, 11] });
  });

  it("drops the oldest samples after wrapping", () => {
    const s = new RingSeries(3);
    for (let i = 0; i < 5; i++) s.push(i, i * 10);
    expect(s.toArrays()).toEqual({ ts: [2, 3, 4], vs: [20, 30, 40] });
    expect(s.length).toBe(3);
  });

  it("window filters by time", () => {
    const s = new RingSeries(8);
    for (let i = 0; i < 6; i++) s.push(i, i);
    expect(s.window(3)).toEqual({ ts: [3, 4, 5], vs: [3, 4, 5] });
  });

  it("clear empties the buffer", () => {
    const s = new RingSeries(3);
    s.push(0, 1);
    s.clear();
    expect(s.length).toBe(0);
    expect(s.toArrays()).toEqual({ ts: [], vs: [] });
  });

  it("rejects nonpositive capacity", () => {
    expect(() => new RingSeries(0)).toThrow();
  });
});

describe("reconnectDelay", () => {
  it("doubles from the base and caps", () => {
    expect(reconnectDelay(0)).toBe(BASE_DELAY_MS);
    expect(reconnectDelay(1)).toBe(2 * BASE_DELAY_MS);
    expect(reconnectDelay(2)).toBe(4 * BASE_DELAY_MS);
    expect(reconnectDelay(10)).toBe(MAX_DELAY_MS);
  });
});
