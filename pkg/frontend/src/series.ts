// Fixed-capacity time series for the strip charts.

export class RingSeries {
  private ts: number[];
  private vs: number[];
  private head = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    if (capacity <= 0) throw new Error("capacity must be > 0");
    this.ts = new Array(capacity).fill(0);
    this.vs = new Array(capacity).fill(0);
  }

  get length(): number {
    return this.count;
  }

  push(t: number, v: number): void {
    this.ts[this.head] = t;
    this.vs[this.head] = v;
    this.head = (this.head + 1) % this.capacity;
    if (this.count < this.capacity) this.count += 1;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
  }

  /** Samples in insertion order, oldest first. */
  toArrays(): { ts: number[]; vs: number[] } {
    const ts: number[] = [];
    const vs: number[] = [];
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let i = 0; i < this.count; i++) {
      const k = (start + i) % this.capacity;
      ts.push(this.ts[k]);
      vs.push(this.vs[k]);
    }
    return { ts, vs };
  }

  /** Samples with t >= tMin, oldest first. */
  window(tMin: number): { ts: number[]; vs: number[] } {
    const { ts, vs } = this.toArrays();
    let i = 0;
    while (i < ts.length && ts[i] < tMin) i++;
    return { ts: ts.slice(i), vs: vs.slice(i) };
  }
}
