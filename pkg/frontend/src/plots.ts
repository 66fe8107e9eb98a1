// Scrolling strip charts for clearance, speed, and turn rate.

import type { RingSeries } from "./series.js";

export interface StripStyle {
  label: string;
  color: string;
  yMin: number;
  yMax: number;
}

export function drawStrip(
  ctx: CanvasRenderingContext2D,
  series: RingSeries,
  now: number,
  windowSec: number,
  style: StripStyle,
): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#14161c";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#3a3f4d";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);

  const { ts, vs } = series.window(now - windowSec);
  const t0 = now - windowSec;
  const span = style.yMax - style.yMin;

  if (ts.length > 1) {
    ctx.strokeStyle = style.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < ts.length; i++) {
      const x = ((ts[i] - t0) / windowSec) * width;
      const clamped = Math.min(style.yMax, Math.max(style.yMin, vs[i]));
      const y = height - ((clamped - style.yMin) / span) * height;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.stroke();
  }

  ctx.font = "10px sans-serif";
  ctx.fillStyle = "#9aa4b5";
  const latest = series.length > 0 ? vs[vs.length - 1] : undefined;
  ctx.fillText(
    latest === undefined ? style.label : `${style.label} = ${latest.toFixed(3)}`,
    6,
    12,
  );
}
