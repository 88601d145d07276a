// Small time-series charts over the trend window: no axes framework, just
// scaled polylines with a left-edge min/max annotation.

import type { Canvas2DLike } from './render.js';
import type { TrendPoint } from './state.js';

export interface SeriesSpec {
  label: string;
  color: string;
  dashed?: boolean;
  value(point: TrendPoint): number | undefined;
}

export interface ChartOptions {
  width: number;
  height: number;
  /** Fix the y range (e.g. [0, 1] for ratios); default: data extent. */
  yRange?: [number, number];
}

export interface Extent {
  min: number;
  max: number;
}

/** Joint finite extent of all series over all points; null when empty. */
export function extentOf(points: TrendPoint[], specs: SeriesSpec[]): Extent | null {
  let min = Infinity;
  let max = -Infinity;
  for (const point of points) {
    for (const spec of specs) {
      const v = spec.value(point);
      if (v === undefined || !Number.isFinite(v)) continue;
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (min > max) return null;
  if (min === max) {
    // flat series: pad so the line sits mid-chart
    const pad = Math.abs(min) > 1e-12 ? Math.abs(min) * 0.1 : 1;
    return { min: min - pad, max: max + pad };
  }
  return { min, max };
}

const PAD = { left: 8, right: 8, top: 8, bottom: 8 };

export interface ChartPoint {
  x: number;
  y: number;
}

/** Map one series to screen coordinates (x spaced by tick order). */
export function buildPolyline(
  points: TrendPoint[],
  spec: SeriesSpec,
  extent: Extent,
  opts: ChartOptions,
): ChartPoint[] {
  const innerW = opts.width - PAD.left - PAD.right;
  const innerH = opts.height - PAD.top - PAD.bottom;
  const span = Math.max(points.length - 1, 1);
  const out: ChartPoint[] = [];
  points.forEach((point, i) => {
    const v = spec.value(point);
    if (v === undefined || !Number.isFinite(v)) return;
    const t = (v - extent.min) / (extent.max - extent.min);
    out.push({
      x: PAD.left + (i / span) * innerW,
      y: PAD.top + (1 - t) * innerH,
    });
  });
  return out;
}

export function drawTrend(
  ctx: Canvas2DLike,
  points: TrendPoint[],
  specs: SeriesSpec[],
  opts: ChartOptions,
): void {
  ctx.clearRect(0, 0, opts.width, opts.height);
  const extent = opts.yRange
    ? { min: opts.yRange[0], max: opts.yRange[1] }
    : extentOf(points, specs);
  if (!extent || points.length === 0) {
    ctx.fillStyle = '#94a3b8';
    ctx.font = '11px system-ui';
    ctx.fillText('waiting for frames…', PAD.left, opts.height / 2);
    return;
  }

  for (const spec of specs) {
    const line = buildPolyline(points, spec, extent, opts);
    if (line.length === 0) continue;
    ctx.beginPath();
    ctx.setLineDash(spec.dashed ? [4, 3] : []);
    ctx.moveTo(line[0].x, line[0].y);
    for (let i = 1; i < line.length; i++) ctx.lineTo(line[i].x, line[i].y);
    ctx.strokeStyle = spec.color;
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.fillStyle = '#475569';
  ctx.font = '10px system-ui';
  ctx.fillText(formatValue(extent.max), PAD.left, PAD.top + 8);
  ctx.fillText(formatValue(extent.min), PAD.left, opts.height - PAD.bottom);
}

function formatValue(v: number): string {
  if (Math.abs(v) >= 1000) return v.toFixed(0);
  if (Math.abs(v) >= 10) return v.toFixed(1);
  return v.toFixed(3);
}
