// Shared test fixtures: frame factories and a recording canvas context.

import type { Canvas2DLike } from '../src/render.js';
import type { Frame, ParticipantView, StreamRow } from '../src/types.js';

export function makeFrame(overrides: Partial<Frame> = {}): Frame {
  return {
    tick: 0,
    algorithm: 'compromise',
    infeasible: false,
    viewer: { x: -2.5, y: 0, heading_deg: 0, main_fov_deg: 60, wide_fov_deg: 180 },
    participants: [],
    streams: [],
    totals: {
      full_bandwidth_mbps: 0,
      budget_mbps: 100,
      minimum_budget_mbps: 0,
      total_bandwidth_mbps: 0,
      quality_before: 0,
      total_quality: 0,
      adaptation_ratio: 1,
      per_class_ratio: {},
    },
    ...overrides,
  };
}

export function makeParticipant(overrides: Partial<ParticipantView> = {}): ParticipantView {
  return { id: 0, x: 1, y: 0, heading_deg: 180, first_level: 'main', ...overrides };
}

export function makeStream(overrides: Partial<StreamRow> = {}): StreamRow {
  return {
    site: 0,
    camera: 0,
    class: 'C22',
    priority: 4,
    full_mbps: 10,
    adapted_mbps: 10,
    factor: 1,
    ...overrides,
  };
}

export interface DrawOp {
  op: string;
  args: (number | string | number[])[];
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
}

/** Canvas context stub that records every call with the style at call time. */
export class RecordingContext implements Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern = '#000';
  strokeStyle: string | CanvasGradient | CanvasPattern = '#000';
  lineWidth = 1;
  globalAlpha = 1;
  font = '';
  readonly ops: DrawOp[] = [];

  private record(op: string, ...args: (number | string | number[])[]): void {
    this.ops.push({
      op,
      args,
      fillStyle: String(this.fillStyle),
      strokeStyle: String(this.strokeStyle),
      lineWidth: this.lineWidth,
      globalAlpha: this.globalAlpha,
    });
  }

  beginPath(): void {
    this.record('beginPath');
  }
  arc(x: number, y: number, radius: number, start: number, end: number): void {
    this.record('arc', x, y, radius, start, end);
  }
  moveTo(x: number, y: number): void {
    this.record('moveTo', x, y);
  }
  lineTo(x: number, y: number): void {
    this.record('lineTo', x, y);
  }
  closePath(): void {
    this.record('closePath');
  }
  stroke(): void {
    this.record('stroke');
  }
  fill(): void {
    this.record('fill');
  }
  clearRect(x: number, y: number, w: number, h: number): void {
    this.record('clearRect', x, y, w, h);
  }
  fillText(text: string, x: number, y: number): void {
    this.record('fillText', text, x, y);
  }
  setLineDash(segments: number[]): void {
    this.record('setLineDash', segments);
  }

  calls(op: string): DrawOp[] {
    return this.ops.filter((o) => o.op === op);
  }
}
