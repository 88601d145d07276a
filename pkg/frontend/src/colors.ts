// One color per priority class, cool for low priority and warm for high:
// C11 (wide/wide) blue -> C12 teal -> C21 amber -> C22 (main/main) red.

import type { ClassLabel, CoverageLevel } from './types.js';

export const CLASS_COLORS: Record<ClassLabel, string> = {
  C11: '#3b82f6',
  C12: '#14b8a6',
  C21: '#f59e0b',
  C22: '#ef4444',
};

export const EXCLUDED_COLOR = 'rgba(148, 163, 184, 0.45)';
export const VIEWER_COLOR = '#111827';
export const ROOM_COLOR = '#94a3b8';
export const MAIN_WEDGE_FILL = 'rgba(239, 68, 68, 0.10)';
export const WIDE_WEDGE_FILL = 'rgba(59, 130, 246, 0.08)';
export const BUDGET_COLOR = '#111827';
export const BANDWIDTH_COLOR = '#7c3aed';
export const QUALITY_COLOR = '#0f766e';

export function classColor(label: string): string {
  return (CLASS_COLORS as Record<string, string>)[label] ?? EXCLUDED_COLOR;
}

/** Participant dot color by first-level coverage (excluded bodies are dimmed). */
export function coverageColor(level: CoverageLevel): string {
  switch (level) {
    case 'main':
      return CLASS_COLORS.C22;
    case 'wide':
      return CLASS_COLORS.C11;
    case 'excluded':
      return EXCLUDED_COLOR;
  }
}

/** '#rrggbb' -> [r, g, b] in 0..255. */
export function hexToRgb(hex: string): [number, number, number] {
  const m = /^#([0-9a-f]{6})$/i.exec(hex);
  if (!m) throw new Error(`expected #rrggbb, got ${hex}`);
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

export function withAlpha(hex: string, alpha: number): string {
  const [r, g, b] = hexToRgb(hex);
  return `rgba(${r}, ${g}, ${b}, ${alpha})`;
}
