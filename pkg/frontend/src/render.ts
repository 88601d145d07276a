// Canvas rendering of one frame: room boundary, viewer FOV wedges,
// participants colored by first-level coverage, and one tick per visible
// camera stream colored by its priority class.

import {
  classColor,
  coverageColor,
  EXCLUDED_COLOR,
  MAIN_WEDGE_FILL,
  ROOM_COLOR,
  VIEWER_COLOR,
  WIDE_WEDGE_FILL,
} from './colors.js';
import type { Frame, ParticipantView } from './types.js';

// Structural subset of CanvasRenderingContext2D — enough for the scene and
// charts, and easy to satisfy with a recording stub in tests.
export interface Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  beginPath(): void;
  arc(x: number, y: number, radius: number, start: number, end: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

export interface Projection {
  toX(worldX: number): number;
  toY(worldY: number): number;
  scale: number;
  centerX: number;
  centerY: number;
}

/**
 * World-to-screen mapping for a room centered on the origin. World +y points
 * up, screen +y points down, so screen angles are negated world angles.
 */
export function makeProjection(
  roomDiameter: number,
  width: number,
  height: number,
  margin = 20,
): Projection {
  const scale = (Math.min(width, height) - 2 * margin) / roomDiameter;
  const centerX = width / 2;
  const centerY = height / 2;
  return {
    toX: (worldX) => centerX + worldX * scale,
    toY: (worldY) => centerY - worldY * scale,
    scale,
    centerX,
    centerY,
  };
}

/** World direction of camera `camera` on a ring of `camerasPerSite`, relative to the site heading. */
export function ringAngleRad(camera: number, camerasPerSite: number): number {
  return (2 * Math.PI * camera) / camerasPerSite;
}

export interface SceneOptions {
  width: number;
  height: number;
  roomDiameter: number;
  camerasPerSite: number;
}

const DOT_RADIUS_M = 0.22;
const HEADING_TICK_M = 0.5;
const CAMERA_TICK_INNER_M = 0.3;
const CAMERA_TICK_OUTER_M = 0.6;

function drawWedge(
  ctx: Canvas2DLike,
  proj: Projection,
  x: number,
  y: number,
  headingRad: number,
  halfAngleRad: number,
  radiusM: number,
  fill: string,
): void {
  const sx = proj.toX(x);
  const sy = proj.toY(y);
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  // screen angle = -world angle; sweep from heading+half down to heading-half
  ctx.arc(sx, sy, radiusM * proj.scale, -(headingRad + halfAngleRad), -(headingRad - halfAngleRad));
  ctx.closePath();
  ctx.fillStyle = fill;
  ctx.fill();
}

function drawParticipant(
  ctx: Canvas2DLike,
  proj: Projection,
  part: ParticipantView,
): void {
  const sx = proj.toX(part.x);
  const sy = proj.toY(part.y);
  const r = Math.max(DOT_RADIUS_M * proj.scale, 3);
  ctx.beginPath();
  ctx.arc(sx, sy, r, 0, 2 * Math.PI);
  ctx.fillStyle = coverageColor(part.first_level);
  ctx.fill();
  const heading = (part.heading_deg * Math.PI) / 180;
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  ctx.lineTo(
    proj.toX(part.x + HEADING_TICK_M * Math.cos(heading)),
    proj.toY(part.y + HEADING_TICK_M * Math.sin(heading)),
  );
  ctx.strokeStyle = part.first_level === 'excluded' ? EXCLUDED_COLOR : VIEWER_COLOR;
  ctx.lineWidth = 1.5;
  ctx.stroke();
  ctx.fillStyle = VIEWER_COLOR;
  ctx.font = '11px system-ui';
  ctx.fillText(String(part.id), sx + r + 2, sy - r - 2);
}

export function drawScene(ctx: Canvas2DLike, frame: Frame, opts: SceneOptions): void {
  const proj = makeProjection(opts.roomDiameter, opts.width, opts.height);
  ctx.clearRect(0, 0, opts.width, opts.height);

  // room boundary
  ctx.beginPath();
  ctx.arc(proj.centerX, proj.centerY, (opts.roomDiameter / 2) * proj.scale, 0, 2 * Math.PI);
  ctx.strokeStyle = ROOM_COLOR;
  ctx.lineWidth = 1.5;
  ctx.stroke();

  // viewer FOV wedges (wide below main)
  const viewer = frame.viewer;
  const headingRad = (viewer.heading_deg * Math.PI) / 180;
  drawWedge(
    ctx, proj, viewer.x, viewer.y, headingRad,
    ((viewer.wide_fov_deg / 2) * Math.PI) / 180, opts.roomDiameter, WIDE_WEDGE_FILL,
  );
  drawWedge(
    ctx, proj, viewer.x, viewer.y, headingRad,
    ((viewer.main_fov_deg / 2) * Math.PI) / 180, opts.roomDiameter, MAIN_WEDGE_FILL,
  );

  // camera ticks, colored by class, faded by reduction factor
  const bySite = new Map<number, ParticipantView>();
  for (const part of frame.participants) bySite.set(part.id, part);
  for (const stream of frame.streams) {
    const part = bySite.get(stream.site);
    if (!part) continue;
    const dir = (part.heading_deg * Math.PI) / 180 + ringAngleRad(stream.camera, opts.camerasPerSite);
    ctx.beginPath();
    ctx.moveTo(
      proj.toX(part.x + CAMERA_TICK_INNER_M * Math.cos(dir)),
      proj.toY(part.y + CAMERA_TICK_INNER_M * Math.sin(dir)),
    );
    ctx.lineTo(
      proj.toX(part.x + CAMERA_TICK_OUTER_M * Math.cos(dir)),
      proj.toY(part.y + CAMERA_TICK_OUTER_M * Math.sin(dir)),
    );
    ctx.strokeStyle = classColor(stream.class);
    ctx.lineWidth = 2;
    ctx.globalAlpha = 0.35 + 0.65 * stream.factor;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }

  for (const part of frame.participants) drawParticipant(ctx, proj, part);

  // viewer marker: triangle pointing along the heading
  const vx = proj.toX(viewer.x);
  const vy = proj.toY(viewer.y);
  const size = Math.max(0.3 * proj.scale, 6);
  ctx.beginPath();
  ctx.moveTo(vx + size * Math.cos(-headingRad), vy + size * Math.sin(-headingRad));
  ctx.lineTo(
    vx + 0.6 * size * Math.cos(-headingRad + (2.5 * Math.PI) / 3),
    vy + 0.6 * size * Math.sin(-headingRad + (2.5 * Math.PI) / 3),
  );
  ctx.lineTo(
    vx + 0.6 * size * Math.cos(-headingRad - (2.5 * Math.PI) / 3),
    vy + 0.6 * size * Math.sin(-headingRad - (2.5 * Math.PI) / 3),
  );
  ctx.closePath();
  ctx.fillStyle = VIEWER_COLOR;
  ctx.fill();

  if (frame.infeasible) {
    ctx.fillStyle = classColor('C22');
    ctx.font = 'bold 13px system-ui';
    ctx.fillText('infeasible budget — every stream pinned to the ladder floor', 10, 18);
  }
}
