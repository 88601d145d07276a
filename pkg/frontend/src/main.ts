// Application entry point: create a session against the service, stream its
// frames, and keep the scene canvas, trend charts, stream table, and steering
// panel in sync. All numbers shown here come from the service; the UI does
// not recompute priorities or budgets.

import { FrameStream, SimClient } from './client.js';
import {
  BANDWIDTH_COLOR,
  BUDGET_COLOR,
  CLASS_COLORS,
  QUALITY_COLOR,
  classColor,
} from './colors.js';
import { drawTrend, type SeriesSpec } from './charts.js';
import { ControlPanel } from './controls.js';
import { drawScene } from './render.js';
import { SessionView } from './state.js';
import { CLASS_LABELS, type Frame } from './types.js';

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const sceneCanvas = $<HTMLCanvasElement>('scene');
const ratioCanvas = $<HTMLCanvasElement>('ratio-chart');
const bandwidthCanvas = $<HTMLCanvasElement>('bandwidth-chart');
const streamTable = $<HTMLTableSectionElement>('stream-rows');
const statsBox = $<HTMLElement>('stats');
const connectionBadge = $<HTMLElement>('connection');

const ratioSeries: SeriesSpec[] = [
  { label: 'overall', color: QUALITY_COLOR, value: (p) => p.adaptationRatio },
  ...CLASS_LABELS.map((label) => ({
    label,
    color: CLASS_COLORS[label],
    dashed: true,
    value: (p: { perClass: Partial<Record<string, number>> }) => p.perClass[label],
  })),
];

const bandwidthSeries: SeriesSpec[] = [
  { label: 'used', color: BANDWIDTH_COLOR, value: (p) => p.totalBandwidth },
  { label: 'budget', color: BUDGET_COLOR, dashed: true, value: (p) => p.budget },
];

function renderStreamTable(frame: Frame): void {
  const rows = [...frame.streams]
    .sort((a, b) => b.priority - a.priority || a.site - b.site || a.camera - b.camera)
    .slice(0, 40);
  streamTable.innerHTML = rows
    .map(
      (s) => `<tr>
        <td>${s.site}/${s.camera}</td>
        <td><span class="swatch" style="background:${classColor(s.class)}"></span>${s.class}</td>
        <td>${s.priority.toFixed(0)}</td>
        <td>${s.full_mbps.toFixed(2)}</td>
        <td>${s.adapted_mbps.toFixed(2)}</td>
        <td>${s.factor.toFixed(3)}</td>
      </tr>`,
    )
    .join('');
}

function renderStats(frame: Frame): void {
  const t = frame.totals;
  statsBox.innerHTML = `
    <div><strong>tick</strong> ${frame.tick}</div>
    <div><strong>algorithm</strong> ${frame.algorithm}</div>
    <div><strong>streams</strong> ${frame.streams.length}</div>
    <div><strong>budget</strong> ${t.budget_mbps.toFixed(1)} Mbps</div>
    <div><strong>used</strong> ${t.total_bandwidth_mbps.toFixed(1)} Mbps</div>
    <div><strong>quality ratio</strong> ${t.adaptation_ratio.toFixed(4)}</div>
    ${frame.infeasible ? '<div class="warn">infeasible budget — ladder floor everywhere</div>' : ''}
  `;
}

async function boot(): Promise<void> {
  const apiBase = $<HTMLInputElement>('api-base').value.trim();
  const client = new SimClient(apiBase);
  const created = await client.createSession({
    seed: Number($<HTMLInputElement>('seed').value) || 0,
    n_participants: Number($<HTMLInputElement>('participants').value) || 10,
    cameras_per_site: Number($<HTMLInputElement>('cameras').value) || 10,
    budget_fraction: 0.5,
  });
  const sessionId = created.session_id;
  const params = await client.params(sessionId);
  const camerasPerSite = Number($<HTMLInputElement>('cameras').value) || 10;

  const view = new SessionView();
  const panel = new ControlPanel(
    {
      budget: $<HTMLInputElement>('budget'),
      algorithm: $<HTMLSelectElement>('algorithm'),
      facing: $<HTMLSelectElement>('facing'),
      rotateLeft: $<HTMLButtonElement>('rotate-left'),
      rotateRight: $<HTMLButtonElement>('rotate-right'),
      flip: $<HTMLButtonElement>('flip'),
      halveBudget: $<HTMLButtonElement>('halve-budget'),
      status: $<HTMLElement>('patch-status'),
    },
    client,
    view,
    sessionId,
  );

  const onFrame = (frame: Frame): void => {
    if (!view.applyFrame(frame)) return;
    const ctx = sceneCanvas.getContext('2d');
    if (ctx) {
      drawScene(ctx, frame, {
        width: sceneCanvas.width,
        height: sceneCanvas.height,
        roomDiameter: params.room_diameter,
        camerasPerSite,
      });
    }
    const points = view.trend.values();
    const ratioCtx = ratioCanvas.getContext('2d');
    if (ratioCtx) {
      drawTrend(ratioCtx, points, ratioSeries, {
        width: ratioCanvas.width,
        height: ratioCanvas.height,
        yRange: [0, 1.02],
      });
    }
    const bwCtx = bandwidthCanvas.getContext('2d');
    if (bwCtx) {
      drawTrend(bwCtx, points, bandwidthSeries, {
        width: bandwidthCanvas.width,
        height: bandwidthCanvas.height,
      });
    }
    renderStreamTable(frame);
    renderStats(frame);
    panel.refresh(frame);
  };

  onFrame(created.frame);
  const stream = new FrameStream(client, sessionId, {
    onFrame,
    onStatus: (status) => {
      connectionBadge.textContent = status;
      connectionBadge.className = `badge badge-${status}`;
    },
  });
  stream.start();

  $<HTMLButtonElement>('resume').addEventListener('click', () => void client.resume(sessionId));
  $<HTMLButtonElement>('pause').addEventListener('click', () => void client.pause(sessionId));
  $<HTMLButtonElement>('step').addEventListener('click', () => {
    void client.step(sessionId, 1).then(onFrame);
  });
  $<HTMLButtonElement>('export-replay').addEventListener('click', () => {
    void client.replay(sessionId).then((replay) => {
      const blob = new Blob([JSON.stringify(replay, null, 2)], { type: 'application/json' });
      const link = document.createElement('a');
      link.href = URL.createObjectURL(blob);
      link.download = `replay-${sessionId}.json`;
      link.click();
      URL.revokeObjectURL(link.href);
    });
  });
  window.addEventListener('beforeunload', () => stream.stop());
}

$<HTMLButtonElement>('connect').addEventListener('click', () => {
  boot().catch((err) => {
    connectionBadge.textContent = err instanceof Error ? err.message : String(err);
    connectionBadge.className = 'badge badge-error';
  });
});
