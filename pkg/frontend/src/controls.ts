// Steering panel. Every control sends a PATCH; the service applies queued
// patches at the next tick boundary, so the panel locks itself between
// sending a patch and seeing the frame that acknowledges it. The displayed
// values always reflect the acknowledged state, never the optimistic one.

import type { SimClient } from './client.js';
import type { SessionView } from './state.js';
import type { AlgorithmName, FacingPolicy, Frame, SessionPatch } from './types.js';

export interface ControlElements {
  budget: HTMLInputElement;
  algorithm: HTMLSelectElement;
  facing: HTMLSelectElement;
  rotateLeft: HTMLButtonElement;
  rotateRight: HTMLButtonElement;
  flip: HTMLButtonElement;
  halveBudget: HTMLButtonElement;
  status: HTMLElement;
}

const STEER_CONTROLS: (keyof ControlElements)[] = [
  'budget', 'algorithm', 'facing', 'rotateLeft', 'rotateRight', 'flip', 'halveBudget',
];

export class ControlPanel {
  private lastError = '';

  constructor(
    private readonly els: ControlElements,
    private readonly client: SimClient,
    private readonly view: SessionView,
    private readonly sessionId: string,
  ) {
    els.algorithm.addEventListener('change', () => {
      void this.send({ algorithm: els.algorithm.value as AlgorithmName });
    });
    els.facing.addEventListener('change', () => {
      void this.send({ facing: els.facing.value as FacingPolicy });
    });
    els.budget.addEventListener('change', () => {
      const mbps = Number(els.budget.value);
      if (Number.isFinite(mbps) && mbps > 0) void this.send({ budget_mbps: mbps });
    });
    els.halveBudget.addEventListener('click', () => {
      const current = this.view.latest?.totals.budget_mbps;
      if (current) void this.send({ budget_mbps: current / 2 });
    });
    els.rotateLeft.addEventListener('click', () => this.rotate(15));
    els.rotateRight.addEventListener('click', () => this.rotate(-15));
    els.flip.addEventListener('click', () => this.rotate(180));
  }

  private rotate(deltaDeg: number): void {
    const heading = this.view.latest?.viewer.heading_deg;
    if (heading === undefined) return;
    void this.send({ viewer: { heading_deg: heading + deltaDeg } });
  }

  private async send(patch: SessionPatch): Promise<void> {
    if (this.view.steeringLocked) return;
    try {
      this.view.notePatch(await this.client.patch(this.sessionId, patch));
      this.lastError = '';
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
    }
    this.refresh();
  }

  /** Call on every new frame: unlock if acknowledged, show server values. */
  refresh(frame?: Frame): void {
    const locked = this.view.steeringLocked;
    for (const key of STEER_CONTROLS) {
      (this.els[key] as HTMLInputElement | HTMLButtonElement | HTMLSelectElement).disabled = locked;
    }
    const latest = frame ?? this.view.latest ?? undefined;
    if (latest && !locked) {
      this.els.algorithm.value = latest.algorithm;
      if (document.activeElement !== this.els.budget) {
        this.els.budget.value = latest.totals.budget_mbps.toFixed(1);
      }
    }
    if (this.lastError) {
      this.els.status.textContent = `rejected: ${this.lastError}`;
    } else if (locked) {
      this.els.status.textContent = `waiting for tick ${this.view.acknowledgedTick + 1}…`;
    } else {
      this.els.status.textContent = `tick ${this.view.acknowledgedTick}`;
    }
  }
}
