// Client-side session state: the latest frame, a bounded trend window for
// the charts, and acknowledgement tracking for queued parameter patches.

import type { ClassLabel, Frame, PatchTicket } from './types.js';

/** Fixed-capacity FIFO; pushing beyond capacity drops the oldest entry. */
export class RingBuffer<T> {
  private items: T[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity <= 0) {
      throw new RangeError(`capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.items.length - this.start;
  }

  push(value: T): void {
    this.items.push(value);
    if (this.length > this.capacity) {
      this.start += 1;
      // compact occasionally so the backing array stays bounded
      if (this.start > this.capacity) {
        this.items = this.items.slice(this.start);
        this.start = 0;
      }
    }
  }

  last(): T | undefined {
    return this.length ? this.items[this.items.length - 1] : undefined;
  }

  values(): T[] {
    return this.items.slice(this.start);
  }

  clear(): void {
    this.items = [];
    this.start = 0;
  }
}

export interface TrendPoint {
  tick: number;
  totalQuality: number;
  adaptationRatio: number;
  totalBandwidth: number;
  budget: number;
  infeasible: boolean;
  perClass: Partial<Record<ClassLabel, number>>;
}

export function toTrendPoint(frame: Frame): TrendPoint {
  return {
    tick: frame.tick,
    totalQuality: frame.totals.total_quality,
    adaptationRatio: frame.totals.adaptation_ratio,
    totalBandwidth: frame.totals.total_bandwidth_mbps,
    budget: frame.totals.budget_mbps,
    infeasible: frame.infeasible,
    perClass: { ...frame.totals.per_class_ratio },
  };
}

/** How many ticks of history the charts keep. */
export const TREND_WINDOW = 600;

/**
 * Mirror of one server session as seen by the UI. Frames may arrive from the
 * socket and from manual steps interleaved; stale or repeated ticks are
 * dropped. Steering stays locked between sending a patch and seeing the
 * frame of the tick it was applied at.
 */
export class SessionView {
  readonly trend = new RingBuffer<TrendPoint>(TREND_WINDOW);
  latest: Frame | null = null;
  private tickets: PatchTicket[] = [];

  applyFrame(frame: Frame): boolean {
    if (this.latest !== null && frame.tick <= this.latest.tick) return false;
    this.latest = frame;
    this.trend.push(toTrendPoint(frame));
    this.tickets = this.tickets.filter((t) => t.applied_at_tick > frame.tick);
    return true;
  }

  notePatch(ticket: PatchTicket): void {
    this.tickets.push(ticket);
  }

  get acknowledgedTick(): number {
    return this.latest?.tick ?? -1;
  }

  /** True while any sent patch has not yet been reflected in a frame. */
  get steeringLocked(): boolean {
    return this.tickets.length > 0;
  }

  get pendingCount(): number {
    return this.tickets.length;
  }

  reset(): void {
    this.trend.clear();
    this.latest = null;
    this.tickets = [];
  }
}
