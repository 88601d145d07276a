// HTTP + streaming client for the session service. The UI never computes
// priorities or budgets itself; everything it shows comes back over the wire.

import type {
  CreateSessionRequest,
  CreateSessionResponse,
  Frame,
  PatchTicket,
  ReplayExport,
  SessionParams,
  SessionPatch,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let code = 'http_error';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    const detail = body?.detail;
    if (detail && typeof detail === 'object') {
      if (typeof detail.code === 'string') code = detail.code;
      if (typeof detail.message === 'string') message = detail.message;
    } else if (Array.isArray(detail)) {
      code = 'validation_error';
      message = detail.map((d) => d?.msg ?? '').join('; ');
    }
  } catch {
    // non-JSON body: keep the status line
  }
  return new ApiError(response.status, code, message);
}

export class SimClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { 'content-type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await toApiError(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/healthz');
  }

  createSession(config: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request('POST', '/sessions', config);
  }

  params(sessionId: string): Promise<SessionParams> {
    return this.request('GET', `/sessions/${sessionId}`);
  }

  patch(sessionId: string, patch: SessionPatch): Promise<PatchTicket> {
    return this.request('PATCH', `/sessions/${sessionId}`, patch);
  }

  step(sessionId: string, n = 1): Promise<Frame> {
    return this.request('POST', `/sessions/${sessionId}/step`, { n });
  }

  pause(sessionId: string): Promise<SessionParams> {
    return this.request('POST', `/sessions/${sessionId}/pause`);
  }

  resume(sessionId: string): Promise<SessionParams> {
    return this.request('POST', `/sessions/${sessionId}/resume`);
  }

  frame(sessionId: string): Promise<Frame> {
    return this.request('GET', `/sessions/${sessionId}/frame`);
  }

  replay(sessionId: string): Promise<ReplayExport> {
    return this.request('GET', `/sessions/${sessionId}/replay`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request('DELETE', `/sessions/${sessionId}`);
  }

  streamUrl(sessionId: string): string {
    return `${this.baseUrl.replace(/^http/, 'ws')}/sessions/${sessionId}/stream`;
  }
}

// ---------------------------------------------------------------------------
// live frame stream: WebSocket when available, HTTP polling otherwise

export type StreamStatus = 'connecting' | 'streaming' | 'polling' | 'closed';

export interface StreamHandlers {
  onFrame(frame: Frame): void;
  onStatus?(status: StreamStatus): void;
}

// Structural subset of the browser WebSocket; tests inject fakes.
export interface FrameSocket {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => FrameSocket;

function defaultSocketFactory(url: string): FrameSocket {
  const ctor = (globalThis as { WebSocket?: new (url: string) => FrameSocket }).WebSocket;
  if (!ctor) throw new Error('WebSocket is not available in this runtime');
  return new ctor(url);
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Delivers session frames in tick order, deduplicated, until stop(). Prefers
 * the WebSocket endpoint; if the socket cannot be opened (or dies before the
 * first frame) it degrades to polling the frame endpoint.
 */
export class FrameStream {
  private socket: FrameSocket | null = null;
  private stopped = false;
  private lastTick = -1;
  private sawFrame = false;
  private readonly pollIntervalMs: number;
  private readonly socketFactory: SocketFactory;

  constructor(
    private readonly client: SimClient,
    private readonly sessionId: string,
    private readonly handlers: StreamHandlers,
    options: { socketFactory?: SocketFactory; pollIntervalMs?: number } = {},
  ) {
    this.socketFactory = options.socketFactory ?? defaultSocketFactory;
    this.pollIntervalMs = options.pollIntervalMs ?? 100;
  }

  start(): void {
    this.setStatus('connecting');
    let socket: FrameSocket;
    try {
      socket = this.socketFactory(this.client.streamUrl(this.sessionId));
    } catch {
      void this.pollLoop();
      return;
    }
    this.socket = socket;
    socket.onopen = () => this.setStatus('streaming');
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onerror = () => this.degrade();
    socket.onclose = () => this.degrade();
  }

  stop(): void {
    this.stopped = true;
    if (this.socket) {
      const socket = this.socket;
      this.socket = null;
      socket.onclose = null;
      socket.onerror = null;
      socket.close();
    }
    this.setStatus('closed');
  }

  private handleMessage(data: string): void {
    let frame: Frame;
    try {
      frame = JSON.parse(data) as Frame;
    } catch {
      return; // ignore malformed messages
    }
    if (typeof frame?.tick !== 'number') return;
    this.emit(frame);
  }

  private emit(frame: Frame): void {
    if (this.stopped || frame.tick <= this.lastTick) return;
    this.lastTick = frame.tick;
    this.sawFrame = true;
    this.handlers.onFrame(frame);
  }

  // A dead socket that never produced a frame usually means the runtime has
  // no usable WebSocket (or a proxy in the way); polling still works there.
  private degrade(): void {
    if (this.stopped) return;
    if (this.socket) {
      this.socket.onclose = null;
      this.socket.onerror = null;
      this.socket = null;
    }
    if (!this.sawFrame) {
      void this.pollLoop();
    } else {
      this.setStatus('closed');
    }
  }

  private async pollLoop(): Promise<void> {
    this.setStatus('polling');
    while (!this.stopped) {
      try {
        this.emit(await this.client.frame(this.sessionId));
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) break; // session gone
      }
      await sleep(this.pollIntervalMs);
    }
  }

  private setStatus(status: StreamStatus): void {
    this.handlers.onStatus?.(status);
  }
}
