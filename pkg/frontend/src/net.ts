// Bridge client: reconnecting WebSocket, newest-frame coalescing, ordered
// application of state frames, and rate-limited outbound messages.

import { parseServerFrame, type ErrorFrame, type InboundMsg, type StateFrame } from "./types.js";

export interface ClientEvents {
  onState: (frame: StateFrame) => void;
  onError?: (frame: ErrorFrame) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
}

/** Keeps only the newest state frame and never applies one out of order. */
export class FrameCoalescer {
  private pending: StateFrame | null = null;
  private lastApplied = -Infinity;

  push(frame: StateFrame): void {
    if (this.pending === null || frame.t >= this.pending.t) {
      this.pending = frame;
    }
  }

  /** The newest unapplied frame, or null; frames older than the last applied are dropped. */
  take(): StateFrame | null {
    const frame = this.pending;
    this.pending = null;
    if (frame === null) return null;
    if (frame.t < this.lastApplied) return null;
    this.lastApplied = frame.t;
    return frame;
  }

  reset(): void {
    this.pending = null;
    this.lastApplied = -Infinity;
  }
}

/** Drops calls closer together than minIntervalMs (leading edge passes). */
export class RateLimiter {
  private last = -Infinity;
  constructor(private minIntervalMs: number, private now: () => number = () => performance.now()) {}

  ready(): boolean {
    const t = this.now();
    if (t - this.last >= this.minIntervalMs) {
      this.last = t;
      return true;
    }
    return false;
  }
}

export class BridgeClient {
  readonly frames = new FrameCoalescer();
  private ws: WebSocket | null = null;
  private backoffMs = 250;
  private closed = false;
  latencyMs: number | null = null; // input send -> next frame receive, measured
  private lastSendWall: number | null = null;

  constructor(private url: string, private events: ClientEvents) {}

  connect(): void {
    this.closed = false;
    this.events.onStatus?.("connecting");
    try {
      this.ws = new WebSocket(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.ws.onopen = () => {
      this.backoffMs = 250;
      this.frames.reset();
      this.events.onStatus?.("open");
    };
    this.ws.onmessage = (ev: MessageEvent) => {
      const frame = parseServerFrame(String(ev.data));
      if (!frame) return;
      if (frame.kind === "state") {
        if (this.lastSendWall !== null) {
          this.latencyMs = performance.now() - this.lastSendWall;
          this.lastSendWall = null;
        }
        this.frames.push(frame);
        this.events.onState(frame);
      } else {
        this.events.onError?.(frame);
      }
    };
    this.ws.onclose = () => {
      this.events.onStatus?.("closed");
      if (!this.closed) this.scheduleReconnect();
    };
    this.ws.onerror = () => {
      this.ws?.close();
    };
  }

  private scheduleReconnect(): void {
    const wait = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, 5000);
    setTimeout(() => {
      if (!this.closed) this.connect();
    }, wait);
  }

  send(msg: InboundMsg): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      if (msg.kind === "hand_pose") this.lastSendWall = performance.now();
      this.ws.send(JSON.stringify(msg));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
