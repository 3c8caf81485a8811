/**
 * Client-side session state: the latest validated snapshot, bounded history
 * for the strip charts, and connection/staleness bookkeeping. No physics
 * happens here; every displayed number comes verbatim from telemetry.
 */

import { HelloMessage, StateMessage, asHello, asState } from "./protocol.js";

export type ConnectionStatus = "connecting" | "live" | "stale" | "disconnected";

/** Fixed-capacity series; appending past capacity drops the oldest sample. */
export class RingBuffer {
  private values: Float64Array;
  private start = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    this.values = new Float64Array(capacity);
  }

  push(value: number) {
    const end = (this.start + this.count) % this.capacity;
    this.values[end] = value;
    if (this.count < this.capacity) {
      this.count += 1;
    } else {
      this.start = (this.start + 1) % this.capacity;
    }
  }

  get length(): number {
    return this.count;
  }

  toArray(): number[] {
    const out = new Array<number>(this.count);
    for (let i = 0; i < this.count; i++) {
      out[i] = this.values[(this.start + i) % this.capacity];
    }
    return out;
  }

  last(): number | undefined {
    if (this.count === 0) return undefined;
    return this.values[(this.start + this.count - 1) % this.capacity];
  }
}

export const STALE_AFTER_MS = 1000;

export class SceneState {
  hello: HelloMessage | null = null;
  snapshot: StateMessage | null = null;
  status: ConnectionStatus = "connecting";
  droppedMessages = 0;
  private lastStateAt = 0;

  readonly history = {
    t: new RingBuffer(2048),
    xcNorm: new RingBuffer(2048),
    minDistance: new RingBuffer(2048),
    energy: new RingBuffer(2048),
  };

  /** Apply one decoded server message; returns its recognized type. */
  apply(message: unknown, nowMs: number): "hello" | "state" | "other" | "dropped" {
    const hello = asHello(message);
    if (hello) {
      this.hello = hello;
      return "hello";
    }
    const state = asState(message);
    if (state) {
      this.snapshot = state;
      this.lastStateAt = nowMs;
      this.status = "live";
      this.history.t.push(state.t);
      this.history.xcNorm.push(state.xc_norm);
      this.history.minDistance.push(state.min_distance);
      this.history.energy.push(state.energy);
      return "state";
    }
    const type = (message as { type?: string })?.type;
    if (type === "report") return "other";
    this.droppedMessages += 1;
    return "dropped";
  }

  /** Refresh staleness from the wall clock; stale data grays the scene. */
  tick(nowMs: number) {
    if (this.status === "live" && nowMs - this.lastStateAt > STALE_AFTER_MS) {
      this.status = "stale";
    }
  }

  markDisconnected() {
    this.status = "disconnected";
  }

  markConnecting() {
    this.status = "connecting";
  }
}
