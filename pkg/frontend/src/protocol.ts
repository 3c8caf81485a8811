/**
 * Telemetry wire protocol: 4-byte big-endian length prefix + UTF-8 JSON.
 *
 * The simulation server speaks this framing over a local TCP socket. The
 * browser reaches it through the bridge, which translates frames to
 * WebSocket text messages; both ends share the message shapes below.
 */

export interface HelloMessage {
  type: "hello";
  mode: "tip" | "capsule";
  d_c: number;
  d_0: number;
  d_c_eff: number;
  influence_radius: number;
  tool_length: number;
  tool_radius: number;
  p_c: [number, number, number];
  dt: number;
  decimate: number;
  duration: number;
  points: [number, number, number][];
  context_points?: [number, number, number][];
}

export interface StateMessage {
  type: "state";
  t: number;
  p_t: [number, number, number];
  tool_base: [number, number, number];
  p_e: [number, number, number];
  p_c: [number, number, number];
  xc_norm: number;
  min_distance: number;
  active_count: number;
  F_h: number[];
  F_r: number[];
  D_f: number[];
  energy: number;
  input_power: number;
}

export interface ReportMessage {
  type: "report";
  report: {
    criteria: Record<string, { value: number | null; threshold: number; passed: boolean }>;
    fault_events: unknown[];
    passed: boolean;
  };
}

export type ServerMessage = HelloMessage | StateMessage | ReportMessage;

export interface WrenchCommand {
  type: "wrench";
  force: [number, number, number];
  torque: [number, number, number];
}

export type ClientCommand =
  | WrenchCommand
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" };

const MAX_MESSAGE = 16 * 1024 * 1024;

export function encodeFrame(message: unknown): Uint8Array {
  const payload = new TextEncoder().encode(JSON.stringify(message));
  const frame = new Uint8Array(4 + payload.length);
  new DataView(frame.buffer).setUint32(0, payload.length, false);
  frame.set(payload, 4);
  return frame;
}

/** Incremental decoder for a framed byte stream; malformed JSON is counted, not thrown. */
export class FrameDecoder {
  private buffer = new Uint8Array(0);
  dropped = 0;

  feed(chunk: Uint8Array): unknown[] {
    const joined = new Uint8Array(this.buffer.length + chunk.length);
    joined.set(this.buffer);
    joined.set(chunk, this.buffer.length);
    this.buffer = joined;

    const out: unknown[] = [];
    for (;;) {
      if (this.buffer.length < 4) return out;
      const length = new DataView(
        this.buffer.buffer,
        this.buffer.byteOffset,
        4,
      ).getUint32(0, false);
      if (length > MAX_MESSAGE) {
        throw new Error(`frame of ${length} bytes exceeds limit`);
      }
      if (this.buffer.length < 4 + length) return out;
      const payload = this.buffer.subarray(4, 4 + length);
      this.buffer = this.buffer.slice(4 + length);
      try {
        out.push(JSON.parse(new TextDecoder().decode(payload)));
      } catch {
        this.dropped += 1;
      }
    }
  }
}

function isVec3(v: unknown): v is [number, number, number] {
  return Array.isArray(v) && v.length === 3 && v.every((x) => Number.isFinite(x));
}

/** Narrow an arbitrary decoded message to a state snapshot, or null. */
export function asState(message: unknown): StateMessage | null {
  const m = message as Partial<StateMessage>;
  if (
    m &&
    m.type === "state" &&
    Number.isFinite(m.t) &&
    isVec3(m.p_t) &&
    isVec3(m.tool_base) &&
    isVec3(m.p_c) &&
    Number.isFinite(m.xc_norm) &&
    Number.isFinite(m.min_distance) &&
    Array.isArray(m.F_r) &&
    m.F_r.length === 6 &&
    m.F_r.every((x) => Number.isFinite(x)) &&
    Number.isFinite(m.energy)
  ) {
    return m as StateMessage;
  }
  return null;
}

export function asHello(message: unknown): HelloMessage | null {
  const m = message as Partial<HelloMessage>;
  if (
    m &&
    m.type === "hello" &&
    isVec3(m.p_c) &&
    Number.isFinite(m.d_c) &&
    Number.isFinite(m.influence_radius) &&
    Number.isFinite(m.tool_length) &&
    Array.isArray(m.points)
  ) {
    return m as HelloMessage;
  }
  return null;
}

export function asReport(message: unknown): ReportMessage | null {
  const m = message as Partial<ReportMessage>;
  if (m && m.type === "report" && m.report && typeof m.report === "object") {
    return m as ReportMessage;
  }
  return null;
}
