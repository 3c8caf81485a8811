import { describe, expect, it } from "vitest";

import {
  FrameDecoder,
  asHello,
  asReport,
  asState,
  encodeFrame,
} from "../dist/protocol.js";

function stateMessage(overrides: Record<string, unknown> = {}) {
  return {
    type: "state",
    t: 0.004,
    p_t: [0.1, 0.2, 0.3],
    tool_base: [0.1, 0.2, 0.7],
    p_e: [0.1, 0.2, 0.73],
    p_c: [0.0, 0.0, 0.0],
    xc_norm: 1e-7,
    min_distance: 0.02,
    active_count: 0,
    F_h: [0, 0, 0, 0, 0, 0],
    F_r: [0, 0, 0, 0, 0, 0],
    D_f: [35, 24, 24, 24, 60],
    energy: 0.0,
    input_power: 0.0,
    ...overrides,
  };
}

describe("framing", () => {
  it("round-trips messages", () => {
    const decoder = new FrameDecoder();
    const a = { type: "state", t: 1.5 };
    const b = { type: "report", report: { passed: true } };
    const blob = new Uint8Array([...encodeFrame(a), ...encodeFrame(b)]);
    expect(decoder.feed(blob)).toEqual([a, b]);
  });

  it("handles byte-by-byte delivery", () => {
    const decoder = new FrameDecoder();
    const frame = encodeFrame({ x: 42 });
    const out: unknown[] = [];
    for (const byte of frame) {
      out.push(...decoder.feed(new Uint8Array([byte])));
    }
    expect(out).toEqual([{ x: 42 }]);
  });

  it("counts malformed payloads instead of throwing", () => {
    const decoder = new FrameDecoder();
    const bad = new TextEncoder().encode("nope");
    const frame = new Uint8Array(4 + bad.length);
    new DataView(frame.buffer).setUint32(0, bad.length, false);
    frame.set(bad, 4);
    expect(decoder.feed(frame)).toEqual([]);
    expect(decoder.dropped).toBe(1);
    expect(decoder.feed(encodeFrame({ ok: 1 }))).toEqual([{ ok: 1 }]);
  });

  it("rejects oversize frames", () => {
    const decoder = new FrameDecoder();
    const huge = new Uint8Array(5);
    new DataView(huge.buffer).setUint32(0, 1 << 30, false);
    expect(() => decoder.feed(huge)).toThrow(/exceeds/);
  });
});

describe("message validation", () => {
  it("accepts a complete state snapshot", () => {
    expect(asState(stateMessage())).not.toBeNull();
  });

  it("rejects snapshots with missing or non-finite fields", () => {
    expect(asState(stateMessage({ p_t: [1, 2] }))).toBeNull();
    expect(asState(stateMessage({ xc_norm: "oops" }))).toBeNull();
    expect(asState(stateMessage({ F_r: [0, 0, 0] }))).toBeNull();
    expect(asState(stateMessage({ F_r: [0, 0, NaN, 0, 0, 0] }))).toBeNull();
    expect(asState({ type: "hello" })).toBeNull();
  });

  it("narrows hello and report messages", () => {
    expect(
      asHello({
        type: "hello",
        p_c: [0, 0, 0],
        d_c: 0.0035,
        influence_radius: 0.015,
        tool_length: 0.43,
        points: [],
      }),
    ).not.toBeNull();
    expect(asHello({ type: "hello" })).toBeNull();
    expect(asReport({ type: "report", report: { passed: true } })).not.toBeNull();
    expect(asReport({ type: "state" })).toBeNull();
  });
});
