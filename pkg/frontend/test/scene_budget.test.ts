/**
 * Render budget: CPU-side scene updates (instanced cloud build, per-frame
 * tool/arrow/highlight updates) must leave a 10k-point scene well inside a
 * 33 ms frame. GPU rasterization is excluded — there is no GL context here;
 * the instanced meshes keep the draw-call count constant regardless of
 * point count.
 */

import { describe, expect, it } from "vitest";

import { ConsoleScene } from "../dist/scene.js";

function makeHello(nPoints: number) {
  const points: [number, number, number][] = [];
  for (let i = 0; i < nPoints; i++) {
    points.push([
      0.05 * Math.sin(i * 0.31),
      0.05 * Math.cos(i * 0.17),
      -0.15 - 0.01 * ((i * 37) % 100) / 100,
    ]);
  }
  return {
    type: "hello" as const,
    mode: "tip" as const,
    d_c: 0.0035,
    d_0: 0.0115,
    d_c_eff: 0.0035,
    influence_radius: 0.015,
    tool_length: 0.43,
    tool_radius: 0.0035,
    p_c: [0, 0, 0] as [number, number, number],
    dt: 0.004,
    decimate: 4,
    duration: 30,
    points,
  };
}

function makeState(k: number) {
  const angle = 0.002 * k;
  return {
    type: "state" as const,
    t: 0.004 * k,
    p_t: [0.01 * Math.sin(angle), 0.01 * Math.cos(angle), -0.14] as [number, number, number],
    tool_base: [0, 0, 0.29] as [number, number, number],
    p_e: [0, 0, 0.29] as [number, number, number],
    p_c: [0, 0, 0] as [number, number, number],
    xc_norm: 1e-6,
    min_distance: 0.012,
    active_count: k % 2,
    F_h: [0, 0, -10, 0, 0, 0],
    F_r: [0.3, 0.1, 2.0, 0, 0, 0],
    D_f: [35, 24, 24, 24, 60],
    energy: 0.05,
    input_power: 0.4,
  };
}

describe("scene update budget", () => {
  it("builds a 10k-point scene and updates frames under 33 ms", () => {
    const scene = new ConsoleScene();
    const t0 = performance.now();
    scene.applyHello(makeHello(10_000));
    const buildMs = performance.now() - t0;
    expect(buildMs).toBeLessThan(2000);

    scene.applyState(makeState(0)); // warm up
    const frames = 200;
    const t1 = performance.now();
    for (let k = 1; k <= frames; k++) {
      scene.applyState(makeState(k));
    }
    const perFrameMs = (performance.now() - t1) / frames;
    expect(perFrameMs).toBeLessThan(33);
  });

  it("degrades gracefully past the point budget", () => {
    const scene = new ConsoleScene();
    scene.pointBudget = 5000;
    scene.applyHello(makeHello(10_000));
    expect(scene.degraded).toBe(true);
  });
});
