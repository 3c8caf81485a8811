/**
 * Live-loop acceptance: spawn the simulation CLI in live mode, drive a
 * scripted drag that injects a 10 N approach toward the forbidden region,
 * and verify that repulsion onset shows up in telemetry, that the clearance
 * monitor still passes, and that command-to-visible-response latency stays
 * under 150 ms locally.
 */

import { spawn } from "node:child_process";
import * as fs from "node:fs";
import * as net from "node:net";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DragWrenchMapper, FORCE_CAP_N, FULL_DRAG_PX } from "../dist/input.js";
import {
  FrameDecoder,
  StateMessage,
  asReport,
  asState,
  encodeFrame,
} from "../dist/protocol.js";

const REPO = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");
const CONFIG = path.join(REPO, "configs", "default.yaml");

// Camera looking along -y: screen-down drags push world -z (toward the bed).
const BASIS = {
  right: [1, 0, 0] as [number, number, number],
  up: [0, 0, 1] as [number, number, number],
  forward: [0, -1, 0] as [number, number, number],
};

const DURATION_S = 6.0;

interface LiveRun {
  states: StateMessage[];
  report: Record<string, any> | null;
  latencyMs: number;
  exitCode: number | null;
}

function sleep(ms: number) {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function runLiveSession(): Promise<LiveRun> {
  const outDir = fs.mkdtempSync(path.join(os.tmpdir(), "console-live-"));
  const scenario = path.join(outDir, "scenario.yaml");
  fs.writeFileSync(
    scenario,
    [
      "scenario:",
      "  name: console_live_test",
      `  duration: ${DURATION_S}`,
      "  profile: null",
      "telemetry:",
      "  decimate: 2",
      "",
    ].join("\n"),
  );

  const proc = spawn(
    "python3",
    ["-m", "rcmadmit.cli", "run", "--config", CONFIG, "--scenario", scenario,
     "--out", outDir, "--live", "127.0.0.1:0"],
    { cwd: REPO },
  );
  let stdout = "";
  proc.stdout.on("data", (chunk) => { stdout += chunk.toString(); });
  let stderr = "";
  proc.stderr.on("data", (chunk) => { stderr += chunk.toString(); });

  // The CLI prints the bound address before the loop starts.
  let port = 0;
  for (let i = 0; i < 200 && !port; i++) {
    const match = stdout.match(/telemetry on 127\.0\.0\.1:(\d+)/);
    if (match) port = Number(match[1]);
    else await sleep(25);
  }
  if (!port) throw new Error(`no telemetry address in output:\n${stdout}${stderr}`);

  const sock = net.createConnection(port, "127.0.0.1");
  sock.setNoDelay(true);
  const decoder = new FrameDecoder();
  const states: StateMessage[] = [];
  let report: Record<string, any> | null = null;
  let firstResponseAt = 0;
  sock.on("data", (chunk) => {
    for (const message of decoder.feed(new Uint8Array(chunk))) {
      const state = asState(message);
      if (state) {
        states.push(state);
        if (!firstResponseAt && Math.hypot(...state.F_h.slice(0, 3)) > 0.5) {
          firstResponseAt = performance.now();
        }
      }
      const rep = asReport(message);
      if (rep) report = rep.report;
    }
  });
  await sleep(200); // hello + first states

  // Scripted drag like a watching user: creep toward the region at low gain
  // until telemetry shows the influence shell, then push the full 10 N into
  // the barrier where the repulsion-scheduled damping is active.
  const mapper = new DragWrenchMapper();
  const dyFor10N = (10 / FORCE_CAP_N) * FULL_DRAG_PX;
  const drag = { dxPx: 0, dyPx: dyFor10N, torqueMode: false, axialMode: false };
  const sentAt = performance.now();

  mapper.gain = 0.3;
  mapper.beginDrag();
  const approachDeadline = performance.now() + 3000;
  while (performance.now() < approachDeadline) {
    const last = states[states.length - 1];
    if (last && last.min_distance < 0.0145) break;
    const cmd = mapper.sample(drag, BASIS, performance.now());
    if (cmd) sock.write(encodeFrame(cmd));
    await sleep(8);
  }
  sock.write(encodeFrame(mapper.endDrag()));
  await sleep(120);

  mapper.gain = 1.0;
  mapper.beginDrag();
  const pressEnd = performance.now() + 600;
  while (performance.now() < pressEnd) {
    const cmd = mapper.sample(drag, BASIS, performance.now());
    if (cmd) sock.write(encodeFrame(cmd));
    await sleep(8);
  }
  sock.write(encodeFrame(mapper.endDrag()));

  const exitCode: number | null = await new Promise((resolve) => {
    proc.on("exit", (code) => resolve(code));
    setTimeout(() => resolve(null), (DURATION_S + 15) * 1000);
  });
  // The final report may still be in flight when the process exits.
  const reportDeadline = Date.now() + 2000;
  while (!report && Date.now() < reportDeadline) {
    await sleep(20);
  }
  sock.destroy();
  return {
    states,
    report,
    latencyMs: firstResponseAt ? firstResponseAt - sentAt : Infinity,
    exitCode,
  };
}

describe("live loop through the telemetry socket", () => {
  let run: LiveRun;

  beforeAll(async () => {
    run = await runLiveSession();
  }, 60_000);

  afterAll(() => {
    // nothing to clean: the process exits with the scenario duration
  });

  it("receives decimated state telemetry", () => {
    expect(run.states.length).toBeGreaterThan(100);
    const t = run.states.map((s) => s.t);
    expect(Math.max(...t)).toBeGreaterThan(DURATION_S - 1.0);
  });

  it("shows the injected 10 N wrench and repulsion onset", () => {
    const peak = Math.max(
      ...run.states.map((s) => Math.hypot(...(s.F_h.slice(0, 3) as number[]))),
    );
    expect(peak).toBeGreaterThan(9.0);
    expect(peak).toBeLessThanOrEqual(10.0 + 1e-6);
    const active = run.states.filter((s) => s.active_count > 0);
    expect(active.length).toBeGreaterThan(0);
    const onset = active[0];
    expect(onset.min_distance).toBeLessThanOrEqual(0.015 + 1e-9);
    const repulsion = Math.max(
      ...active.map((s) => Math.hypot(...(s.F_r.slice(0, 3) as number[]))),
    );
    expect(repulsion).toBeGreaterThan(0);
  });

  it("keeps command-to-response latency under 150 ms", () => {
    expect(run.latencyMs).toBeLessThan(150);
  });

  it("still passes the clearance monitor", () => {
    expect(run.report).not.toBeNull();
    expect(run.report!.criteria.clearance.passed).toBe(true);
    expect(run.report!.fault_events).toEqual([]);
  });
});
