/**
 * Browser entry point: connect to the bridge WebSocket, render the scene and
 * charts, and turn pointer drags into wrench commands. Hold Shift while
 * dragging for torque, hold "a" for an axial push along the view direction.
 */

import * as THREE from "three";

import { StripCharts } from "./charts.js";
import { DragWrenchMapper } from "./input.js";
import { asReport } from "./protocol.js";
import { ConsoleScene } from "./scene.js";
import { SceneState } from "./state.js";

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 8000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main() {
  const canvas = el<HTMLCanvasElement>("scene");
  const statusNode = el<HTMLSpanElement>("status");
  const reportNode = el<HTMLPreElement>("report");
  const gainSlider = el<HTMLInputElement>("gain");

  const state = new SceneState();
  const consoleScene = new ConsoleScene();
  const mapper = new DragWrenchMapper();

  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  renderer.setSize(canvas.clientWidth, canvas.clientHeight, false);
  const camera = new THREE.PerspectiveCamera(
    45, canvas.clientWidth / canvas.clientHeight, 0.01, 10);
  camera.up.set(0, 0, 1);

  let socket: WebSocket | null = null;
  let backoff = RECONNECT_BASE_MS;

  function connect() {
    state.markConnecting();
    const ws = new WebSocket(`ws://${location.host}/ws`);
    socket = ws;
    ws.onopen = () => {
      backoff = RECONNECT_BASE_MS;
    };
    ws.onmessage = (event) => {
      const message = JSON.parse(event.data as string);
      const kind = state.apply(message, performance.now());
      if (kind === "hello" && state.hello) {
        consoleScene.applyHello(state.hello);
        const target = new THREE.Vector3().fromArray(state.hello.p_c);
        camera.position.copy(target).add(new THREE.Vector3(0.35, -0.35, 0.25));
        camera.lookAt(target);
        charts = new StripCharts(
          el("charts"), el("charts").clientWidth || 420,
          state.hello.d_c_eff, state.hello.influence_radius);
      }
      const report = asReport(message);
      if (report) {
        reportNode.textContent = JSON.stringify(report.report, null, 2);
      }
    };
    ws.onclose = () => {
      state.markDisconnected();
      socket = null;
      setTimeout(connect, backoff);
      backoff = Math.min(backoff * 2, RECONNECT_MAX_MS);
    };
    ws.onerror = () => ws.close();
  }

  let charts: StripCharts | null = null;
  let dragStart: { x: number; y: number } | null = null;
  let axialKey = false;

  window.addEventListener("keydown", (e) => {
    if (e.key === "a") axialKey = true;
  });
  window.addEventListener("keyup", (e) => {
    if (e.key === "a") axialKey = false;
  });
  gainSlider.addEventListener("input", () => {
    mapper.gain = Number(gainSlider.value);
  });

  function cameraBasis() {
    const right = new THREE.Vector3();
    const up = new THREE.Vector3();
    const forward = new THREE.Vector3();
    camera.matrixWorld.extractBasis(right, up, forward);
    forward.multiplyScalar(-1); // camera looks down -z
    return {
      right: right.toArray() as [number, number, number],
      up: up.toArray() as [number, number, number],
      forward: forward.toArray() as [number, number, number],
    };
  }

  function send(command: unknown) {
    if (socket && socket.readyState === WebSocket.OPEN) {
      socket.send(JSON.stringify(command));
    }
  }

  canvas.addEventListener("pointerdown", (e) => {
    dragStart = { x: e.clientX, y: e.clientY };
    mapper.beginDrag();
    canvas.setPointerCapture(e.pointerId);
  });
  canvas.addEventListener("pointermove", (e) => {
    if (!dragStart) return;
    const command = mapper.sample(
      {
        dxPx: e.clientX - dragStart.x,
        dyPx: e.clientY - dragStart.y,
        torqueMode: e.shiftKey,
        axialMode: axialKey,
      },
      cameraBasis(),
      performance.now(),
    );
    if (command) send(command);
  });
  const release = () => {
    if (!dragStart) return;
    dragStart = null;
    send(mapper.endDrag());
  };
  canvas.addEventListener("pointerup", release);
  canvas.addEventListener("pointercancel", release);

  el<HTMLButtonElement>("pause").onclick = () => send({ type: "pause" });
  el<HTMLButtonElement>("resume").onclick = () => send({ type: "resume" });
  el<HTMLButtonElement>("reset").onclick = () => send({ type: "reset" });

  function frame() {
    state.tick(performance.now());
    statusNode.textContent = state.status;
    statusNode.className = state.status;
    if (state.snapshot) {
      consoleScene.applyState(state.snapshot);
      consoleScene.setStale(state.status !== "live");
      if (charts) charts.refresh(state);
    }
    renderer.render(consoleScene.scene, camera);
    requestAnimationFrame(frame);
  }

  connect();
  requestAnimationFrame(frame);
}

main();
