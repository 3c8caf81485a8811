/**
 * Drag-to-wrench mapping. A drag in screen space becomes a force in the
 * camera plane (right = +x of the camera, up = +y); holding the axial key
 * instead pushes along the camera's view direction, and the torque modifier
 * swaps the force for a torque. Commands are rate limited and a release
 * always sends an explicit zero (the server also decays stale wrenches).
 */

import { WrenchCommand } from "./protocol.js";

export const FORCE_CAP_N = 30;
export const TORQUE_CAP_NM = 5;
export const COMMAND_RATE_HZ = 60;
/** Drag distance (px) that reaches the force cap at gain 1. */
export const FULL_DRAG_PX = 200;

export interface CameraBasis {
  right: [number, number, number];
  up: [number, number, number];
  forward: [number, number, number];
}

function scale(v: [number, number, number], s: number): [number, number, number] {
  return [v[0] * s, v[1] * s, v[2] * s];
}

function add(a: [number, number, number], b: [number, number, number]): [number, number, number] {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

function norm(v: [number, number, number]): number {
  return Math.hypot(v[0], v[1], v[2]);
}

export interface DragSample {
  dxPx: number;
  dyPx: number;
  torqueMode: boolean;
  axialMode: boolean;
}

export class DragWrenchMapper {
  gain = 1.0;
  private lastSentMs = -Infinity;
  private dragging = false;

  beginDrag() {
    this.dragging = true;
  }

  /** Map the current drag vector to a command, or null when rate limited. */
  sample(drag: DragSample, basis: CameraBasis, nowMs: number): WrenchCommand | null {
    if (!this.dragging) return null;
    if (nowMs - this.lastSentMs < 1000 / COMMAND_RATE_HZ) return null;
    this.lastSentMs = nowMs;
    return this.mapDrag(drag, basis);
  }

  /** Release always produces an immediate zero command. */
  endDrag(): WrenchCommand {
    this.dragging = false;
    this.lastSentMs = -Infinity;
    return { type: "wrench", force: [0, 0, 0], torque: [0, 0, 0] };
  }

  mapDrag(drag: DragSample, basis: CameraBasis): WrenchCommand {
    const cap = drag.torqueMode ? TORQUE_CAP_NM : FORCE_CAP_N;
    let vec: [number, number, number];
    if (drag.axialMode) {
      // Screen-up pushes along the view direction (into the scene).
      vec = scale(basis.forward, (-drag.dyPx / FULL_DRAG_PX) * cap * this.gain);
    } else {
      vec = add(
        scale(basis.right, (drag.dxPx / FULL_DRAG_PX) * cap * this.gain),
        scale(basis.up, (-drag.dyPx / FULL_DRAG_PX) * cap * this.gain),
      );
    }
    const magnitude = norm(vec);
    if (magnitude > cap) {
      vec = scale(vec, cap / magnitude);
    }
    if (drag.torqueMode) {
      return { type: "wrench", force: [0, 0, 0], torque: vec };
    }
    return { type: "wrench", force: vec, torque: [0, 0, 0] };
  }
}
