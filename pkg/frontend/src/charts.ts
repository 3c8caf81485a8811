/**
 * Strip charts for the monitored series: port error, clearance against its
 * floor and influence onset, and the energy balance. Thin wrapper over uPlot
 * fed from the SceneState ring buffers.
 */

import uPlot from "uplot";

import { SceneState } from "./state.js";

export class StripCharts {
  private xc: uPlot;
  private distance: uPlot;
  private energy: uPlot;

  constructor(host: HTMLElement, width: number, dCeff: number, influence: number) {
    const base = (title: string, series: uPlot.Series[]): uPlot.Options => ({
      title,
      width,
      height: 140,
      series: [{ label: "t (s)" }, ...series],
      axes: [{}, { size: 70 }],
      legend: { show: false },
      cursor: { show: false },
    });
    this.xc = new uPlot(
      base("port error |x_c| (m)", [{ label: "|x_c|", stroke: "#4a90d9" }]),
      [[], []],
      host,
    );
    this.distance = new uPlot(
      base("clearance (m)", [
        { label: "min distance", stroke: "#d0021b" },
        { label: "floor", stroke: "#999", dash: [4, 4] },
        { label: "influence", stroke: "#f5a623", dash: [2, 4] },
      ]),
      [[], [], [], []],
      host,
    );
    this.energy = new uPlot(
      base("energy (J)", [{ label: "E", stroke: "#417505" }]),
      [[], []],
      host,
    );
    this.floor = dCeff;
    this.influence = influence;
  }

  private floor: number;
  private influence: number;

  refresh(state: SceneState) {
    const t = state.history.t.toArray();
    this.xc.setData([t, state.history.xcNorm.toArray()]);
    const d = state.history.minDistance.toArray();
    this.distance.setData([
      t,
      d,
      d.map(() => this.floor),
      d.map(() => this.influence),
    ]);
    this.energy.setData([t, state.history.energy.toArray()]);
  }
}
