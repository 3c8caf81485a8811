/**
 * 3D scene: tool capsule, entry port, covering spheres with their influence
 * shells, and a repulsion arrow. The cloud renders as two instanced meshes
 * (spheres at d_c, transparent shells at the influence radius), so the
 * per-frame cost is independent of point count; only the tool, arrow and
 * highlight change per snapshot.
 */

import * as THREE from "three";

import { HelloMessage, StateMessage } from "./protocol.js";

const TOOL_COLOR = 0x4a90d9;
const PORT_COLOR = 0xf5a623;
const CLOUD_COLOR = 0xd0021b;
const CONTEXT_COLOR = 0x7ed321;
const SHELL_COLOR = 0xd0021b;
const ARROW_COLOR = 0xff3333;
const STALE_DIM = 0.35;

export class ConsoleScene {
  readonly scene = new THREE.Scene();
  readonly toolGroup = new THREE.Group();
  private shaft: THREE.Mesh;
  private tipCap: THREE.Mesh;
  private baseCap: THREE.Mesh;
  private port: THREE.Mesh;
  private arrow: THREE.ArrowHelper;
  private cloud: THREE.InstancedMesh | null = null;
  private shells: THREE.InstancedMesh | null = null;
  private context: THREE.InstancedMesh | null = null;
  private shellMaterial = new THREE.MeshBasicMaterial({
    color: SHELL_COLOR,
    transparent: true,
    opacity: 0.08,
    depthWrite: false,
  });
  pointBudget = 20000;
  degraded = false;

  constructor() {
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const sun = new THREE.DirectionalLight(0xffffff, 0.8);
    sun.position.set(1, 1, 2);
    this.scene.add(sun);

    const toolMaterial = new THREE.MeshStandardMaterial({ color: TOOL_COLOR });
    this.shaft = new THREE.Mesh(
      new THREE.CylinderGeometry(1, 1, 1, 24, 1, true),
      toolMaterial,
    );
    this.tipCap = new THREE.Mesh(new THREE.SphereGeometry(1, 16, 12), toolMaterial);
    this.baseCap = new THREE.Mesh(new THREE.SphereGeometry(1, 16, 12), toolMaterial);
    this.toolGroup.add(this.shaft, this.tipCap, this.baseCap);
    this.scene.add(this.toolGroup);

    this.port = new THREE.Mesh(
      new THREE.SphereGeometry(1, 16, 12),
      new THREE.MeshStandardMaterial({ color: PORT_COLOR }),
    );
    this.scene.add(this.port);

    this.arrow = new THREE.ArrowHelper(
      new THREE.Vector3(0, 0, 1),
      new THREE.Vector3(),
      0.01,
      ARROW_COLOR,
    );
    this.arrow.visible = false;
    this.scene.add(this.arrow);
  }

  /** Build the static part of the scene from the hello message. */
  applyHello(hello: HelloMessage) {
    for (const mesh of [this.cloud, this.shells, this.context]) {
      if (mesh) this.scene.remove(mesh);
    }
    const radius = hello.tool_radius > 0 ? hello.tool_radius : 0.002;
    this.shaft.scale.set(radius, 1, radius);
    this.tipCap.scale.setScalar(radius);
    this.baseCap.scale.setScalar(radius);
    this.port.scale.setScalar(Math.max(0.004, hello.d_c));
    this.port.position.fromArray(hello.p_c);

    let points = hello.points;
    this.degraded = points.length > this.pointBudget;
    if (this.degraded) {
      const stride = Math.ceil(points.length / this.pointBudget);
      points = points.filter((_, i) => i % stride === 0);
    }
    this.cloud = this.instancedSpheres(points, hello.d_c,
      new THREE.MeshStandardMaterial({ color: CLOUD_COLOR }));
    this.shells = this.instancedSpheres(points, hello.influence_radius,
      this.shellMaterial);
    this.scene.add(this.cloud, this.shells);
    if (hello.context_points && hello.context_points.length) {
      this.context = this.instancedSpheres(hello.context_points, hello.d_c,
        new THREE.MeshStandardMaterial({ color: CONTEXT_COLOR }));
      this.scene.add(this.context);
    }
  }

  private instancedSpheres(
    points: [number, number, number][],
    radius: number,
    material: THREE.Material,
  ): THREE.InstancedMesh {
    const mesh = new THREE.InstancedMesh(
      new THREE.SphereGeometry(1, 8, 6),
      material,
      points.length,
    );
    const m = new THREE.Matrix4();
    for (let i = 0; i < points.length; i++) {
      m.makeScale(radius, radius, radius);
      m.setPosition(points[i][0], points[i][1], points[i][2]);
      mesh.setMatrixAt(i, m);
    }
    mesh.instanceMatrix.needsUpdate = true;
    return mesh;
  }

  /** Per-snapshot update: tool pose, repulsion arrow, activity highlight. */
  applyState(state: StateMessage) {
    const tip = new THREE.Vector3().fromArray(state.p_t);
    const base = new THREE.Vector3().fromArray(state.tool_base);
    const axis = new THREE.Vector3().subVectors(tip, base);
    const length = axis.length();
    const mid = new THREE.Vector3().addVectors(tip, base).multiplyScalar(0.5);
    this.shaft.position.copy(mid);
    this.shaft.scale.y = length;
    this.shaft.quaternion.setFromUnitVectors(
      new THREE.Vector3(0, 1, 0),
      axis.normalize(),
    );
    this.tipCap.position.copy(tip);
    this.baseCap.position.copy(base);

    const force = new THREE.Vector3(state.F_r[0], state.F_r[1], state.F_r[2]);
    const magnitude = force.length();
    if (magnitude > 1e-9) {
      this.arrow.visible = true;
      this.arrow.position.copy(tip);
      this.arrow.setDirection(force.normalize());
      this.arrow.setLength(Math.min(0.02 + 0.002 * magnitude, 0.12));
    } else {
      this.arrow.visible = false;
    }
    this.shellMaterial.opacity = state.active_count > 0 ? 0.22 : 0.08;
  }

  /** Dim everything when telemetry goes stale. */
  setStale(stale: boolean) {
    this.scene.traverse((node) => {
      const mesh = node as THREE.Mesh;
      const material = mesh.material as THREE.Material | undefined;
      if (material && "opacity" in material && material !== this.shellMaterial) {
        material.transparent = stale;
        material.opacity = stale ? STALE_DIM : 1.0;
      }
    });
  }
}
