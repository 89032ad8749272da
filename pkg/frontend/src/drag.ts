// Pointer-to-workspace mapping: dragging moves the virtual hand on a vertical
// plane (scroll wheel shifts the plane's depth), poses stream at the control
// rate with monotonic timestamps, and holds keep emitting the last pose.

import type { OrbitCamera, Plane } from "./camera.js";
import type { HandPoseMsg, Vec3 } from "./types.js";

export interface Workspace {
  min: Vec3;
  max: Vec3;
}

export const DEFAULT_WORKSPACE: Workspace = {
  min: [0.2, -0.45, 0.02],
  max: [0.85, 0.45, 0.75],
};

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

export class HandDragger {
  position: Vec3;
  depth: number; // y coordinate of the drag plane
  active = false;
  private t = 0;

  constructor(
    private camera: OrbitCamera,
    start: Vec3 = [0.5, 0.0, 0.12],
    private workspace: Workspace = DEFAULT_WORKSPACE,
    private rateHz = 30,
  ) {
    this.position = [...start] as Vec3;
    this.depth = start[1];
  }

  plane(): Plane {
    return { point: [0, this.depth, 0], normal: [0, 1, 0] };
  }

  /** Map a pointer position onto the drag plane; returns the new hand position. */
  moveTo(screenX: number, screenY: number): Vec3 | null {
    const hit = this.camera.unprojectToPlane(screenX, screenY, this.plane());
    if (!hit) return null;
    const { min, max } = this.workspace;
    this.position = [
      clamp(hit[0], min[0], max[0]),
      clamp(hit[1], min[1], max[1]),
      clamp(hit[2], min[2], max[2]),
    ];
    return this.position;
  }

  /** Scroll adjusts the plane depth; the hand follows it. */
  adjustDepth(delta: number): void {
    this.depth = clamp(this.depth + delta, this.workspace.min[1], this.workspace.max[1]);
    this.position = [this.position[0], this.depth, this.position[2]];
  }

  /** Pose message for the current tick; timestamps are strictly nondecreasing. */
  nextPose(): HandPoseMsg {
    const msg: HandPoseMsg = {
      kind: "hand_pose",
      t: this.t,
      x: this.position[0],
      y: this.position[1],
      z: this.position[2],
    };
    this.t += 1 / this.rateHz;
    return msg;
  }
}
