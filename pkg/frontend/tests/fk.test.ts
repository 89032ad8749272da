import { describe, expect, it } from "vitest";

import { jointPositions, tcpFrame } from "../src/fk.js";

// Reference values computed with the server-side kinematics.
const HOME_JOINTS = [
  [0.0, 0.0, 0.0],
  [0.0, 0.0, 0.15],
  [0.45, 0.0, 0.15],
  [0.85, 0.0, 0.15],
  [0.85, -0.13, 0.15],
  [0.85, -0.13, 0.05],
  [0.85, -0.21, 0.05],
];

const SWEEP_Q = [-0.2816, 1.4405, -1.481, 1.6113, 1.5708, -1.8524];
const SWEEP_TCP = [0.50003, -0.279982, 0.49999];

describe("client-side forward kinematics", () => {
  it("matches the server chain at the zero pose", () => {
    const points = jointPositions([0, 0, 0, 0, 0, 0]);
    expect(points.length).toBe(7);
    points.forEach((p, i) => {
      for (let k = 0; k < 3; k++) {
        expect(Math.abs(p[k] - HOME_JOINTS[i][k])).toBeLessThan(1e-9);
      }
    });
  });

  it("matches the server chain at the sweep-start pose", () => {
    const { position, zAxis } = tcpFrame(SWEEP_Q);
    for (let k = 0; k < 3; k++) {
      expect(Math.abs(position[k] - SWEEP_TCP[k])).toBeLessThan(1e-5);
    }
    // Tool points straight down at this pose.
    expect(Math.abs(zAxis[2] + 1)).toBeLessThan(1e-4);
  });
});
