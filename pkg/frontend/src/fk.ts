// Client-side forward kinematics of the default arm, for drawing link segments
// from the joint vector in each state frame. Mirrors the server's chain.

import type { Vec3 } from "./types.js";

// Denavit-Hartenberg rows (a, alpha, d, theta0) of the default six-joint arm.
export const DEFAULT_CHAIN: Array<[number, number, number, number]> = [
  [0.0, Math.PI / 2, 0.15, 0.0],
  [0.45, 0.0, 0.0, 0.0],
  [0.4, 0.0, 0.0, 0.0],
  [0.0, Math.PI / 2, 0.13, 0.0],
  [0.0, -Math.PI / 2, 0.1, 0.0],
  [0.0, 0.0, 0.08, 0.0],
];

type Mat4 = number[]; // row-major 4x4

const identity = (): Mat4 => [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];

function matmul(a: Mat4, b: Mat4): Mat4 {
  const out = new Array(16).fill(0);
  for (let i = 0; i < 4; i++) {
    for (let j = 0; j < 4; j++) {
      let acc = 0;
      for (let k = 0; k < 4; k++) acc += a[4 * i + k] * b[4 * k + j];
      out[4 * i + j] = acc;
    }
  }
  return out;
}

function dhTransform(a: number, alpha: number, d: number, theta: number): Mat4 {
  const ct = Math.cos(theta);
  const st = Math.sin(theta);
  const ca = Math.cos(alpha);
  const sa = Math.sin(alpha);
  return [ct, -st * ca, st * sa, a * ct, st, ct * ca, -ct * sa, a * st, 0, sa, ca, d, 0, 0, 0, 1];
}

// Joint origins from base to TCP: 7 points for a 6-joint chain.
export function jointPositions(q: number[], chain = DEFAULT_CHAIN): Vec3[] {
  let t = identity();
  const points: Vec3[] = [[0, 0, 0]];
  chain.forEach(([a, alpha, d, theta0], i) => {
    t = matmul(t, dhTransform(a, alpha, d, theta0 + q[i]));
    points.push([t[3], t[7], t[11]]);
  });
  return points;
}

export function tcpFrame(q: number[], chain = DEFAULT_CHAIN): { position: Vec3; zAxis: Vec3 } {
  let t = identity();
  chain.forEach(([a, alpha, d, theta0], i) => {
    t = matmul(t, dhTransform(a, alpha, d, theta0 + q[i]));
  });
  return { position: [t[3], t[7], t[11]], zAxis: [t[2], t[6], t[10]] };
}
