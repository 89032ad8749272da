// Orbit camera with perspective projection and ray-plane unprojection.
// World frame: z up; the camera orbits a target point.

import type { Vec3 } from "./types.js";

export interface Plane {
  point: Vec3;
  normal: Vec3;
}

const sub = (a: Vec3, b: Vec3): Vec3 => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
const add = (a: Vec3, b: Vec3): Vec3 => [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
const scale = (a: Vec3, s: number): Vec3 => [a[0] * s, a[1] * s, a[2] * s];
const dot = (a: Vec3, b: Vec3): number => a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
const cross = (a: Vec3, b: Vec3): Vec3 => [
  a[1] * b[2] - a[2] * b[1],
  a[2] * b[0] - a[0] * b[2],
  a[0] * b[1] - a[1] * b[0],
];
const norm = (a: Vec3): number => Math.sqrt(dot(a, a));
const normalize = (a: Vec3): Vec3 => scale(a, 1 / (norm(a) || 1));

export class OrbitCamera {
  target: Vec3 = [0.45, 0, 0.35];
  distance = 1.9;
  azimuth = -2.3; // rad around z
  elevation = 0.35; // rad above the horizon
  focal = 900; // px
  width = 960;
  height = 640;

  position(): Vec3 {
    const ce = Math.cos(this.elevation);
    return add(this.target, [
      this.distance * ce * Math.cos(this.azimuth),
      this.distance * ce * Math.sin(this.azimuth),
      this.distance * Math.sin(this.elevation),
    ]);
  }

  private basis() {
    const pos = this.position();
    const forward = normalize(sub(this.target, pos));
    const right = normalize(cross(forward, [0, 0, 1]));
    const up = cross(right, forward);
    return { pos, forward, right, up };
  }

  // World point -> screen pixel plus depth (camera-frame z, px > 0 in front).
  project(p: Vec3): { x: number; y: number; depth: number } {
    const { pos, forward, right, up } = this.basis();
    const rel = sub(p, pos);
    const depth = dot(rel, forward);
    const safe = Math.max(depth, 1e-6);
    return {
      x: this.width / 2 + (this.focal * dot(rel, right)) / safe,
      y: this.height / 2 - (this.focal * dot(rel, up)) / safe,
      depth,
    };
  }

  // Pixel -> the point where the view ray crosses the given plane.
  unprojectToPlane(sx: number, sy: number, plane: Plane): Vec3 | null {
    const { pos, forward, right, up } = this.basis();
    const dir = normalize(
      add(
        add(scale(right, (sx - this.width / 2) / this.focal), scale(up, (this.height / 2 - sy) / this.focal)),
        forward,
      ),
    );
    const denom = dot(dir, plane.normal);
    if (Math.abs(denom) < 1e-9) return null;
    const t = dot(sub(plane.point, pos), plane.normal) / denom;
    if (t <= 0) return null;
    return add(pos, scale(dir, t));
  }

  orbit(dAzimuth: number, dElevation: number): void {
    this.azimuth += dAzimuth;
    this.elevation = Math.min(1.45, Math.max(-0.2, this.elevation + dElevation));
  }

  zoom(factor: number): void {
    this.distance = Math.min(6, Math.max(0.5, this.distance * factor));
  }
}
