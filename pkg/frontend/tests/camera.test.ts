import { describe, expect, it } from "vitest";

import { OrbitCamera } from "../src/camera.js";
import type { Vec3 } from "../src/types.js";

describe("orbit camera", () => {
  it("screen -> world -> screen round trip is identity within 1 px", () => {
    const cam = new OrbitCamera();
    const plane = { point: [0, 0.1, 0] as Vec3, normal: [0, 1, 0] as Vec3 };
    for (const [sx, sy] of [
      [480, 320],
      [120, 80],
      [830, 590],
      [500, 200],
    ]) {
      const world = cam.unprojectToPlane(sx, sy, plane);
      expect(world).not.toBeNull();
      const back = cam.project(world as Vec3);
      expect(Math.abs(back.x - sx)).toBeLessThan(1);
      expect(Math.abs(back.y - sy)).toBeLessThan(1);
    }
  });

  it("unprojected points land on the drag plane", () => {
    const cam = new OrbitCamera();
    const plane = { point: [0, -0.2, 0] as Vec3, normal: [0, 1, 0] as Vec3 };
    const world = cam.unprojectToPlane(400, 300, plane);
    expect(world).not.toBeNull();
    expect(Math.abs((world as Vec3)[1] - -0.2)).toBeLessThan(1e-9);
  });

  it("projection depth is positive for points in front of the camera", () => {
    const cam = new OrbitCamera();
    expect(cam.project(cam.target).depth).toBeGreaterThan(0);
  });

  it("rays parallel to the plane return null", () => {
    const cam = new OrbitCamera();
    cam.azimuth = 0;
    cam.elevation = 0;
    const vertical = { point: [0, 0, 0] as Vec3, normal: [0, 0, 1] as Vec3 };
    // A ray through the image center at zero elevation is horizontal.
    expect(cam.unprojectToPlane(cam.width / 2, cam.height / 2, vertical)).toBeNull();
  });

  it("elevation stays clamped while orbiting", () => {
    const cam = new OrbitCamera();
    cam.orbit(0, 10);
    expect(cam.elevation).toBeLessThanOrEqual(1.45);
    cam.orbit(0, -10);
    expect(cam.elevation).toBeGreaterThanOrEqual(-0.2);
  });
});
