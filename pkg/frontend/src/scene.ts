// Canvas renderer: ground grid, arm segments, safety cylinder, hand sphere,
// forecast ribbon. All safety numbers come from the state frame; the scene
// never recomputes them.

import type { OrbitCamera } from "./camera.js";
import { jointPositions } from "./fk.js";
import type { StateFrame, Vec3 } from "./types.js";

export interface SceneOptions {
  cylinderRadius: number;
  cylinderHeight: number;
  handRadius: number;
  ribbonSigmaScale: number; // ribbon half-width in sigmas
}

export const DEFAULT_SCENE: SceneOptions = {
  cylinderRadius: 0.05,
  cylinderHeight: 0.25,
  handRadius: 0.08,
  ribbonSigmaScale: 2,
};

export class SceneRenderer {
  constructor(
    private ctx: CanvasRenderingContext2D,
    private camera: OrbitCamera,
    private options: SceneOptions = DEFAULT_SCENE,
  ) {}

  private line(a: Vec3, b: Vec3, style: string, width = 2): void {
    const pa = this.camera.project(a);
    const pb = this.camera.project(b);
    if (pa.depth <= 0 || pb.depth <= 0) return;
    this.ctx.strokeStyle = style;
    this.ctx.lineWidth = width;
    this.ctx.beginPath();
    this.ctx.moveTo(pa.x, pa.y);
    this.ctx.lineTo(pb.x, pb.y);
    this.ctx.stroke();
  }

  private circle(center: Vec3, radius: number, fill: string, stroke?: string): void {
    const pc = this.camera.project(center);
    if (pc.depth <= 0) return;
    const edge = this.camera.project([center[0], center[1], center[2] + radius]);
    const px = Math.max(1.5, Math.hypot(edge.x - pc.x, edge.y - pc.y));
    this.ctx.beginPath();
    this.ctx.arc(pc.x, pc.y, px, 0, 2 * Math.PI);
    this.ctx.fillStyle = fill;
    this.ctx.fill();
    if (stroke) {
      this.ctx.strokeStyle = stroke;
      this.ctx.lineWidth = 1.5;
      this.ctx.stroke();
    }
  }

  private grid(): void {
    for (let i = -4; i <= 8; i++) {
      this.line([i * 0.125, -0.5, 0], [i * 0.125, 0.5, 0], "#233", 1);
    }
    for (let j = -4; j <= 4; j++) {
      this.line([-0.5, j * 0.125, 0], [1.0, j * 0.125, 0], "#233", 1);
    }
    // World axes at the robot base.
    this.line([0, 0, 0], [0.15, 0, 0], "#a33", 2);
    this.line([0, 0, 0], [0, 0.15, 0], "#3a3", 2);
    this.line([0, 0, 0], [0, 0, 0.15], "#36c", 2);
  }

  render(frame: StateFrame | null, ghostHand: Vec3 | null, dragging: boolean): void {
    const { ctx } = this;
    ctx.fillStyle = "#0b0f12";
    ctx.fillRect(0, 0, this.camera.width, this.camera.height);
    this.grid();
    if (!frame) return;

    // Arm segments from the joint vector.
    const joints = jointPositions(frame.q);
    for (let i = 0; i + 1 < joints.length; i++) {
      this.line(joints[i], joints[i + 1], "#9ab", 5);
    }
    for (const p of joints) {
      this.circle(p, 0.012, "#cde");
    }

    // Safety cylinder along the tool z-axis, extending backward from the TCP.
    const tcp = frame.tcp_position as Vec3;
    const zAxis: Vec3 = [frame.tcp_rotation[0][2], frame.tcp_rotation[1][2], frame.tcp_rotation[2][2]];
    const base: Vec3 = [
      tcp[0] - this.options.cylinderHeight * zAxis[0],
      tcp[1] - this.options.cylinderHeight * zAxis[1],
      tcp[2] - this.options.cylinderHeight * zAxis[2],
    ];
    const danger = frame.h0 !== null && frame.h0 > 0;
    this.line(base, tcp, danger ? "rgba(255,80,80,0.8)" : "rgba(90,200,160,0.8)", 14);
    this.circle(tcp, this.options.cylinderRadius, danger ? "rgba(255,80,80,0.35)" : "rgba(90,200,160,0.35)");

    // Forecast ribbon at +/- ribbonSigmaScale sigma (hidden when absent, e.g. CBF).
    if (frame.ribbon && frame.method !== "CBF") {
      const { mu, sigma } = frame.ribbon;
      for (let k = 0; k < mu.length; k++) {
        const s =
          (this.options.ribbonSigmaScale * (sigma[k][0] + sigma[k][1] + sigma[k][2])) / 3;
        this.circle(mu[k] as Vec3, Math.max(s, 0.004), "rgba(120,140,255,0.10)");
      }
      for (let k = 0; k + 1 < mu.length; k++) {
        this.line(mu[k] as Vec3, mu[k + 1] as Vec3, "rgba(140,160,255,0.7)", 2);
      }
    }

    // Measured hand (from the loop) and the ghost the user is dragging.
    if (frame.hand) {
      this.circle(frame.hand as Vec3, this.options.handRadius, "rgba(250,200,90,0.45)", "#fb5");
    }
    if (ghostHand) {
      this.circle(ghostHand, 0.02, dragging ? "#fd6" : "rgba(250,220,130,0.8)");
    }
  }
}
