// Wire schema shared with the bridge (schema_version 1).

export const SCHEMA_VERSION = 1;

export interface HandPoseMsg {
  kind: "hand_pose";
  t: number;
  x: number;
  y: number;
  z: number;
}

export interface SetConfigMsg {
  kind: "set_config";
  method?: string;
  gamma?: number;
}

export type InboundMsg = HandPoseMsg | SetConfigMsg;

export interface Ribbon {
  mu: number[][]; // [horizon][3]
  sigma: number[][]; // [horizon][3], per-coordinate std
}

export interface StateFrame {
  kind: "state";
  schema_version: number;
  t: number;
  paused: boolean;
  q: number[];
  tcp_position: number[];
  tcp_rotation: number[][];
  method: string;
  gamma: number;
  violation_count: number;
  hand: number[] | null;
  ribbon: Ribbon | null;
  h0: number | null;
  h_min: number | null;
  sigma_bar_max: number | null;
  delta_r: number;
  delta_p: number;
}

export interface ErrorFrame {
  kind: "error";
  schema_version: number;
  code: string;
  detail: string;
}

export type ServerFrame = StateFrame | ErrorFrame;

export function parseServerFrame(raw: string): ServerFrame | null {
  try {
    const obj = JSON.parse(raw);
    if (obj && (obj.kind === "state" || obj.kind === "error")) {
      return obj as ServerFrame;
    }
  } catch {
    // fall through
  }
  return null;
}

export type Vec3 = [number, number, number];
