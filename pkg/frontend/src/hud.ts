// HUD bindings: every displayed number comes from the state frame.

import type { StateFrame } from "./types.js";

export interface HudElements {
  status: HTMLElement;
  method: HTMLElement;
  gamma: HTMLElement;
  hGauge: HTMLElement;
  hValue: HTMLElement;
  sigmaBar: HTMLElement;
  sigmaValue: HTMLElement;
  violations: HTMLElement;
  deltas: HTMLElement;
  latency: HTMLElement;
  fps: HTMLElement;
}

export function lookupHud(doc: Document): HudElements {
  const get = (id: string) => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing HUD element #${id}`);
    return el;
  };
  return {
    status: get("status"),
    method: get("hud-method"),
    gamma: get("hud-gamma"),
    hGauge: get("h-gauge-fill"),
    hValue: get("h-value"),
    sigmaBar: get("sigma-bar-fill"),
    sigmaValue: get("sigma-value"),
    violations: get("violations"),
    deltas: get("deltas"),
    latency: get("latency"),
    fps: get("fps"),
  };
}

const H_GAUGE_RANGE = 0.25; // meters of h mapped across the gauge

export function updateHud(hud: HudElements, frame: StateFrame, latencyMs: number | null, fps: number): void {
  hud.method.textContent = frame.method;
  hud.gamma.textContent = frame.gamma.toFixed(1);
  hud.violations.textContent = String(frame.violation_count);
  hud.deltas.textContent = `dr ${frame.delta_r.toFixed(4)}  dp ${frame.delta_p.toFixed(4)}`;
  hud.latency.textContent = latencyMs === null ? "-" : `${latencyMs.toFixed(0)} ms`;
  hud.fps.textContent = fps.toFixed(0);

  if (frame.h0 === null) {
    hud.hValue.textContent = "paused";
    hud.hGauge.style.width = "0%";
  } else {
    hud.hValue.textContent = `${(frame.h0 * 1000).toFixed(0)} mm`;
    const frac = Math.min(1, Math.max(0, (frame.h0 + H_GAUGE_RANGE) / (2 * H_GAUGE_RANGE)));
    hud.hGauge.style.width = `${(frac * 100).toFixed(1)}%`;
    hud.hGauge.style.background = frame.h0 > 0 ? "#e55" : "#5c9";
  }

  const sigma = frame.sigma_bar_max;
  if (sigma === null) {
    hud.sigmaValue.textContent = "-";
    hud.sigmaBar.style.width = "0%";
  } else {
    hud.sigmaValue.textContent = `${(sigma * 1000).toFixed(0)} mm`;
    hud.sigmaBar.style.width = `${Math.min(100, (sigma / 0.15) * 100).toFixed(1)}%`;
  }
}
