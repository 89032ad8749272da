// Entry point: wires the bridge client, drag mapping, renderer, HUD, and controls.

import { OrbitCamera } from "./camera.js";
import { HandDragger } from "./drag.js";
import { lookupHud, updateHud } from "./hud.js";
import { BridgeClient, RateLimiter } from "./net.js";
import { SceneRenderer } from "./scene.js";
import type { StateFrame } from "./types.js";

const WS_URL = (window as unknown as { UAPCBF_WS?: string }).UAPCBF_WS ?? "ws://127.0.0.1:8700/ws";
const CONTROL_RATE_HZ = 30;

function start(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");
  const camera = new OrbitCamera();
  camera.width = canvas.width;
  camera.height = canvas.height;
  const renderer = new SceneRenderer(ctx, camera);
  const hud = lookupHud(document);
  const dragger = new HandDragger(camera);

  let latest: StateFrame | null = null;
  let banner = "connecting";
  const client = new BridgeClient(WS_URL, {
    onState: () => {
      // frames land in client.frames; the render loop coalesces to the newest
    },
    onError: (err) => {
      banner = err.code === "driver_taken" ? "viewer only (driver slot taken)" : `error: ${err.code}`;
    },
    onStatus: (status) => {
      banner = status === "open" ? "" : status === "closed" ? "disconnected, retrying" : "connecting";
    },
  });
  client.connect();

  // Pointer handling: left-drag moves the hand, right-drag orbits, wheel = depth.
  let dragging = false;
  let orbiting = false;
  let lastPointer: [number, number] = [0, 0];
  canvas.addEventListener("pointerdown", (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    lastPointer = [ev.offsetX, ev.offsetY];
    if (ev.button === 2 || ev.shiftKey) orbiting = true;
    else {
      dragging = true;
      dragger.moveTo(ev.offsetX, ev.offsetY);
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (dragging) dragger.moveTo(ev.offsetX, ev.offsetY);
    else if (orbiting) {
      camera.orbit(-(ev.offsetX - lastPointer[0]) * 0.008, (ev.offsetY - lastPointer[1]) * 0.006);
      lastPointer = [ev.offsetX, ev.offsetY];
    }
  });
  const stopPointer = () => {
    dragging = false;
    orbiting = false;
  };
  canvas.addEventListener("pointerup", stopPointer);
  canvas.addEventListener("pointerleave", stopPointer);
  canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    if (ev.ctrlKey) camera.zoom(ev.deltaY > 0 ? 1.08 : 0.93);
    else dragger.adjustDepth(ev.deltaY > 0 ? -0.02 : 0.02);
  });

  // Hand poses stream at the control rate while the driver is engaged; a
  // stationary pointer keeps emitting the held pose.
  let engaged = false;
  canvas.addEventListener("pointerdown", () => {
    engaged = true;
  });
  window.setInterval(() => {
    if (engaged) client.send(dragger.nextPose());
  }, 1000 / CONTROL_RATE_HZ);

  // Controls: method selector and gamma slider, debounced to <= 10 msgs/s.
  const methodSelect = document.getElementById("method") as HTMLSelectElement;
  const gammaSlider = document.getElementById("gamma") as HTMLInputElement;
  const gammaLabel = document.getElementById("gamma-label") as HTMLElement;
  const pauseButton = document.getElementById("pause") as HTMLButtonElement;
  const configLimiter = new RateLimiter(100);
  let pendingConfig: { method?: string; gamma?: number } | null = null;

  const pushConfig = () => {
    if (pendingConfig && configLimiter.ready()) {
      client.send({ kind: "set_config", ...pendingConfig });
      pendingConfig = null;
    }
  };
  methodSelect.addEventListener("change", () => {
    pendingConfig = { ...(pendingConfig ?? {}), method: methodSelect.value };
    pushConfig();
  });
  gammaSlider.addEventListener("input", () => {
    gammaLabel.textContent = Number(gammaSlider.value).toFixed(1);
    pendingConfig = { ...(pendingConfig ?? {}), gamma: Number(gammaSlider.value) };
    pushConfig();
  });
  window.setInterval(pushConfig, 100);
  pauseButton.addEventListener("click", () => {
    engaged = !engaged;
    pauseButton.textContent = engaged ? "pause" : "resume";
  });

  // Render loop with frame coalescing and an FPS estimate.
  let frames = 0;
  let fps = 0;
  let lastFpsWall = performance.now();
  const tick = () => {
    const fresh = client.frames.take();
    if (fresh) latest = fresh;
    renderer.render(latest, dragger.position, dragging);
    if (latest) {
      updateHud(hud, latest, client.latencyMs, fps);
      // The server state is authoritative: reflect acknowledged values.
      if (document.activeElement !== gammaSlider) {
        gammaSlider.value = String(latest.gamma);
        gammaLabel.textContent = latest.gamma.toFixed(1);
      }
      if (document.activeElement !== methodSelect) methodSelect.value = latest.method;
    }
    hud.status.textContent = banner || (latest?.paused ? "paused (drag to drive)" : "live");
    frames += 1;
    const now = performance.now();
    if (now - lastFpsWall >= 1000) {
      fps = (frames * 1000) / (now - lastFpsWall);
      frames = 0;
      lastFpsWall = now;
    }
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}

window.addEventListener("DOMContentLoaded", start);
