"""Live teleoperation service: streamed hand poses in, state frames out.

One WebSocket endpoint (/ws) serves a single driver plus any number of viewers.
The control loop runs on its own thread at the configured rate; connection
readers talk to it only through a single-slot newest-wins hand-pose mailbox and
a pending-config cell, both applied atomically at the next control step. Slow
viewers get frames dropped (their queue is newest-wins), never awaited.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import time
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from uapcbf.barrier import Method, SafetyFilter
from uapcbf.controller import nominal_joint_velocity, nominal_twist
from uapcbf.harness import violation_events
from uapcbf.kinematics import default_chain, forward_kinematics, jacobian
from uapcbf.sim import TOOL_DOWN, ScenarioConfig, _Forecaster, _WaypointCycler, mockup_scenario

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
HOLD_TIMEOUT = 1.0  # s of missing driver input before the loop pauses


class Mailbox:
    """Single-slot newest-wins mailbox; safe across one writer and one reader."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = None
        self._stamp = 0

    def put(self, value):
        with self._lock:
            self._value = value
            self._stamp += 1

    def get(self):
        with self._lock:
            return self._value, self._stamp


class ControlLoop(threading.Thread):
    """Wall-clock paced control loop; sole owner of the world state."""

    def __init__(self, scenario: ScenarioConfig, rate_hz: float = 30.0, on_frame=None):
        super().__init__(daemon=True, name="control-loop")
        self.scenario = scenario
        self.dt = 1.0 / rate_hz
        self.rate_hz = rate_hz
        self.on_frame = on_frame or (lambda frame: None)
        self.mailbox = Mailbox()
        self.pending_config = Mailbox()
        self.chain = default_chain()
        self._halt = threading.Event()
        self._safety = replace(scenario.safety, dt=self.dt)
        self._jitter = []  # measured loop period error, seconds
        self.frames_emitted = 0

    def stop(self):
        self._halt.set()

    def submit_hand_pose(self, t, xyz):
        self.mailbox.put((float(t), np.asarray(xyz, dtype=float)))

    def submit_config(self, changes: dict):
        self.pending_config.put(dict(changes))

    def run(self):
        cfg = self.scenario
        safety = self._safety
        filt = SafetyFilter(self.chain, safety)
        tracker = _WaypointCycler(cfg.robot_waypoints, TOOL_DOWN, cfg.waypoint_tolerance,
                                  cfg.waypoint_hold, self.dt)
        forecaster = _Forecaster(cfg, self.dt, safety.horizon, true_hand_fn=lambda t: np.zeros(3))
        q = np.asarray(cfg.q0, dtype=float).copy()
        history: list = []
        violation_flags: list = []
        last_pose_wall = None
        last_stamp = 0
        step_index = 0
        next_tick = time.perf_counter()

        while not self._halt.is_set():
            now = time.perf_counter()
            if now < next_tick:
                time.sleep(next_tick - now)
            self._jitter.append(abs(time.perf_counter() - next_tick))
            next_tick += self.dt
            t = step_index * self.dt

            changes, _ = self.pending_config.get()
            if changes:
                self.pending_config.put(None)
                if changes is not None:
                    safety = replace(
                        safety,
                        method=Method(changes.get("method", safety.method)),
                        gamma=float(changes.get("gamma", safety.gamma)),
                    )
                    filt = SafetyFilter(self.chain, safety)

            pose, stamp = self.mailbox.get()
            if stamp != last_stamp and pose is not None:
                last_stamp = stamp
                last_pose_wall = time.perf_counter()
                history.append((t, pose[1]))
                if len(history) > cfg.t_in:
                    history = history[-cfg.t_in :]
            elif history:
                if last_pose_wall is not None and time.perf_counter() - last_pose_wall <= HOLD_TIMEOUT:
                    history.append((t, history[-1][1]))
                    history = history[-cfg.t_in :]

            paused = (
                last_pose_wall is None
                or time.perf_counter() - last_pose_wall > HOLD_TIMEOUT
                or len(history) < cfg.t_in
            )

            tcp = forward_kinematics(self.chain, q)
            frame = {
                "kind": "state",
                "schema_version": SCHEMA_VERSION,
                "t": t,
                "paused": paused,
                "q": q.tolist(),
                "tcp_position": tcp.position.tolist(),
                "tcp_rotation": tcp.rotation.tolist(),
                "method": safety.method.value,
                "gamma": safety.gamma,
                "violation_count": len(violation_events(violation_flags, safety.violation_threshold)),
            }

            if paused:
                frame.update({"hand": None, "ribbon": None, "h0": None, "h_min": None,
                              "sigma_bar_max": None, "delta_r": 0.0, "delta_p": 0.0})
            else:
                window = np.array([p for _, p in history])
                fc = forecaster(window, t, 0, step_index)
                tracker.update(tcp.position)
                target = tracker.target()
                u_nom = nominal_joint_velocity(
                    nominal_twist(tcp, target, cfg.gains), jacobian(self.chain, q),
                    cfg.damping, cfg.gains.max_joint_speed,
                )

                def rollout_policy(q_roll, _target=target):
                    pose_r = forward_kinematics(self.chain, q_roll)
                    return nominal_joint_velocity(
                        nominal_twist(pose_r, _target, cfg.gains), jacobian(self.chain, q_roll),
                        cfg.damping, cfg.gains.max_joint_speed,
                    )

                hand_vel = (window[-1] - window[-2]) / self.dt if len(window) >= 2 else np.zeros(3)
                res = filt.filter(u_nom, q, forecast=fc, hand_now=window[-1],
                                  hand_velocity_now=hand_vel, nominal_policy=rollout_policy)
                q = q + res.u_safe * self.dt
                h_values = [ev.h for ev in res.evaluations]
                violation_flags.append(res.h0)
                frame.update(
                    {
                        "hand": window[-1].tolist(),
                        "ribbon": {
                            "mu": fc.mu.tolist(),
                            "sigma": np.sqrt(fc.variance(safety.use_paper_half_exp)).tolist(),
                        },
                        "h0": res.h0,
                        "h_min": min(h_values),
                        "sigma_bar_max": max(ev.sigma_bar for ev in res.evaluations),
                        "delta_r": res.delta_r,
                        "delta_p": res.delta_p,
                        "violation_count": len(violation_events(violation_flags, safety.violation_threshold)),
                    }
                )

            self.frames_emitted += 1
            self.on_frame(frame)
            step_index += 1

    def jitter_stats(self):
        arr = np.array(self._jitter[1:]) if len(self._jitter) > 1 else np.zeros(1)
        return {"mean": float(arr.mean()), "p95": float(np.percentile(arr, 95)), "dt": self.dt}


def error_frame(code, detail=""):
    return {"kind": "error", "schema_version": SCHEMA_VERSION, "code": code, "detail": detail}


def create_app(scenario: ScenarioConfig | None = None, rate_hz: float = 30.0) -> FastAPI:
    from contextlib import asynccontextmanager

    scenario = scenario or replace(mockup_scenario(forecaster="linear"), noise_std=0.0)
    state = {
        "loop": None,
        "driver": None,  # id of the connection holding the driver slot
        "viewers": {},  # id -> asyncio.Queue
        "aio_loop": None,
    }

    @asynccontextmanager
    async def lifespan(_app):
        state["aio_loop"] = asyncio.get_running_loop()
        loop = ControlLoop(scenario, rate_hz=rate_hz, on_frame=broadcast)
        state["loop"] = loop
        loop.start()
        try:
            yield
        finally:
            loop.stop()
            loop.join(timeout=2.0)

    app = FastAPI(title="uapcbf bridge", lifespan=lifespan)

    def broadcast(frame):
        aio = state["aio_loop"]
        if aio is None:
            return
        payload = json.dumps(frame)

        def push():
            for queue in list(state["viewers"].values()):
                if queue.full():
                    try:
                        queue.get_nowait()  # drop the oldest, newest wins
                    except asyncio.QueueEmpty:
                        pass
                queue.put_nowait(payload)

        try:
            aio.call_soon_threadsafe(push)
        except RuntimeError:
            pass

    @app.get("/healthz")
    async def healthz():
        loop = state["loop"]
        return {"ok": loop is not None and loop.is_alive(), "frames": loop.frames_emitted if loop else 0}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        conn_id = id(ws)
        queue: asyncio.Queue = asyncio.Queue(maxsize=2)
        state["viewers"][conn_id] = queue
        loop: ControlLoop = state["loop"]
        last_t = -np.inf

        async def sender():
            while True:
                payload = await queue.get()
                await ws.send_text(payload)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    kind = msg["kind"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    await ws.send_text(json.dumps(error_frame("malformed", "not a JSON message with a kind")))
                    continue
                if kind == "hand_pose":
                    if state["driver"] is None:
                        state["driver"] = conn_id
                    if state["driver"] != conn_id:
                        await ws.send_text(json.dumps(error_frame("driver_taken", "another driver is connected")))
                        continue
                    try:
                        t, x, y, z = float(msg["t"]), float(msg["x"]), float(msg["y"]), float(msg["z"])
                    except (KeyError, TypeError, ValueError):
                        await ws.send_text(json.dumps(error_frame("malformed", "hand_pose needs t, x, y, z")))
                        continue
                    if t < last_t:
                        await ws.send_text(json.dumps(error_frame("malformed", "timestamps must be nondecreasing")))
                        continue
                    last_t = t
                    loop.submit_hand_pose(t, (x, y, z))
                elif kind == "set_config":
                    changes = {k: msg[k] for k in ("method", "gamma") if k in msg}
                    try:
                        if "method" in changes:
                            Method(changes["method"])
                        if "gamma" in changes and float(changes["gamma"]) < 0:
                            raise ValueError("gamma must be >= 0")
                    except ValueError as exc:
                        await ws.send_text(json.dumps(error_frame("rejected_config", str(exc))))
                        continue
                    loop.submit_config(changes)
                else:
                    await ws.send_text(json.dumps(error_frame("malformed", f"unknown kind {kind!r}")))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            state["viewers"].pop(conn_id, None)
            if state["driver"] == conn_id:
                state["driver"] = None  # loop pauses after the hold timeout

    return app


def serve(port: int = 8700, config_path=None, rate_hz: float = 30.0):
    """Run the bridge under uvicorn (blocking)."""
    import uvicorn

    scenario = None
    if config_path:
        from uapcbf.config import scenario_from_file

        scenario, _, _ = scenario_from_file(config_path)
    app = create_app(scenario, rate_hz=rate_hz)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
