"""Deterministic discrete-time kinematic world and scenario driver.

Integrates joint commands with explicit Euler, scripts the hand (periodic burst
mockup, waypoint replay, CSV replay), and drives the forecast -> safety filter ->
controller loop, emitting one JSON-able trace record per control step. Identical
seeds give byte-identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from uapcbf.barrier import Method, SafetyConfig, SafetyFilter
from uapcbf.controller import GainConfig, nominal_joint_velocity, nominal_twist
from uapcbf.forecast.baselines import baseline_kalman, baseline_linear, baseline_particle
from uapcbf.forecast.dataset import load_checkpoint, read_trajectory_csv
from uapcbf.forecast.network import GaussianForecast, forecast as net_forecast
from uapcbf.kinematics import (
    KinematicChain,
    Pose,
    default_chain,
    forward_kinematics,
    jacobian_from_frames,
    joint_frames,
)

ORACLE_LOG_VAR = -80.0  # effectively zero variance, kept finite
TOOL_DOWN = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])

FORECASTERS = ("trained", "linear", "kalman", "particle", "oracle")


@dataclass
class WorldState:
    t: float
    q: np.ndarray
    hand_history: list  # [(t, measured position)], newest last, >= t_in entries
    tcp: Pose


def step(world: WorldState, u, dt: float, chain: KinematicChain) -> WorldState:
    """Explicit Euler joint integration; TCP recomputed, clock advanced."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    q_new = world.q + np.asarray(u, dtype=float) * dt
    return WorldState(t=world.t + dt, q=q_new, hand_history=world.hand_history, tcp=forward_kinematics(chain, q_new))


@dataclass
class HandScript:
    kind: str = "mockup_burst"  # mockup_burst | waypoint_replay | csv_replay | live
    rest_position: tuple = (0.55, 0.0, 0.15)
    amplitude: float = 0.35
    peak_speed: float = 1.0
    accel: float = 3.5
    rest_time: float = 1.0
    phase: float = 0.0
    waypoints: tuple = ()
    segment_time: float = 1.0
    path: str | None = None

    def __post_init__(self):
        if self.kind == "mockup_burst":
            if self.peak_speed <= 0 or self.accel <= 0 or self.amplitude <= 0:
                raise ValueError("mockup burst needs positive peak speed, accel, amplitude")
            if self.amplitude < self.peak_speed**2 / self.accel:
                raise ValueError("amplitude too small for a trapezoidal stroke at this peak speed")
        elif self.kind == "waypoint_replay":
            if len(self.waypoints) < 2:
                raise ValueError("waypoint replay needs at least two waypoints")
        elif self.kind == "csv_replay":
            if not self.path:
                raise ValueError("csv replay needs a file path")
        elif self.kind != "live":
            raise ValueError(f"unknown hand script kind {self.kind!r}")


def _trapezoid_displacement(tau, peak, accel, amplitude, stroke_time):
    t_a = peak / accel
    d_a = 0.5 * accel * t_a**2
    t_c = stroke_time - 2 * t_a
    if tau <= 0:
        return 0.0
    if tau < t_a:
        return 0.5 * accel * tau**2
    if tau < t_a + t_c:
        return d_a + peak * (tau - t_a)
    if tau < stroke_time:
        rem = stroke_time - tau
        return amplitude - 0.5 * accel * rem**2
    return amplitude


def mockup_hand_position(t: float, script: HandScript) -> np.ndarray:
    """Periodic rest -> trapezoidal up-stroke -> mirror return, piecewise C1.

    Peak speed equals script.peak_speed during the cruise phase; acceleration
    magnitude never exceeds script.accel.
    """
    peak, accel, amp = script.peak_speed, script.accel, script.amplitude
    t_a = peak / accel
    stroke = 2 * t_a + (amp - accel * t_a**2) / peak
    period = script.rest_time + 2 * stroke
    tau = (t + script.phase) % period
    if tau < script.rest_time:
        z = 0.0
    elif tau < script.rest_time + stroke:
        z = _trapezoid_displacement(tau - script.rest_time, peak, accel, amp, stroke)
    else:
        z = amp - _trapezoid_displacement(tau - script.rest_time - stroke, peak, accel, amp, stroke)
    return np.asarray(script.rest_position, dtype=float) + np.array([0.0, 0.0, z])


class _CsvReplay:
    def __init__(self, path, rate):
        _, self.positions = read_trajectory_csv(path)
        self.rate = rate

    def __call__(self, t):
        idx = min(max(int(round(t * self.rate)), 0), len(self.positions) - 1)
        return self.positions[idx]


def hand_position(t: float, script: HandScript, rate: float, replay=None) -> np.ndarray:
    if script.kind == "mockup_burst":
        return mockup_hand_position(t, script)
    if script.kind == "waypoint_replay":
        pts = np.asarray(script.waypoints, dtype=float)
        seg = (t + script.phase) / script.segment_time
        i = int(np.floor(seg)) % len(pts)
        j = (i + 1) % len(pts)
        s = seg - np.floor(seg)
        blend = 10 * s**3 - 15 * s**4 + 6 * s**5
        return pts[i] + blend * (pts[j] - pts[i])
    if script.kind == "csv_replay":
        return replay(t)
    raise ValueError(f"hand script kind {script.kind!r} is not scriptable offline")


@dataclass
class ScenarioConfig:
    safety: SafetyConfig = field(default_factory=SafetyConfig)
    gains: GainConfig = field(default_factory=GainConfig)
    hand: HandScript = field(default_factory=HandScript)
    robot_waypoints: tuple = ((0.45, -0.25, 0.62), (0.45, 0.25, 0.62))
    waypoint_tolerance: float = 0.03
    waypoint_hold: float = 0.0
    q0: tuple = (0.0, -0.6, 1.1, 0.35, -0.6, 0.0)
    duration: float = 20.0
    control_rate: float = 30.0
    forecaster: str = "linear"
    checkpoint: str | None = None
    forecast_every: int = 1  # control steps per forecast; control rate divides forecast rate
    t_in: int = 15
    noise_std: float = 0.002
    phase_jitter: float = 0.4
    damping: float = 1e-3

    def __post_init__(self):
        if self.forecaster not in FORECASTERS:
            raise ValueError(f"forecaster must be one of {FORECASTERS}")
        if self.forecast_every < 1:
            raise ValueError("forecast_every must be >= 1")
        if self.duration <= 0 or self.control_rate <= 0:
            raise ValueError("duration and control_rate must be > 0")


class _WaypointCycler:
    """Ping-pong waypoint targets with a per-waypoint hold time."""

    def __init__(self, waypoints, rotation, tolerance, hold, dt):
        self.points = [np.asarray(p, dtype=float) for p in waypoints]
        self.rotation = rotation
        self.tolerance = tolerance
        self.hold = hold
        self.dt = dt
        self.index = 0
        self._hold_left = 0.0

    def target(self) -> Pose:
        return Pose(position=self.points[self.index], rotation=self.rotation)

    def update(self, tcp_position):
        if np.linalg.norm(tcp_position - self.points[self.index]) < self.tolerance:
            if self._hold_left > 0.0:
                self._hold_left -= self.dt
            else:
                self.index = (self.index + 1) % len(self.points)
                self._hold_left = self.hold


class _Forecaster:
    def __init__(self, cfg: ScenarioConfig, dt, horizon, true_hand_fn):
        self.kind = cfg.forecaster
        self.dt = dt
        self.horizon = horizon
        self.true_hand_fn = true_hand_fn
        self.params = None
        if self.kind == "trained":
            if not cfg.checkpoint:
                raise ValueError("trained forecaster needs a checkpoint path")
            self.params, _ = load_checkpoint(cfg.checkpoint)

    def __call__(self, window, t, seed, step_index) -> GaussianForecast:
        if self.kind == "trained":
            return net_forecast(self.params, window, self.horizon, self.dt)
        if self.kind == "linear":
            return baseline_linear(window, self.horizon, self.dt)
        if self.kind == "kalman":
            return baseline_kalman(window, self.horizon, self.dt)
        if self.kind == "particle":
            return baseline_particle(window, self.horizon, seed=seed * 100_003 + step_index, dt=self.dt)
        mu = np.array([self.true_hand_fn(t + (k + 1) * self.dt) for k in range(self.horizon)])
        return GaussianForecast(mu=mu, log_var=np.full((self.horizon, 3), ORACLE_LOG_VAR), dt=self.dt)


def run_scenario(cfg: ScenarioConfig, seed: int = 0, chain: KinematicChain | None = None) -> list:
    """Run one scenario; returns one trace record per control step."""
    chain = chain or default_chain()
    dt = 1.0 / cfg.control_rate
    safety = replace(cfg.safety, dt=dt)
    rng = np.random.default_rng(seed)
    jitter = float(rng.uniform(0.0, cfg.phase_jitter)) if cfg.phase_jitter > 0 else 0.0
    noise_std = 0.0 if cfg.forecaster == "oracle" else cfg.noise_std

    replay = _CsvReplay(cfg.hand.path, cfg.control_rate) if cfg.hand.kind == "csv_replay" else None

    def true_hand(t):
        return hand_position(t + jitter, cfg.hand, cfg.control_rate, replay)

    forecaster = _Forecaster(cfg, dt, safety.horizon, true_hand)
    filt = SafetyFilter(chain, safety)
    tracker = _WaypointCycler(cfg.robot_waypoints, TOOL_DOWN, cfg.waypoint_tolerance, cfg.waypoint_hold, dt)

    q = np.asarray(cfg.q0, dtype=float).copy()
    history = []
    for k in range(cfg.t_in, 0, -1):
        t_k = -k * dt
        measured = true_hand(t_k) + rng.normal(scale=noise_std, size=3) if noise_std > 0 else true_hand(t_k)
        history.append((t_k, np.asarray(measured, dtype=float)))

    n_steps = int(round(cfg.duration * cfg.control_rate))
    records = []
    fc = None
    fc_age = 0

    for step_index in range(n_steps):
        t = step_index * dt
        hand_true = true_hand(t)
        measured = hand_true + rng.normal(scale=noise_std, size=3) if noise_std > 0 else hand_true.copy()
        history.append((t, measured))
        if len(history) > cfg.t_in:
            history = history[-cfg.t_in :]
        window = np.array([p for _, p in history])

        if fc is None or step_index % cfg.forecast_every == 0:
            fc = forecaster(window, t, seed, step_index)
            fc_age = 0
        else:
            fc_age += 1
        stale = fc_age > 2 * cfg.forecast_every

        frames = joint_frames(chain, q)
        tcp = Pose(position=frames[-1][:3, 3].copy(), rotation=frames[-1][:3, :3].copy())
        tracker.update(tcp.position)
        target = tracker.target()
        u_nom = nominal_joint_velocity(
            nominal_twist(tcp, target, cfg.gains), jacobian_from_frames(frames),
            cfg.damping, cfg.gains.max_joint_speed,
        )

        def rollout_policy(q_roll, _target=target):
            fr = joint_frames(chain, q_roll)
            pose = Pose(position=fr[-1][:3, 3], rotation=fr[-1][:3, :3])
            return nominal_joint_velocity(
                nominal_twist(pose, _target, cfg.gains), jacobian_from_frames(fr),
                cfg.damping, cfg.gains.max_joint_speed,
            )

        hand_vel = (window[-1] - window[-2]) / dt if len(window) >= 2 else np.zeros(3)
        res = filt.filter(u_nom, q, forecast=fc, hand_now=measured,
                          hand_velocity_now=hand_vel, nominal_policy=rollout_policy)

        h_values = [ev.h for ev in res.evaluations]
        records.append(
            {
                "step": step_index,
                "t": t,
                "q": q.tolist(),
                "u_nom": u_nom.tolist(),
                "u_safe": res.u_safe.tolist(),
                "hand_true": hand_true.tolist(),
                "hand": measured.tolist(),
                "tcp": tcp.position.tolist(),
                "d0": res.evaluations[0].d,
                "h0": res.h0,
                "h_min": min(h_values),
                "h_max": max(h_values),
                "sigma_bar": [ev.sigma_bar for ev in res.evaluations],
                "sigma_bar_max": max(ev.sigma_bar for ev in res.evaluations),
                "earliest_violation": res.evaluations[0].earliest_violation,
                "delta_r": res.delta_r,
                "delta_p": res.delta_p,
                "lambda_p": res.lambda_p,
                "qp_status": res.qp_status,
                "qp_iterations": res.qp_iterations,
                "stale_forecast": bool(stale),
                "degraded": bool(res.degraded),
                "violation": bool(res.h0 > safety.violation_threshold),
                "method": safety.method.value,
                "gamma": safety.gamma,
            }
        )
        q = q + res.u_safe * dt

    return records


def write_trace(path, records):
    """JSON-lines trace; deterministic bytes for deterministic records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def read_trace(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def mockup_scenario(method=Method.UA_PCBF, gamma=5.0, forecaster="linear", checkpoint=None,
                    duration=20.0, **safety_overrides) -> ScenarioConfig:
    """Desk-scale mockup: hand bursts upward under a sweeping TCP path."""
    safety = SafetyConfig(method=method, gamma=gamma, **safety_overrides)
    hand = HandScript(kind="mockup_burst", rest_position=(0.50, 0.0, 0.12),
                      amplitude=0.35, peak_speed=1.0, accel=3.5, rest_time=1.0)
    return ScenarioConfig(
        safety=safety,
        hand=hand,
        robot_waypoints=((0.50, -0.28, 0.50), (0.50, 0.28, 0.50)),
        q0=(-0.2816, 1.4405, -1.4810, 1.6113, 1.5708, -1.8524),  # TCP at the first waypoint, tool down
        duration=duration,
        forecaster=forecaster,
        checkpoint=checkpoint,
    )


def handover_scenario(method=Method.UA_PCBF, gamma=5.0, forecaster="linear", checkpoint=None,
                      duration=20.0, **safety_overrides) -> ScenarioConfig:
    """Pick-and-place with a hold at the give pose while the hand moves nearby."""
    safety = SafetyConfig(method=method, gamma=gamma, **safety_overrides)
    hand = HandScript(kind="mockup_burst", rest_position=(0.52, 0.10, 0.15),
                      amplitude=0.30, peak_speed=1.0, accel=3.5, rest_time=1.2)
    return ScenarioConfig(
        safety=safety,
        hand=hand,
        robot_waypoints=((0.40, -0.30, 0.55), (0.55, -0.15, 0.70), (0.55, 0.15, 0.70), (0.45, 0.25, 0.58)),
        waypoint_hold=0.8,
        q0=(-0.2816, 1.4092, -1.1414, 1.3030, 1.5708, -1.8524),
        duration=duration,
        forecaster=forecaster,
        checkpoint=checkpoint,
    )
