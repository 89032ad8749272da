"""Synthetic hand-trajectory generator, CSV corpus I/O, and model checkpoints.

Recordings are built from randomized motion segments: rest holds, minimum-jerk
reaches, circular arcs, and rapid up-down bursts, plus additive sensor noise.
The mix targets desk-scale statistics (per-second-subsequence mean speed around
0.17 m/s, peak speeds far below the 7.5 m/s cap).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from uapcbf.forecast.network import LstmLayerParams, NetParams

CSV_HEADER = "t,x,y,z"
CHECKPOINT_MAGIC = b"UAPCBF\x00\x01"


@dataclass
class SynthConfig:
    n_recordings: int = 100
    duration: float = 12.0  # s per recording
    rate: float = 30.0  # Hz
    noise_std: float = 0.001  # m, additive sensor noise
    max_speed: float = 7.5  # m/s, hard cap checked downstream
    # Segment mix (normalized internally).
    p_rest: float = 0.50
    p_reach: float = 0.22
    p_arc: float = 0.14
    p_burst: float = 0.14
    # Motion ranges.
    reach_dist: tuple = (0.08, 0.40)
    reach_peak_speed: tuple = (0.15, 0.6)
    arc_radius: tuple = (0.05, 0.18)
    arc_speed: tuple = (0.08, 0.45)
    burst_amplitude: tuple = (0.10, 0.30)
    burst_peak_speed: tuple = (0.8, 2.2)
    rest_duration: tuple = (0.4, 1.6)
    workspace_center: tuple = (0.55, 0.0, 0.25)
    workspace_half_extents: tuple = (0.25, 0.35, 0.22)


def _min_jerk(p0, p1, duration, rate, t0):
    """Minimum-jerk point-to-point samples on the model's clock, excluding t0."""
    n = max(int(round(duration * rate)), 1)
    ts = t0 + np.arange(1, n + 1) / rate
    s = np.arange(1, n + 1) / n
    shape = 10 * s**3 - 15 * s**4 + 6 * s**5
    pos = p0[None, :] + shape[:, None] * (p1 - p0)[None, :]
    return ts, pos


def _segment_rest(rng, cfg, p0, t0):
    duration = rng.uniform(*cfg.rest_duration)
    n = max(int(round(duration * cfg.rate)), 1)
    ts = t0 + np.arange(1, n + 1) / cfg.rate
    drift = np.cumsum(rng.normal(scale=2e-4, size=(n, 3)), axis=0)
    return ts, p0[None, :] + drift


def _clip_to_workspace(p, cfg):
    center = np.asarray(cfg.workspace_center)
    half = np.asarray(cfg.workspace_half_extents)
    return np.clip(p, center - half, center + half)


def _segment_reach(rng, cfg, p0, t0):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    dist = rng.uniform(*cfg.reach_dist)
    target = _clip_to_workspace(p0 + dist * direction, cfg)
    dist = float(np.linalg.norm(target - p0))
    if dist < 1e-6:
        return _segment_rest(rng, cfg, p0, t0)
    peak = rng.uniform(*cfg.reach_peak_speed)
    duration = 1.875 * dist / peak  # min-jerk peak speed = 1.875 * dist / T
    return _min_jerk(p0, target, duration, cfg.rate, t0)


def _segment_arc(rng, cfg, p0, t0):
    radius = rng.uniform(*cfg.arc_radius)
    speed = rng.uniform(*cfg.arc_speed)
    span = rng.uniform(0.25 * np.pi, 1.5 * np.pi)
    duration = span * radius / speed
    n = max(int(round(duration * cfg.rate)), 1)
    ts = t0 + np.arange(1, n + 1) / cfg.rate
    # Random orthonormal in-plane basis.
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    v = rng.normal(size=3)
    v -= np.dot(v, u) * u
    v /= np.linalg.norm(v)
    center = p0 - radius * u
    angles = span * np.arange(1, n + 1) / n
    pos = center[None, :] + radius * (np.cos(angles)[:, None] * u[None, :] + np.sin(angles)[:, None] * v[None, :])
    return ts, _clip_to_workspace(pos, cfg)


def _segment_burst(rng, cfg, p0, t0):
    amplitude = rng.uniform(*cfg.burst_amplitude)
    peak = rng.uniform(*cfg.burst_peak_speed)
    half = 1.875 * amplitude / peak
    top = p0 + np.array([0.0, 0.0, amplitude])
    ts_up, pos_up = _min_jerk(p0, top, half, cfg.rate, t0)
    ts_down, pos_down = _min_jerk(top, p0, half, cfg.rate, ts_up[-1] if len(ts_up) else t0)
    return np.concatenate([ts_up, ts_down]), np.vstack([pos_up, pos_down])


def synth_recordings(cfg: SynthConfig, seed: int):
    """Deterministic list of (t, positions) recordings with sensor noise applied."""
    rng = np.random.default_rng(seed)
    probs = np.array([cfg.p_rest, cfg.p_reach, cfg.p_arc, cfg.p_burst], dtype=float)
    probs /= probs.sum()
    segments = (_segment_rest, _segment_reach, _segment_arc, _segment_burst)
    recordings = []
    for _ in range(cfg.n_recordings):
        center = np.asarray(cfg.workspace_center)
        half = np.asarray(cfg.workspace_half_extents)
        p = center + rng.uniform(-0.5, 0.5, 3) * half
        ts = [np.array([0.0])]
        pos = [p[None, :]]
        t = 0.0
        while t < cfg.duration:
            kind = rng.choice(4, p=probs)
            seg_t, seg_p = segments[kind](rng, cfg, pos[-1][-1], t)
            if len(seg_t) == 0:
                continue
            ts.append(seg_t)
            pos.append(seg_p)
            t = float(seg_t[-1])
        t_all = np.concatenate(ts)
        p_all = np.vstack(pos)
        keep = t_all <= cfg.duration + 1e-9
        t_all, p_all = t_all[keep], p_all[keep]
        if cfg.noise_std > 0:
            p_all = p_all + rng.normal(scale=cfg.noise_std, size=p_all.shape)
        recordings.append((t_all, p_all))
    return recordings


def subsequence_speed_stats(recordings, rate: float = 30.0, window_s: float = 1.0):
    """Per-1s-subsequence mean speeds plus the global max sample speed."""
    n_win = int(round(window_s * rate))
    means = []
    max_speed = 0.0
    for _, pos in recordings:
        speeds = np.linalg.norm(np.diff(pos, axis=0), axis=1) * rate
        if len(speeds) == 0:
            continue
        max_speed = max(max_speed, float(speeds.max()))
        for start in range(0, len(speeds) - n_win + 1, n_win):
            means.append(float(speeds[start : start + n_win].mean()))
    return np.array(means), max_speed


def make_dataset(recordings, t_in: int, t_out: int, stride: int = 5):
    """Slice recordings into (window, truth) training pairs."""
    pairs = []
    span = t_in + t_out
    for _, pos in recordings:
        for start in range(0, len(pos) - span + 1, stride):
            pairs.append((pos[start : start + t_in], pos[start + t_in : start + span]))
    return pairs


def write_trajectory_csv(path, t, pos):
    path = Path(path)
    lines = [CSV_HEADER]
    for ti, (x, y, z) in zip(t, pos):
        lines.append(f"{ti:.17g},{x:.17g},{y:.17g},{z:.17g}")
    path.write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path):
    raw = Path(path).read_text().strip().splitlines()
    if raw[0].strip() != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}: {raw[0]!r}")
    data = np.array([[float(v) for v in line.split(",")] for line in raw[1:]])
    return data[:, 0], data[:, 1:4]


def generate_corpus(cfg: SynthConfig, out_dir, seed: int):
    """Write one CSV per recording plus a manifest; deterministic under seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    recordings = synth_recordings(cfg, seed)
    names = []
    for i, (t, pos) in enumerate(recordings):
        name = f"recording_{i:04d}.csv"
        write_trajectory_csv(out_dir / name, t, pos)
        names.append(name)
    manifest = {"seed": seed, "rate_hz": cfg.rate, "files": names}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return [out_dir / n for n in names]


def save_checkpoint(path, params: NetParams, meta: dict | None = None):
    """Binary checkpoint: magic + version, JSON shape header, LE float64 payload."""
    arrays = params.arrays()
    header = {
        "version": 1,
        "hidden_size": params.hidden_size,
        "num_layers": params.num_layers,
        "shapes": [list(a.shape) for a in arrays],
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for a in arrays:
            f.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple:
    with open(path, "rb") as f:
        magic = f.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path} is not a model checkpoint")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        h, nl = header["hidden_size"], header["num_layers"]
        arrays = []
        for shape in header["shapes"]:
            n = int(np.prod(shape))
            arrays.append(np.frombuffer(f.read(8 * n), dtype="<f8").reshape(shape).astype(float))
    layers_per_stack = nl * 3
    enc_arrays = arrays[:layers_per_stack]
    dec_arrays = arrays[layers_per_stack : 2 * layers_per_stack]
    encoder = [LstmLayerParams(*enc_arrays[3 * i : 3 * i + 3]) for i in range(nl)]
    decoder = [LstmLayerParams(*dec_arrays[3 * i : 3 * i + 3]) for i in range(nl)]
    w_o, b_o = arrays[-2], arrays[-1]
    params = NetParams(encoder, decoder, w_o, b_o, h, nl)
    return params, header["meta"]
