"""JSON configuration loading for robot, controller, safety, and scenario."""

from __future__ import annotations

import json
from pathlib import Path

from uapcbf.barrier import SafetyConfig
from uapcbf.controller import GainConfig
from uapcbf.kinematics import chain_from_config, default_chain
from uapcbf.sim import HandScript, ScenarioConfig

SAFETY_KEYS = {
    "d_min", "r_cyl", "h_cyl", "r_hand", "gamma", "lambda_r", "alpha_gain",
    "margin_exponent", "horizon", "dt", "method", "violation_threshold",
    "use_paper_half_exp", "open_loop_rollout", "fixed_lambda_p",
}
HAND_KEYS = {
    "kind", "rest_position", "amplitude", "peak_speed", "accel", "rest_time",
    "phase", "waypoints", "segment_time", "path",
}
SCENARIO_KEYS = {
    "robot_waypoints", "waypoint_tolerance", "waypoint_hold", "q0", "duration",
    "control_rate", "forecaster", "checkpoint", "forecast_every", "t_in",
    "noise_std", "phase_jitter", "damping",
}


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def safety_from_dict(d: dict) -> SafetyConfig:
    unknown = set(d) - SAFETY_KEYS
    if unknown:
        raise ValueError(f"unknown safety keys: {sorted(unknown)}")
    # uncertainty.* may also arrive via the nested form used in full configs.
    return SafetyConfig(**d)


def gains_from_dict(d: dict) -> GainConfig:
    return GainConfig(
        k_p=d.get("k_p", 2.0),
        k_r=d.get("k_r", 1.0),
        max_joint_speed=d.get("max_joint_speed", 1.5),
    )


def hand_from_dict(d: dict) -> HandScript:
    unknown = set(d) - HAND_KEYS
    if unknown:
        raise ValueError(f"unknown hand script keys: {sorted(unknown)}")
    d = dict(d)
    for key in ("rest_position", "waypoints"):
        if key in d:
            d[key] = tuple(tuple(p) if isinstance(p, (list, tuple)) else p for p in d[key]) \
                if key == "waypoints" else tuple(d[key])
    return HandScript(**d)


def scenario_from_dict(cfg: dict):
    """Build (ScenarioConfig, chain, seeds) from a JSON document.

    Accepts either a flat scenario object or a document with a "scenario" key,
    plus optional "robot" (links), "controller" (gains), "uncertainty", and
    "metrics" sections and a "seeds" list.
    """
    doc = cfg.get("scenario", cfg)
    seeds = cfg.get("seeds", doc.get("seeds", [0]))
    if isinstance(seeds, int):
        seeds = [seeds]

    safety = dict(doc.get("safety", {}))
    if "method" in doc:
        safety["method"] = doc["method"]
    if "gamma" in doc:
        safety["gamma"] = doc["gamma"]
    uncertainty = cfg.get("uncertainty", doc.get("uncertainty", {}))
    if uncertainty.get("use_paper_half_exp"):
        safety["use_paper_half_exp"] = True
    rollout = cfg.get("rollout", doc.get("rollout", {}))
    if rollout.get("open_loop"):
        safety["open_loop_rollout"] = True

    kwargs = {k: doc[k] for k in SCENARIO_KEYS if k in doc}
    for key in ("robot_waypoints", "q0"):
        if key in kwargs:
            val = kwargs[key]
            kwargs[key] = tuple(tuple(p) if isinstance(p, (list, tuple)) else p for p in val) \
                if key == "robot_waypoints" else tuple(val)

    scenario = ScenarioConfig(
        safety=safety_from_dict(safety),
        gains=gains_from_dict(cfg.get("controller", doc.get("controller", {}))),
        hand=hand_from_dict(doc.get("hand", {})),
        **kwargs,
    )
    chain = chain_from_config(cfg["robot"]) if "robot" in cfg else default_chain()
    return scenario, chain, list(seeds)


def scenario_from_file(path):
    return scenario_from_dict(load_json(path))
