"""Nominal task-space proportional velocity controller."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uapcbf.kinematics import Pose, pseudoinverse


@dataclass(frozen=True)
class GainConfig:
    k_p: float | np.ndarray = 2.0  # 1/s, position gain (scalar or per-axis)
    k_r: float | np.ndarray = 1.0  # 1/s, orientation gain
    max_joint_speed: float = 1.5  # rad/s per joint

    def __post_init__(self):
        if np.any(np.asarray(self.k_p) <= 0) or np.any(np.asarray(self.k_r) <= 0):
            raise ValueError("gains must be > 0")
        if self.max_joint_speed <= 0:
            raise ValueError("max_joint_speed must be > 0")


def _vee(m: np.ndarray) -> np.ndarray:
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def rotation_error(r_desired: np.ndarray, r_current: np.ndarray) -> np.ndarray:
    """World-frame orientation error 0.5 * (Rd Rc^T - Rc Rd^T) under the vee map."""
    return _vee(0.5 * (r_desired @ r_current.T - r_current @ r_desired.T))


def nominal_twist(current: Pose, desired: Pose, gains: GainConfig) -> np.ndarray:
    """Proportional task-space twist (v, w) from pose error."""
    e_p = desired.position - current.position
    e_r = rotation_error(desired.rotation, current.rotation)
    return np.concatenate([np.asarray(gains.k_p) * e_p, np.asarray(gains.k_r) * e_r])


def nominal_joint_velocity(twist: np.ndarray, jac: np.ndarray, damping: float = 1e-3,
                           max_joint_speed: float = 1.5) -> np.ndarray:
    """Map a twist to joint space with the damped pseudoinverse, then clamp per joint."""
    u = pseudoinverse(jac, damping) @ np.asarray(twist, dtype=float)
    return np.clip(u, -max_joint_speed, max_joint_speed)
