"""Forward kinematics, geometric Jacobian, and damped pseudoinverse for a 6R arm.

The chain is described by standard Denavit-Hartenberg rows (a, alpha, d, theta0);
each joint transform is Rz(theta0 + q) * Tz(d) * Tx(a) * Rx(alpha). All angles are
unbounded radians; joint limits are optional and off by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_JOINTS = 6


@dataclass(frozen=True)
class LinkParams:
    """One Denavit-Hartenberg row, SI units (meters, radians)."""

    a: float
    alpha: float
    d: float
    theta0: float = 0.0


@dataclass(frozen=True)
class KinematicChain:
    """Serial chain of exactly six revolute joints plus an optional base transform."""

    links: tuple
    base_pose: np.ndarray = field(default_factory=lambda: np.eye(4))
    joint_limits: np.ndarray | None = None  # (6, 2) [min, max], optional

    def __post_init__(self):
        if len(self.links) != N_JOINTS:
            raise ValueError(f"chain must have exactly {N_JOINTS} revolute joints, got {len(self.links)}")
        for link in self.links:
            for v in (link.a, link.alpha, link.d, link.theta0):
                if not np.isfinite(v):
                    raise ValueError("link parameters must be finite")
        if np.asarray(self.base_pose).shape != (4, 4):
            raise ValueError("base_pose must be a 4x4 rigid transform")


@dataclass(frozen=True)
class Pose:
    """Rigid pose: position (m) and a 3x3 orthonormal rotation."""

    position: np.ndarray
    rotation: np.ndarray

    def validate(self, tol=1e-9):
        r = self.rotation
        if np.max(np.abs(r.T @ r - np.eye(3))) > tol:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > tol:
            raise ValueError("rotation determinant is not +1")
        return self


def default_chain() -> KinematicChain:
    """Default 6R parameter set approximating a ~1 m reach collaborative arm.

    These constants are this project's reference robot; the experiments depend on
    workspace scale, not a particular vendor's arm.
    """
    links = (
        LinkParams(a=0.0, alpha=np.pi / 2, d=0.15),
        LinkParams(a=0.45, alpha=0.0, d=0.0),
        LinkParams(a=0.40, alpha=0.0, d=0.0),
        LinkParams(a=0.0, alpha=np.pi / 2, d=0.13),
        LinkParams(a=0.0, alpha=-np.pi / 2, d=0.10),
        LinkParams(a=0.0, alpha=0.0, d=0.08),
    )
    return KinematicChain(links=links)


def chain_from_config(robot_cfg: dict) -> KinematicChain:
    """Build a chain from the JSON config section (robot.links[] with a/alpha/d/theta0)."""
    rows = robot_cfg["links"]
    links = tuple(
        LinkParams(
            a=float(r["a"]),
            alpha=float(r["alpha"]),
            d=float(r["d"]),
            theta0=float(r.get("theta0", 0.0)),
        )
        for r in rows
    )
    base = np.asarray(robot_cfg.get("base_pose", np.eye(4)), dtype=float)
    return KinematicChain(links=links, base_pose=base)


def _dh_transform(link: LinkParams, q_i: float) -> np.ndarray:
    theta = link.theta0 + q_i
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(link.alpha), np.sin(link.alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, link.a * ct],
            [st, ct * ca, -ct * sa, link.a * st],
            [0.0, sa, ca, link.d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def joint_frames(chain: KinematicChain, q) -> list:
    """All intermediate frames: T_0 (base) through T_6 (TCP), as 4x4 arrays."""
    q = np.asarray(q, dtype=float).ravel()
    if q.shape != (N_JOINTS,):
        raise ValueError(f"q must have {N_JOINTS} entries")
    if not np.all(np.isfinite(q)):
        raise ValueError("q must be finite")
    frames = [np.array(chain.base_pose, dtype=float)]
    t = frames[0]
    for link, qi in zip(chain.links, q):
        t = t @ _dh_transform(link, qi)
        frames.append(t)
    return frames


def forward_kinematics(chain: KinematicChain, q) -> Pose:
    """TCP pose for joint angles q (radians)."""
    t = joint_frames(chain, q)[-1]
    return Pose(position=t[:3, 3].copy(), rotation=t[:3, :3].copy())


def jacobian_from_frames(frames) -> np.ndarray:
    """Geometric Jacobian from precomputed joint frames (see joint_frames)."""
    p_tcp = frames[-1][:3, 3]
    z = np.array([frames[i][:3, 2] for i in range(N_JOINTS)])
    p = np.array([frames[i][:3, 3] for i in range(N_JOINTS)])
    jac = np.empty((6, N_JOINTS))
    jac[:3] = np.cross(z, p_tcp[None, :] - p).T
    jac[3:] = z.T
    return jac


def jacobian(chain: KinematicChain, q) -> np.ndarray:
    """Geometric Jacobian at the TCP, 6x6.

    Rows 1-3 map joint rates to TCP linear velocity, rows 4-6 to angular velocity,
    both expressed in the world frame. Column i is the twist from unit velocity of
    joint i: v = z_{i-1} x (p_tcp - p_{i-1}), w = z_{i-1}.
    """
    return jacobian_from_frames(joint_frames(chain, q))


def pseudoinverse(j: np.ndarray, damping: float = 1e-3) -> np.ndarray:
    """Damped pseudoinverse J^T (J J^T + damping^2 I)^-1.

    damping = 0 falls back to a minimum-norm least-squares inverse with singular
    values below 1e-10 truncated, so rank-deficient J stays well defined.
    """
    j = np.asarray(j, dtype=float)
    if damping < 0:
        raise ValueError("damping must be >= 0")
    if damping == 0.0:
        u, s, vt = np.linalg.svd(j, full_matrices=False)
        s_inv = np.where(s > 1e-10, 1.0 / np.where(s > 1e-10, s, 1.0), 0.0)
        return (vt.T * s_inv) @ u.T
    m = j.shape[0]
    return j.T @ np.linalg.solve(j @ j.T + damping**2 * np.eye(m), np.eye(m))
