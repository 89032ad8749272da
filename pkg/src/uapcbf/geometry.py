"""Sphere-cylinder separation distance, its gradient, and covariance projection.

The robot's last link and end-effector are bounded by a capped cylinder, the
operator's hand by a sphere. Separation is measured from the sphere center to the
closest point on the cylinder's axis segment, minus the cylinder radius; the
interaction axis points from that closest point toward the hand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_DEGENERATE_EPS = 1e-12


class DegenerateGeometryError(ValueError):
    """Sphere center lies on the cylinder axis; the interaction axis is arbitrary."""


@dataclass(frozen=True)
class HandSphere:
    center: np.ndarray  # (3,) m
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("hand sphere radius must be > 0")


@dataclass(frozen=True)
class LinkCylinder:
    base: np.ndarray  # (3,) m, start of the axis segment
    axis: np.ndarray  # (3,) unit vector, base -> cap
    height: float
    radius: float

    def __post_init__(self):
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-9:
            raise ValueError("cylinder axis must be a unit vector")
        if self.height <= 0 or self.radius <= 0:
            raise ValueError("cylinder height and radius must be > 0")


@dataclass(frozen=True)
class SeparationResult:
    distance: float  # ||o - c|| - r_cyl, negative when the sphere center is inside
    closest_axis_point: np.ndarray
    interaction_axis: np.ndarray  # unit, from closest axis point toward the hand
    degenerate: bool


def _fallback_axis(axis: np.ndarray) -> np.ndarray:
    # Deterministic direction orthogonal to the axis: world +x projected onto the
    # orthogonal plane, or +y when the axis is (anti)parallel to x.
    cand = np.array([1.0, 0.0, 0.0])
    perp = cand - np.dot(cand, axis) * axis
    n = np.linalg.norm(perp)
    if n < 1e-6:
        cand = np.array([0.0, 1.0, 0.0])
        perp = cand - np.dot(cand, axis) * axis
        n = np.linalg.norm(perp)
    return perp / n


def separation(sphere: HandSphere, cyl: LinkCylinder) -> SeparationResult:
    """Distance from the hand sphere center to the cylinder surface along the axis model.

    The closest point c is the projection of the center onto the axis segment,
    clamped to [0, height]. distance = ||o - c|| - r_cyl. A center exactly on the
    axis is flagged degenerate and gets a fixed fallback interaction axis.
    """
    o = np.asarray(sphere.center, dtype=float)
    t = float(np.dot(o - cyl.base, cyl.axis))
    t = min(max(t, 0.0), cyl.height)
    c = cyl.base + t * cyl.axis
    diff = o - c
    n = float(np.linalg.norm(diff))
    if n < _DEGENERATE_EPS:
        return SeparationResult(
            distance=n - cyl.radius,
            closest_axis_point=c,
            interaction_axis=_fallback_axis(np.asarray(cyl.axis, dtype=float)),
            degenerate=True,
        )
    return SeparationResult(
        distance=n - cyl.radius,
        closest_axis_point=c,
        interaction_axis=diff / n,
        degenerate=False,
    )


def separation_gradient(sphere: HandSphere, cyl: LinkCylinder):
    """Gradients of the separation distance w.r.t. the sphere center and cylinder base.

    Returns (d_center, d_base), each (3,). With the closest point interior to the
    segment both reduce to +/- the interaction axis; the clamped (cap) cases give
    the same expressions because the closest point then moves rigidly with the base.
    Raises DegenerateGeometryError when the center sits on the axis.
    """
    res = separation(sphere, cyl)
    if res.degenerate:
        raise DegenerateGeometryError("sphere center on cylinder axis")
    u = res.interaction_axis
    return u.copy(), -u.copy()


def project_covariance(sigma: np.ndarray, u_hat: np.ndarray) -> float:
    """Quadratic form u^T Sigma u for a diagonal PSD covariance and unit direction."""
    sigma = np.asarray(sigma, dtype=float)
    u = np.asarray(u_hat, dtype=float)
    if sigma.shape == (3,):
        diag = sigma
    elif sigma.shape == (3, 3):
        diag = np.diag(sigma)
    else:
        raise ValueError("covariance must be a length-3 diagonal or 3x3 matrix")
    if np.any(diag < 0):
        raise ValueError("covariance diagonal must be nonnegative")
    return float(np.dot(diag, u * u))
