#!/usr/bin/env python3
"""Sphere-cylinder separation distance, interaction axis, covariance projection."""

import numpy as np

from uapcbf.geometry import HandSphere, LinkCylinder, project_covariance, separation

cyl = LinkCylinder(base=np.zeros(3), axis=np.array([0.0, 0.0, 1.0]), height=0.4, radius=0.05)
print("Cylinder: base origin, axis +z, height 0.4 m, radius 0.05 m\n")

for label, center in [
    ("beside the barrel", (0.30, 0.0, 0.20)),
    ("above the cap", (0.0, 0.0, 0.70)),
    ("diagonal past the cap", (0.20, 0.0, 0.55)),
    ("inside the radius", (0.03, 0.0, 0.20)),
]:
    res = separation(HandSphere(center=np.array(center, dtype=float), radius=0.08), cyl)
    print(f"hand at {center} ({label}):")
    print(f"  distance {res.distance:+.3f} m, closest axis point {np.round(res.closest_axis_point, 3).tolist()}")
    print(f"  interaction axis {np.round(res.interaction_axis, 3).tolist()}\n")

# The forecast covariance only matters along the interaction axis.
sigma = np.array([0.02**2, 0.10**2, 0.01**2])  # variances per world axis, m^2
print(f"diagonal covariance (std): {np.round(np.sqrt(sigma) * 1000, 1).tolist()} mm")
for direction in (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0.577, 0.577, 0.577])):
    proj = project_covariance(sigma, direction / np.linalg.norm(direction))
    print(f"  projected std along {np.round(direction, 2).tolist()}: {np.sqrt(proj) * 1000:.1f} mm")
