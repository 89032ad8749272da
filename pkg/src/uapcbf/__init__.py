"""Uncertainty-aware predictive control barrier functions for hand-safe arm control.

Subpackages and modules:
  kinematics  forward kinematics, Jacobian, damped pseudoinverse
  geometry    sphere-cylinder separation and covariance projection
  qp          small dense strictly convex QP solver
  forecast    probabilistic hand-trajectory forecasting (network, baselines, data)
  controller  nominal task-space proportional controller
  barrier     CBF / PCBF / UA-PCBF constraint assembly and safety filter
  sim         deterministic kinematic world and scenario driver
  harness     interaction metrics, sweeps, report emission
  bridge      live teleoperation WebSocket service
"""

__version__ = "0.1.0"
