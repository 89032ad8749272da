#!/usr/bin/env python3
"""The dense active-set QP solver: clamps, slacks, certified residuals."""

import numpy as np

from uapcbf.qp import QpProblem, solve

# Project a nominal command onto a halfspace: the classic safety-filter shape.
u_nom = np.array([0.4, 0.2, -0.1])
row = np.array([[1.0, 1.0, 0.0]])
sol = solve(QpProblem(hessian=np.eye(3), linear=-u_nom, a_ineq=row, b_ineq=np.array([0.1])))
print(f"nominal {u_nom.tolist()} filtered to {np.round(sol.x, 4).tolist()}")
print(f"  active rows {sol.active_set}, max KKT residual {sol.kkt.max():.2e}\n")

# Slack-penalized feasibility: two contradictory rows, one shared slack.
hess = np.diag([1.0, 200.0])
a = np.array([[1.0, -1.0], [-1.0, -1.0]])  # x <= -0.2 + d and -x <= -0.3 + d
b = np.array([-0.2, -0.3])
sol = solve(QpProblem(hessian=hess, linear=np.zeros(2), a_ineq=a, b_ineq=b, lower_bounds=np.array([-np.inf, 0.0])))
print("contradictory rows resolved through the slack variable:")
print(f"  x = {sol.x[0]:+.4f}, slack = {sol.x[1]:.4f}, status {sol.status}\n")

# Genuinely infeasible (no slack lets both hold): certified by the dual.
sol = solve(QpProblem(hessian=np.eye(1), linear=np.zeros(1),
                      a_ineq=np.array([[1.0], [-1.0]]), b_ineq=np.array([0.0, -1.0])))
print(f"x <= 0 and x >= 1: status {sol.status}")

# Determinism and warm starts.
rng = np.random.default_rng(5)
mat = rng.normal(size=(6, 6))
problem = QpProblem(hessian=mat @ mat.T + np.eye(6), linear=rng.normal(size=6),
                    a_ineq=rng.normal(size=(8, 6)), b_ineq=rng.normal(size=8) + 2.0)
cold = solve(problem)
warm = solve(problem, warm_start=cold.active_set)
print(f"\ncold solve: {cold.iterations} iterations; warm restart: {warm.iterations} iterations")
print(f"identical solutions: {np.allclose(cold.x, warm.x, atol=1e-12)}")
