#!/usr/bin/env python3
"""Forward kinematics, Jacobian, and damped pseudoinverse on the default arm."""

import numpy as np

from uapcbf.kinematics import default_chain, forward_kinematics, jacobian, pseudoinverse

chain = default_chain()
print("Default 6R chain (a, alpha, d, theta0 per joint):")
for i, link in enumerate(chain.links):
    print(f"  joint {i}: a={link.a:+.3f}  alpha={link.alpha:+.4f}  d={link.d:.3f}  theta0={link.theta0:+.2f}")

q = np.array([0.3, -0.6, 1.1, 0.4, -0.8, 0.2])
pose = forward_kinematics(chain, q)
print(f"\nTCP at q={np.round(q, 2).tolist()}:")
print(f"  position {np.round(pose.position, 4).tolist()} m")
print(f"  rotation determinant {np.linalg.det(pose.rotation):.12f}")

jac = jacobian(chain, q)
print(f"\nJacobian condition number: {np.linalg.cond(jac):.1f}")

# A small TCP motion mapped to joint space and back.
twist = np.array([0.02, 0.0, -0.01, 0.0, 0.0, 0.0])
for damping in (0.0, 1e-3, 1e-1):
    u = pseudoinverse(jac, damping) @ twist
    residual = np.linalg.norm(jac @ u - twist)
    print(f"  damping {damping:5.0e}: |u| = {np.linalg.norm(u):.4f} rad/s, twist residual {residual:.2e}")

# Near a wrist singularity the undamped inverse blows up; damping keeps it tame.
q_sing = np.array([0.3, -0.4, 0.9, 0.2, 0.0, 0.1])
j_sing = jacobian(chain, q_sing)
print(f"\nNear wrist singularity (joint 5 = 0), smallest singular value: {np.linalg.svd(j_sing, compute_uv=False)[-1]:.2e}")
for damping in (0.0, 1e-3):
    gain = np.linalg.svd(pseudoinverse(j_sing, damping), compute_uv=False)[0]
    print(f"  damping {damping:5.0e}: max inverse gain {gain:.1f}")
