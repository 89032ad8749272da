#!/usr/bin/env python3
"""One dangerous state, three method modes: how the constraint sets differ."""

import numpy as np

from uapcbf.barrier import Method, SafetyConfig, SafetyFilter
from uapcbf.forecast.network import GaussianForecast
from uapcbf.kinematics import default_chain, forward_kinematics

chain = default_chain()
q = np.array([-0.2816, 1.4405, -1.4810, 1.6113, 1.5708, -1.8524])
tcp = forward_kinematics(chain, q).position
print(f"TCP at {np.round(tcp, 3).tolist()}, tool pointing down\n")

# Hand 0.35 m below, forecast rising toward the TCP at 0.9 m/s with growing spread.
dt, horizon = 1 / 30, 30
hand = tcp - np.array([0.0, 0.0, 0.35])
mu = np.array([hand + np.array([0.0, 0.0, min(0.9 * dt * (k + 1), 0.30)]) for k in range(horizon)])
log_var = np.tile(np.linspace(-9.0, -5.0, horizon)[:, None], (1, 3))
fc = GaussianForecast(mu=mu, log_var=log_var, dt=dt)
u_nom = np.array([0.0, 0.4, 0.0, 0.0, 0.0, 0.0])  # sweeping sideways, oblivious

for method, gamma in ((Method.CBF, 0.0), (Method.PCBF, 0.0), (Method.UA_PCBF, 5.0)):
    cfg = SafetyConfig(method=method, gamma=gamma, dt=dt, horizon=horizon)
    res = SafetyFilter(chain, cfg).filter(u_nom, q, forecast=fc, hand_now=hand,
                                          hand_velocity_now=np.array([0.0, 0.0, 0.9]))
    h_values = [ev.h for ev in res.evaluations]
    sigma_max = max(ev.sigma_bar for ev in res.evaluations)
    print(f"{method.value}:")
    print(f"  rows {len(res.evaluations)}  h(now) {h_values[0]:+.3f}  max h over horizon {max(h_values):+.3f}")
    print(f"  sigma_bar max {sigma_max:.3f} m  lambda_p {res.lambda_p:.1f}")
    print(f"  u_nom {np.round(u_nom, 2).tolist()}")
    print(f"  u_safe {np.round(res.u_safe, 2).tolist()}  (delta_r {res.delta_r:.4f}, delta_p {res.delta_p:.4f})\n")

print("CBF only sees the current state; PCBF reacts to the predicted approach;")
print("UA-PCBF additionally inflates the margin by the projected forecast variance.")
