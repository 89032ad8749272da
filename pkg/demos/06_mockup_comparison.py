#!/usr/bin/env python3
"""Desk-scale mockup experiment: burst hand under a sweeping arm, method grid.

Takes a few minutes with the linear forecaster. Pass a checkpoint path to use a
trained model (see `uapcbf train`), which is what the acceptance suite does.
"""

import sys

from uapcbf.barrier import Method
from uapcbf.harness import compute_metrics
from uapcbf.sim import mockup_scenario, run_scenario

checkpoint = sys.argv[1] if len(sys.argv) > 1 else None
forecaster = "trained" if checkpoint else "linear"
seeds = (0, 1, 2)

print(f"forecaster: {forecaster}; seeds {seeds}; 20 s runs\n")
header = f"{'method':14s} {'violations':>12s} {'magnitude':>10s} {'dist':>7s} {'path':>7s} {'vel':>6s}"
print(header)
print("-" * len(header))

for label, method, gamma, overrides in (
    ("CBF", Method.CBF, 0.0, {}),
    ("PCBF", Method.PCBF, 0.0, {}),
    ("UA-PCBF g=0", Method.UA_PCBF, 0.0, {}),
    ("UA-PCBF g=2.5", Method.UA_PCBF, 2.5, {}),
    ("UA-PCBF lp=lr", Method.UA_PCBF, 5.0, {"fixed_lambda_p": True}),
    ("UA-PCBF g=5", Method.UA_PCBF, 5.0, {}),
):
    cfg = mockup_scenario(method=method, gamma=gamma, forecaster=forecaster,
                          checkpoint=checkpoint, duration=20.0, **overrides)
    traces = [run_scenario(cfg, seed=s) for s in seeds]
    rep = compute_metrics(traces, method=label, gamma=gamma)
    print(
        f"{label:14s} {rep.violation_count[0]:6.1f}+/-{rep.violation_count[1]:4.1f}"
        f" {rep.violation_magnitude[0]:8.3f} {rep.hand_tcp_distance[0]:7.3f}"
        f" {rep.path_length[0]:7.2f} {rep.avg_tcp_velocity[0]:6.2f}"
    )

print("\nViolations are contiguous events of h above the 10 mm threshold.")
