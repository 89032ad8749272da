import numpy as np

from uapcbf.barrier import Method, SafetyConfig, SafetyFilter
from uapcbf.forecast.network import GaussianForecast
from uapcbf.harness import LAMBDA_ABLATION, sweep
from uapcbf.kinematics import default_chain, forward_kinematics
from uapcbf.sim import mockup_scenario

CHAIN = default_chain()
Q = np.array([-0.2816, 1.4405, -1.4810, 1.6113, 1.5708, -1.8524])
DT = 1.0 / 30.0


def test_fixed_lambda_keeps_penalty_at_lambda_r():
    tcp = forward_kinematics(CHAIN, Q).position
    hand = tcp - np.array([0.0, 0.0, 0.3])
    fc = GaussianForecast(mu=np.tile(hand, (30, 1)), log_var=np.full((30, 3), -3.0), dt=DT)
    base = SafetyConfig(method=Method.UA_PCBF, gamma=5.0, dt=DT, horizon=30)
    modulated = SafetyFilter(CHAIN, base).filter(np.zeros(6), Q, fc, hand)
    fixed_cfg = SafetyConfig(method=Method.UA_PCBF, gamma=5.0, dt=DT, horizon=30, fixed_lambda_p=True)
    fixed = SafetyFilter(CHAIN, fixed_cfg).filter(np.zeros(6), Q, fc, hand)
    assert modulated.lambda_p < base.lambda_r  # sigma_bar > 0 modulates it down
    assert fixed.lambda_p == base.lambda_r
    # The barrier inflation itself is unchanged by the ablation.
    assert [e.sigma_bar for e in fixed.evaluations] == [e.sigma_bar for e in modulated.evaluations]


def test_sweep_accepts_lambda_ablation_row():
    cfg = mockup_scenario(forecaster="linear", duration=1.0)
    reports = sweep(cfg, methods=(Method.UA_PCBF, LAMBDA_ABLATION), gammas=(5.0,), seeds=(0,))
    assert [r.method for r in reports] == ["UA_PCBF", LAMBDA_ABLATION]
    assert all(r.runs == 1 for r in reports)
