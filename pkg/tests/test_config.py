import json

import numpy as np
import pytest

from uapcbf.config import scenario_from_dict, scenario_from_file
from uapcbf.kinematics import forward_kinematics


def _doc():
    return {
        "scenario": {
            "method": "UA_PCBF",
            "gamma": 2.5,
            "duration": 2.0,
            "forecaster": "linear",
            "safety": {"d_min": 0.12, "alpha_gain": 100.0},
            "hand": {"kind": "mockup_burst", "rest_position": [0.5, 0.0, 0.1]},
            "robot_waypoints": [[0.5, -0.2, 0.5], [0.5, 0.2, 0.5]],
            "q0": [0, 0, 0, 0, 0, 0],
        },
        "controller": {"k_p": 3.0, "max_joint_speed": 2.0},
        "uncertainty": {"use_paper_half_exp": True},
        "rollout": {"open_loop": True},
        "seeds": [4, 5],
    }


def test_scenario_from_dict_full_document():
    scenario, chain, seeds = scenario_from_dict(_doc())
    assert scenario.safety.method.value == "UA_PCBF"
    assert scenario.safety.gamma == 2.5
    assert scenario.safety.d_min == 0.12
    assert scenario.safety.use_paper_half_exp is True
    assert scenario.safety.open_loop_rollout is True
    assert scenario.gains.k_p == 3.0
    assert scenario.gains.max_joint_speed == 2.0
    assert seeds == [4, 5]
    assert len(chain.links) == 6  # default chain when no robot section


def test_robot_links_override():
    doc = _doc()
    doc["robot"] = {
        "links": [
            {"a": 0.0, "alpha": 0.0, "d": 0.1 * (i + 1), "theta0": 0.0} for i in range(6)
        ]
    }
    _, chain, _ = scenario_from_dict(doc)
    pose = forward_kinematics(chain, np.zeros(6))
    np.testing.assert_allclose(pose.position, [0.0, 0.0, 0.1 * 21], atol=1e-12)


def test_unknown_keys_rejected():
    doc = _doc()
    doc["scenario"]["safety"]["mystery"] = 1.0
    with pytest.raises(ValueError):
        scenario_from_dict(doc)
    doc = _doc()
    doc["scenario"]["hand"]["grip"] = "firm"
    with pytest.raises(ValueError):
        scenario_from_dict(doc)


def test_scenario_from_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_doc()))
    scenario, _, seeds = scenario_from_file(path)
    assert scenario.duration == 2.0
    assert seeds == [4, 5]
