import numpy as np
import pytest

from uapcbf.controller import GainConfig, nominal_joint_velocity, nominal_twist, rotation_error
from uapcbf.kinematics import Pose, default_chain, forward_kinematics, jacobian


def _pose(pos, rot=None):
    return Pose(position=np.asarray(pos, dtype=float), rotation=np.eye(3) if rot is None else rot)


def _rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def test_zero_error_zero_twist():
    pose = _pose([0.3, 0.1, 0.5], _rot_z(0.4))
    np.testing.assert_array_equal(nominal_twist(pose, pose, GainConfig()), np.zeros(6))


def test_pure_translation_proportional():
    current = _pose([0.0, 0.0, 0.0])
    desired = _pose([0.1, 0.0, 0.0])
    twist = nominal_twist(current, desired, GainConfig(k_p=1.0, k_r=1.0))
    np.testing.assert_allclose(twist, [0.1, 0, 0, 0, 0, 0], atol=1e-15)


def test_rotation_error_against_direct_matrix_evaluation():
    r_d = _rot_z(0.3)
    r_c = np.eye(3)
    e_r = rotation_error(r_d, r_c)
    np.testing.assert_allclose(e_r, [0.0, 0.0, np.sin(0.3)], atol=1e-12)
    # Direct evaluation of the defining formula.
    m = 0.5 * (r_d @ r_c.T - r_c @ r_d.T)
    np.testing.assert_allclose(e_r, [m[2, 1], m[0, 2], m[1, 0]], atol=1e-15)


def test_rotation_error_antisymmetry():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        b = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        np.testing.assert_allclose(rotation_error(a, b), -rotation_error(b, a), atol=1e-12)


def test_joint_velocity_identity_jacobian():
    twist = np.array([0.1, -0.2, 0.3, 0.0, 0.1, -0.1])
    u = nominal_joint_velocity(twist, np.eye(6), damping=0.0)
    np.testing.assert_allclose(u, twist, atol=1e-12)


def test_joint_velocity_consistency_full_rank():
    chain = default_chain()
    q = np.array([0.2, -0.6, 1.1, 0.4, -1.2, 0.3])
    jac = jacobian(chain, q)
    twist = np.array([0.02, -0.01, 0.03, 0.0, 0.0, 0.01])
    u = nominal_joint_velocity(twist, jac, damping=0.0, max_joint_speed=10.0)
    assert np.linalg.norm(jac @ u - twist) < 1e-8


def test_joint_velocity_clamped():
    u = nominal_joint_velocity(np.array([100.0, 0, 0, 0, 0, 0]), np.eye(6), damping=0.0, max_joint_speed=1.5)
    assert np.max(np.abs(u)) <= 1.5


def test_gain_validation():
    with pytest.raises(ValueError):
        GainConfig(k_p=0.0)
    with pytest.raises(ValueError):
        GainConfig(max_joint_speed=-1.0)


def test_closed_loop_convergence():
    # Unconstrained proportional loop reaches a reachable goal within 10 s at k_p = 2.
    chain = default_chain()
    gains = GainConfig(k_p=2.0, k_r=1.0, max_joint_speed=3.0)
    rng = np.random.default_rng(11)
    dt = 1.0 / 30.0
    for _ in range(5):
        q = rng.uniform(-1.0, 1.0, 6)
        q_goal = q + rng.uniform(-0.6, 0.6, 6)
        desired = forward_kinematics(chain, q_goal)
        errors = []
        for _ in range(300):
            current = forward_kinematics(chain, q)
            twist = nominal_twist(current, desired, gains)
            u = nominal_joint_velocity(twist, jacobian(chain, q), damping=1e-3, max_joint_speed=gains.max_joint_speed)
            q = q + u * dt
            errors.append(np.linalg.norm(desired.position - forward_kinematics(chain, q).position))
        assert errors[-1] < 1e-3
        # Monotone decrease after the initial transient.
        tail = np.array(errors[30:])
        assert np.all(np.diff(tail) < 1e-9)
