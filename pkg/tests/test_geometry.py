import numpy as np
import pytest

from uapcbf.geometry import (
    DegenerateGeometryError,
    HandSphere,
    LinkCylinder,
    project_covariance,
    separation,
    separation_gradient,
)


def _z_cylinder(height=0.4, radius=0.05):
    return LinkCylinder(base=np.zeros(3), axis=np.array([0.0, 0.0, 1.0]), height=height, radius=radius)


def _random_config(rng):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    cyl = LinkCylinder(
        base=rng.uniform(-1, 1, 3),
        axis=axis,
        height=rng.uniform(0.1, 0.8),
        radius=rng.uniform(0.01, 0.2),
    )
    sphere = HandSphere(center=rng.uniform(-1.5, 1.5, 3), radius=rng.uniform(0.02, 0.2))
    return sphere, cyl


def _scan_distance(sphere, cyl, n_points):
    """Dense-sampling oracle: min distance over n_points on the axis segment."""
    ts = np.linspace(0.0, cyl.height, n_points)
    pts = cyl.base[None, :] + ts[:, None] * cyl.axis[None, :]
    return float(np.min(np.linalg.norm(pts - sphere.center[None, :], axis=1))) - cyl.radius


def test_perpendicular_offset():
    res = separation(HandSphere(center=np.array([0.25, 0.0, 0.2]), radius=0.08), _z_cylinder())
    np.testing.assert_allclose(res.closest_axis_point, [0.0, 0.0, 0.2], atol=1e-15)
    assert res.distance == pytest.approx(0.20, abs=1e-15)
    np.testing.assert_allclose(res.interaction_axis, [1.0, 0.0, 0.0], atol=1e-15)
    assert not res.degenerate


def test_axial_clamp_above_cap():
    res = separation(HandSphere(center=np.array([0.0, 0.0, 0.6]), radius=0.08), _z_cylinder())
    np.testing.assert_allclose(res.closest_axis_point, [0.0, 0.0, 0.4], atol=1e-15)
    assert res.distance == pytest.approx(0.15, abs=1e-15)
    np.testing.assert_allclose(res.interaction_axis, [0.0, 0.0, 1.0], atol=1e-15)


def test_separation_against_dense_sampling_oracle():
    rng = np.random.default_rng(23)
    # Full million-point scans on a subset, coarse-to-fine on the bulk.
    for _ in range(50):
        sphere, cyl = _random_config(rng)
        d = separation(sphere, cyl).distance
        assert abs(d - _scan_distance(sphere, cyl, 1_000_000)) < 1e-4
    for _ in range(10_000):
        sphere, cyl = _random_config(rng)
        d = separation(sphere, cyl).distance
        # Coarse scan, then local refinement to the same effective resolution.
        ts = np.linspace(0.0, cyl.height, 1000)
        pts = cyl.base[None, :] + ts[:, None] * cyl.axis[None, :]
        dist = np.linalg.norm(pts - sphere.center[None, :], axis=1)
        k = int(np.argmin(dist))
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, 999)]
        ts2 = np.linspace(lo, hi, 1000)
        pts2 = cyl.base[None, :] + ts2[:, None] * cyl.axis[None, :]
        oracle = float(np.min(np.linalg.norm(pts2 - sphere.center[None, :], axis=1))) - cyl.radius
        assert abs(d - oracle) < 1e-4


def test_degenerate_on_axis():
    res = separation(HandSphere(center=np.array([0.0, 0.0, 0.2]), radius=0.05), _z_cylinder())
    assert res.degenerate
    np.testing.assert_allclose(res.interaction_axis, [1.0, 0.0, 0.0], atol=1e-12)
    # Axis along +x: fallback must rotate to the first orthogonal direction.
    cyl_x = LinkCylinder(base=np.zeros(3), axis=np.array([1.0, 0.0, 0.0]), height=0.4, radius=0.05)
    res_x = separation(HandSphere(center=np.array([0.2, 0.0, 0.0]), radius=0.05), cyl_x)
    assert res_x.degenerate
    np.testing.assert_allclose(res_x.interaction_axis, [0.0, 1.0, 0.0], atol=1e-12)
    with pytest.raises(DegenerateGeometryError):
        separation_gradient(HandSphere(center=np.array([0.0, 0.0, 0.2]), radius=0.05), _z_cylinder())


def test_gradient_trivial_directions():
    d_center, d_base = separation_gradient(
        HandSphere(center=np.array([0.25, 0.0, 0.2]), radius=0.08), _z_cylinder()
    )
    np.testing.assert_allclose(d_center, [1.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(d_base, [-1.0, 0.0, 0.0], atol=1e-15)
    d_center, _ = separation_gradient(HandSphere(center=np.array([0.0, 0.0, 0.6]), radius=0.08), _z_cylinder())
    np.testing.assert_allclose(d_center, [0.0, 0.0, 1.0], atol=1e-15)


def test_gradient_finite_differences():
    rng = np.random.default_rng(29)
    eps = 1e-6
    checked = 0
    while checked < 1000:
        sphere, cyl = _random_config(rng)
        res = separation(sphere, cyl)
        if res.degenerate or res.distance < 1e-3:
            continue
        # Skip configurations whose projection sits within FD reach of a cap edge.
        t = float(np.dot(sphere.center - cyl.base, cyl.axis))
        if min(abs(t), abs(t - cyl.height)) < 10 * eps:
            continue
        d_center, d_base = separation_gradient(sphere, cyl)
        for k in range(3):
            step = np.zeros(3)
            step[k] = eps
            plus = separation(HandSphere(sphere.center + step, sphere.radius), cyl).distance
            minus = separation(HandSphere(sphere.center - step, sphere.radius), cyl).distance
            assert abs((plus - minus) / (2 * eps) - d_center[k]) < 1e-5
            cyl_plus = LinkCylinder(cyl.base + step, cyl.axis, cyl.height, cyl.radius)
            cyl_minus = LinkCylinder(cyl.base - step, cyl.axis, cyl.height, cyl.radius)
            fd_base = (separation(sphere, cyl_plus).distance - separation(sphere, cyl_minus).distance) / (2 * eps)
            assert abs(fd_base - d_base[k]) < 1e-5
        checked += 1


def test_project_covariance_isotropic_and_axis_aligned():
    u = np.array([0.3, -0.5, 0.8])
    u /= np.linalg.norm(u)
    assert project_covariance(np.full(3, 0.04), u) == pytest.approx(0.04, abs=1e-15)
    assert project_covariance(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)
    assert project_covariance(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])) == pytest.approx(0.0)


def test_project_covariance_expansion_oracle():
    rng = np.random.default_rng(31)
    for _ in range(200):
        diag = rng.uniform(0, 2, 3)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        expected = sum(diag[i] * u[i] ** 2 for i in range(3))
        assert abs(project_covariance(diag, u) - expected) < 1e-12
        assert abs(project_covariance(np.diag(diag), u) - expected) < 1e-12


def test_distance_is_one_lipschitz_in_center():
    rng = np.random.default_rng(37)
    for _ in range(2000):
        sphere, cyl = _random_config(rng)
        eps_vec = rng.normal(size=3) * rng.uniform(0, 0.2)
        d0 = separation(sphere, cyl).distance
        d1 = separation(HandSphere(sphere.center + eps_vec, sphere.radius), cyl).distance
        assert abs(d1 - d0) <= np.linalg.norm(eps_vec) + 1e-12


def test_sigma_proj_within_diag_bounds():
    rng = np.random.default_rng(41)
    for _ in range(2000):
        diag = rng.uniform(0, 3, 3)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        val = project_covariance(diag, u)
        assert diag.min() - 1e-12 <= val <= diag.max() + 1e-12


def test_rigid_transform_invariance():
    rng = np.random.default_rng(43)
    for _ in range(500):
        sphere, cyl = _random_config(rng)
        # Random rotation via QR, random translation.
        m = rng.normal(size=(3, 3))
        q, r = np.linalg.qr(m)
        q *= np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        t = rng.uniform(-2, 2, 3)
        moved_sphere = HandSphere(q @ sphere.center + t, sphere.radius)
        moved_cyl = LinkCylinder(q @ cyl.base + t, q @ cyl.axis, cyl.height, cyl.radius)
        d0 = separation(sphere, cyl).distance
        d1 = separation(moved_sphere, moved_cyl).distance
        assert abs(d0 - d1) < 1e-10
