import itertools
import time

import numpy as np
import pytest

from uapcbf.qp import (
    STATUS_INFEASIBLE,
    STATUS_SOLVED,
    ActiveSetQp,
    QpProblem,
    solve,
)


def random_problem(rng, n_max=10, m_max=8):
    """Random strictly convex problem, feasible by construction (interior point exists)."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    mat = rng.normal(size=(n, n))
    h = mat @ mat.T + 0.5 * np.eye(n)
    g = rng.normal(size=n)
    if m:
        a = rng.normal(size=(m, n))
        x0 = rng.normal(size=n)
        b = a @ x0 + rng.uniform(0.01, 1.0, size=m)
    else:
        a = np.zeros((0, n))
        b = np.zeros(0)
    return QpProblem(hessian=h, linear=g, a_ineq=a, b_ineq=b)


def enumeration_oracle(problem):
    """Exhaustive active-set enumeration over all 2^m subsets.

    Returns the optimal objective, or None when no subset certifies (infeasible).
    """
    h = np.asarray(problem.hessian, dtype=float)
    g = np.asarray(problem.linear, dtype=float)
    a, b = problem.expanded_rows()
    m, n = a.shape
    best = None
    for k in range(m + 1):
        for subset in itertools.combinations(range(m), k):
            idx = list(subset)
            kkt = np.zeros((n + k, n + k))
            kkt[:n, :n] = h
            if k:
                kkt[:n, n:] = a[idx].T
                kkt[n:, :n] = a[idx]
            rhs = np.concatenate([-g, b[idx]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            x = sol[:n]
            lam = sol[n:]
            if k and np.min(lam) < -1e-9:
                continue
            if m and np.max(a @ x - b) > 1e-9:
                continue
            obj = 0.5 * x @ h @ x + g @ x
            if best is None or obj < best:
                best = obj
    return best


def test_unconstrained_projection():
    u_nom = np.array([0.4, -0.2, 0.9])
    sol = solve(QpProblem(hessian=np.eye(3), linear=-u_nom))
    assert sol.status == STATUS_SOLVED
    np.testing.assert_array_equal(sol.x, u_nom)
    assert sol.active_set == []


def test_single_clamp():
    # min 0.5 (x - 1)^2  s.t. x <= 0  ->  x = 0, row 0 active.
    sol = solve(QpProblem(hessian=np.eye(1), linear=np.array([-1.0]), a_ineq=np.array([[1.0]]), b_ineq=np.zeros(1)))
    assert sol.status == STATUS_SOLVED
    assert sol.x[0] == pytest.approx(0.0, abs=1e-12)
    assert sol.active_set == [0]


def test_lower_bounds_fold_in():
    # min 0.5 x^2 + x  s.t. x >= 0  ->  x = 0.
    sol = solve(QpProblem(hessian=np.eye(1), linear=np.array([1.0]), lower_bounds=np.array([0.0])))
    assert sol.status == STATUS_SOLVED
    assert sol.x[0] == pytest.approx(0.0, abs=1e-12)


def test_random_problems_against_enumeration_oracle():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    times = []
    for _ in range(1000):
        problem = random_problem(rng)
        t0 = time.perf_counter()
        sol = solve(problem)
        times.append(time.perf_counter() - t0)
        assert sol.status == STATUS_SOLVED
        assert sol.kkt.max() < 1e-9
        expected = enumeration_oracle(problem)
        assert expected is not None
        assert abs(sol.objective - expected) < 1e-6
    assert time.perf_counter() - start < 60.0
    assert np.median(times) < 1e-3


def test_infeasible_detection():
    # x <= 0 and x >= 1 cannot both hold.
    sol = solve(
        QpProblem(
            hessian=np.eye(1),
            linear=np.zeros(1),
            a_ineq=np.array([[1.0], [-1.0]]),
            b_ineq=np.array([0.0, -1.0]),
        )
    )
    assert sol.status == STATUS_INFEASIBLE


def test_row_scaling_invariance():
    rng = np.random.default_rng(103)
    for _ in range(100):
        problem = random_problem(rng)
        if problem.a_ineq is None or len(problem.a_ineq) == 0:
            continue
        base = solve(problem)
        a = np.array(problem.a_ineq)
        b = np.array(problem.b_ineq)
        k = int(rng.integers(0, len(a)))
        lam = float(rng.uniform(0.1, 10.0))
        a[k] *= lam
        b[k] *= lam
        scaled = solve(QpProblem(problem.hessian, problem.linear, a, b))
        assert scaled.status == STATUS_SOLVED
        np.testing.assert_allclose(scaled.x, base.x, atol=1e-8)


def test_monotonicity_adding_constraints():
    rng = np.random.default_rng(107)
    for _ in range(100):
        problem = random_problem(rng)
        base = solve(problem)
        n = len(problem.linear)
        new_row = rng.normal(size=(1, n))
        new_b = np.array([float(new_row[0] @ base.x) - rng.uniform(0.0, 0.5)])
        a = new_row if problem.a_ineq is None or len(problem.a_ineq) == 0 else np.vstack([problem.a_ineq, new_row])
        b = new_b if problem.b_ineq is None or len(problem.b_ineq) == 0 else np.concatenate([problem.b_ineq, new_b])
        tightened = solve(QpProblem(problem.hessian, problem.linear, a, b))
        if tightened.status == STATUS_SOLVED:
            assert tightened.objective >= base.objective - 1e-10


def test_warm_start_equivalence():
    rng = np.random.default_rng(109)
    for _ in range(200):
        problem = random_problem(rng)
        cold = solve(problem)
        warm = solve(problem, warm_start=cold.active_set)
        assert warm.status == STATUS_SOLVED
        np.testing.assert_allclose(warm.x, cold.x, atol=1e-9)
        # A nonsense warm start must still land on the same solution.
        bogus = solve(problem, warm_start=[0] if (problem.a_ineq is not None and len(problem.a_ineq)) else [])
        np.testing.assert_allclose(bogus.x, cold.x, atol=1e-8)


def test_determinism():
    rng = np.random.default_rng(113)
    problem = random_problem(rng)
    s1 = solve(problem)
    s2 = solve(problem)
    np.testing.assert_array_equal(s1.x, s2.x)
    assert s1.active_set == s2.active_set


def test_validation_rejects_bad_hessians():
    with pytest.raises(ValueError):
        solve(QpProblem(hessian=np.array([[1.0, 0.5], [0.0, 1.0]]), linear=np.zeros(2)))
    with pytest.raises(ValueError):
        solve(QpProblem(hessian=-np.eye(2), linear=np.zeros(2)))


def test_json_dump_round_trip():
    import json

    problem = QpProblem(hessian=np.eye(2), linear=np.array([1.0, -2.0]), a_ineq=np.array([[1.0, 1.0]]), b_ineq=np.array([3.0]))
    payload = json.loads(problem.to_json())
    assert payload["hessian"] == [[1.0, 0.0], [0.0, 1.0]]
    assert payload["b_ineq"] == [3.0]


def test_solver_object_reusable():
    solver = ActiveSetQp()
    rng = np.random.default_rng(127)
    for _ in range(20):
        problem = random_problem(rng)
        sol = solver.solve(problem)
        assert sol.status == STATUS_SOLVED
