"""Small dense strictly convex QP solver with certified KKT residuals.

    minimize    0.5 x^T H x + g^T x
    subject to  A x <= b,   x_i >= lb_i (optional per-variable lower bounds)

Dual active-set method: start at the unconstrained minimum (Cholesky of H), then
repeatedly add the most-violated inequality, taking dual steps that drop blocking
rows as needed. Infeasibility shows up as an unbounded dual step and yields a
Farkas-style certificate. Problems here are tiny (n <= 16, m <= 64), so each
iteration re-solves the working-set system densely instead of updating factors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

STATUS_SOLVED = "solved"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAX_ITER = "max_iter"


@dataclass
class QpProblem:
    hessian: np.ndarray  # (n, n) symmetric positive definite
    linear: np.ndarray  # (n,)
    a_ineq: np.ndarray | None = None  # (m, n), rows a_i^T x <= b_i
    b_ineq: np.ndarray | None = None  # (m,)
    lower_bounds: np.ndarray | None = None  # (n,), -inf where unbounded

    def validate(self):
        h = np.asarray(self.hessian, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("hessian must be square")
        if np.max(np.abs(h - h.T)) > 1e-10:
            raise ValueError("hessian must be symmetric within 1e-10")
        try:
            np.linalg.cholesky(h)
        except np.linalg.LinAlgError as exc:
            raise ValueError("hessian must be positive definite") from exc
        return self

    def expanded_rows(self):
        """Inequality rows with lower bounds folded in as -x_i <= -lb_i."""
        n = np.asarray(self.hessian).shape[0]
        rows = []
        rhs = []
        if self.a_ineq is not None and len(self.a_ineq) > 0:
            a = np.atleast_2d(np.asarray(self.a_ineq, dtype=float))
            rows.append(a)
            rhs.append(np.asarray(self.b_ineq, dtype=float).ravel())
        if self.lower_bounds is not None:
            lb = np.asarray(self.lower_bounds, dtype=float).ravel()
            for i in range(n):
                if np.isfinite(lb[i]):
                    e = np.zeros(n)
                    e[i] = -1.0
                    rows.append(e[None, :])
                    rhs.append(np.array([-lb[i]]))
        if not rows:
            return np.zeros((0, n)), np.zeros(0)
        return np.vstack(rows), np.concatenate(rhs)

    def to_json(self) -> str:
        """Dump for bug reports."""
        payload = {
            "hessian": np.asarray(self.hessian).tolist(),
            "linear": np.asarray(self.linear).tolist(),
            "a_ineq": None if self.a_ineq is None else np.asarray(self.a_ineq).tolist(),
            "b_ineq": None if self.b_ineq is None else np.asarray(self.b_ineq).tolist(),
            "lower_bounds": None if self.lower_bounds is None else np.asarray(self.lower_bounds).tolist(),
        }
        return json.dumps(payload)


@dataclass
class KktResiduals:
    stationarity: float
    primal: float
    dual: float
    complementarity: float

    def max(self) -> float:
        return max(self.stationarity, self.primal, self.dual, self.complementarity)


@dataclass
class QpSolution:
    x: np.ndarray
    active_set: list
    kkt: KktResiduals
    status: str
    iterations: int = 0
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = float("nan")


def _kkt_residuals(h, g, a, b, x, lam) -> KktResiduals:
    stat = float(np.max(np.abs(h @ x + g + (a.T @ lam if len(a) else 0.0))))
    if len(a):
        s = a @ x - b
        primal = float(max(0.0, np.max(s)))
        dual = float(max(0.0, -np.min(lam))) if len(lam) else 0.0
        comp = float(np.max(np.abs(lam * s))) if len(lam) else 0.0
    else:
        primal = dual = comp = 0.0
    return KktResiduals(stat, primal, dual, comp)


class ActiveSetQp:
    """Reusable solver. Holds scratch per instance: clone per thread, don't share."""

    def __init__(self, tol: float = 1e-9, max_iter: int = 200):
        self.tol = tol
        self.max_iter = max_iter

    def solve(self, problem: QpProblem, warm_start=None) -> QpSolution:
        problem.validate()
        h = np.asarray(problem.hessian, dtype=float)
        g = np.asarray(problem.linear, dtype=float).ravel()
        a, b = problem.expanded_rows()
        m = len(a)

        cho = cho_factor(h, lower=True)

        if warm_start is not None:
            sol = self._try_working_set(h, g, a, b, cho, list(warm_start))
            if sol is not None:
                return sol

        x = cho_solve(cho, -g)
        working: list[int] = []
        u = np.zeros(0)  # multipliers of the working set, >= 0

        iterations = 0
        while iterations < self.max_iter:
            iterations += 1
            slack = a @ x - b if m else np.zeros(0)
            if m == 0 or np.max(slack) <= self.tol:
                return self._finish(h, g, a, b, cho, working, iterations)
            p = int(np.argmax(slack))  # most violated; argmax breaks exact ties low-index first
            n_p = -a[p]  # >=-form normal of row p
            u_enter = 0.0  # multiplier of row p, accumulated across dual steps

            # Inner loop: dual steps may drop blocking rows before p can enter.
            while True:
                hin = cho_solve(cho, n_p)
                if working:
                    nmat = -a[working].T  # (n, k)
                    hn = cho_solve(cho, nmat)
                    gram = nmat.T @ hn
                    r = np.linalg.solve(gram, nmat.T @ hin)
                    z = hin - hn @ r
                else:
                    r = np.zeros(0)
                    z = hin

                z_norm = float(np.max(np.abs(z))) if z.size else 0.0
                full_step = np.inf
                if z_norm > 1e-12:
                    denom = float(np.dot(n_p, z))
                    full_step = float(a[p] @ x - b[p]) / denom  # drives row p to its bound
                blocking = np.inf
                j_block = -1
                for j, rj in enumerate(r):
                    if rj > 1e-12 and u[j] / rj < blocking:
                        blocking = float(u[j] / rj)
                        j_block = j
                step = min(full_step, blocking)

                if not np.isfinite(step):
                    # Farkas certificate: n_p is a nonnegative combination of active
                    # normals with no room to move, so A x <= b has no solution.
                    lam = np.zeros(m)
                    return QpSolution(
                        x=x,
                        active_set=sorted(working),
                        kkt=_kkt_residuals(h, g, a, b, x, lam),
                        status=STATUS_INFEASIBLE,
                        iterations=iterations,
                        duals=lam,
                        objective=float("nan"),
                    )

                if z_norm > 1e-12:
                    x = x + step * z
                u = u - step * r
                u_enter += step
                if full_step <= blocking:
                    # Full step: row p enters the working set.
                    working.append(p)
                    u = np.append(u, u_enter)
                    break
                # Dual step only: drop the blocking row and retry adding p.
                working.pop(j_block)
                u = np.delete(u, j_block)
        # Fell out of the iteration budget.
        lam = np.zeros(m)
        lam[working] = u
        return QpSolution(
            x=x,
            active_set=sorted(working),
            kkt=_kkt_residuals(h, g, a, b, x, lam),
            status=STATUS_MAX_ITER,
            iterations=iterations,
            duals=lam,
            objective=float(0.5 * x @ h @ x + g @ x),
        )

    def _finish(self, h, g, a, b, cho, working, iterations) -> QpSolution:
        # Polish: re-solve the working-set KKT system once so residuals sit at
        # machine precision, then certify.
        x, u = self._solve_working(h, g, a, cho, working, b)
        lam = np.zeros(len(a))
        if working:
            lam[working] = u
        kkt = _kkt_residuals(h, g, a, b, x, lam)
        status = STATUS_SOLVED if kkt.max() < self.tol else STATUS_MAX_ITER
        return QpSolution(
            x=x,
            active_set=sorted(working),
            kkt=kkt,
            status=status,
            iterations=iterations,
            duals=lam,
            objective=float(0.5 * x @ h @ x + g @ x),
        )

    @staticmethod
    def _solve_working(h, g, a, cho, working, b):
        if not working:
            return cho_solve(cho, -g), np.zeros(0)
        aw = a[working]
        bw = b[working]
        hinv_at = cho_solve(cho, aw.T)
        gram = aw @ hinv_at
        x_free = cho_solve(cho, -g)
        lam = np.linalg.solve(gram, aw @ x_free - bw)
        x = x_free - hinv_at @ lam
        return x, lam

    def _try_working_set(self, h, g, a, b, cho, working):
        """Warm start: accept the proposed active set only if it certifies optimal."""
        try:
            x, u = self._solve_working(h, g, a, cho, working, b)
        except np.linalg.LinAlgError:
            return None
        if len(u) and np.min(u) < -self.tol:
            return None
        lam = np.zeros(len(a))
        if working:
            lam[working] = np.maximum(u, 0.0)
        kkt = _kkt_residuals(h, g, a, b, x, lam)
        if kkt.max() < self.tol:
            return QpSolution(
                x=x,
                active_set=sorted(working),
                kkt=kkt,
                status=STATUS_SOLVED,
                iterations=0,
                duals=lam,
                objective=float(0.5 * x @ h @ x + g @ x),
            )
        return None


def solve(problem: QpProblem, tol: float = 1e-9, max_iter: int = 200, warm_start=None) -> QpSolution:
    return ActiveSetQp(tol=tol, max_iter=max_iter).solve(problem, warm_start=warm_start)
