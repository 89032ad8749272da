"""Reactive and predictive uncertainty-aware barrier constraints and the safety QP.

Three method modes share one machinery:
  CBF      one reactive constraint at the current state, hand velocity measured.
  PCBF     reactive row plus one row per horizon sample along a nominal rollout,
           with a margin m(R - t) subtracted from the predictive samples.
  UA_PCBF  PCBF rows with the safety distance inflated by the clamped, projected
           forecast variance, and the predictive slack penalty modulated by it.

Sign convention: h <= 0 is safe; each row enforces
    L_g h . u <= -L_f h - alpha * h_eff + delta
with L_g h the barrier gradient through the TCP translation Jacobian and L_f h
the hand-motion drift term.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from uapcbf.geometry import HandSphere, LinkCylinder, project_covariance, separation
from uapcbf.kinematics import KinematicChain, jacobian_from_frames, joint_frames
from uapcbf.qp import STATUS_SOLVED, ActiveSetQp, QpProblem

log = logging.getLogger(__name__)

N_JOINTS = 6


class Method(str, Enum):
    CBF = "CBF"
    PCBF = "PCBF"
    UA_PCBF = "UA_PCBF"


@dataclass
class SafetyConfig:
    d_min: float = 0.15  # m, required separation
    r_cyl: float = 0.05
    h_cyl: float = 0.25
    r_hand: float = 0.08
    gamma: float = 5.0  # uncertainty weight
    lambda_r: float = 100.0  # reactive slack penalty
    alpha_gain: float = 125.0  # linear class-K slope
    margin_exponent: float = 2.0  # m(tau) = tau^e
    horizon: int = 30  # predictive samples (T_out)
    dt: float = 1.0 / 30.0
    method: Method = Method.UA_PCBF
    violation_threshold: float = 0.010  # m on h
    use_paper_half_exp: bool = False
    open_loop_rollout: bool = False
    fixed_lambda_p: bool = False  # ablation: keep lambda_p = lambda_r regardless of sigma_bar

    def __post_init__(self):
        self.method = Method(self.method)
        if self.d_min <= 0 or self.dt <= 0:
            raise ValueError("d_min and dt must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.lambda_r <= 0:
            raise ValueError("lambda_r must be > 0")


def clamp_uncertainty(sigma_proj: float, tau_index: int, gamma: float, d_min: float) -> float:
    """Clamped uncertainty inflation: zero now, min(gamma * sigma_proj, d_min) later."""
    if sigma_proj < 0:
        raise ValueError("sigma_proj must be >= 0")
    if tau_index == 0:
        return 0.0
    return min(gamma * sigma_proj, d_min)


def barrier_value(d: float, sigma_bar: float, d_min: float) -> float:
    """h = d_min + sigma_bar - d; safe iff h <= 0."""
    return d_min + sigma_bar - d


def lambda_penalty(lambda_r: float, gamma: float, sigma_bar: float, d_min: float) -> float:
    """Predictive slack penalty lambda_p = lambda_r - gamma * sigma_bar / d_min."""
    if d_min <= 0:
        raise ValueError("d_min must be > 0")
    return lambda_r - gamma * sigma_bar / d_min


@dataclass
class BarrierEvaluation:
    tau_index: int
    h: float  # pre-margin barrier value at this sample
    sigma_bar: float
    d: float
    u_hat: np.ndarray
    grad_q: np.ndarray  # (6,) dh/dq via the TCP translation Jacobian
    hand_velocity_term: float  # L_f h = -u_hat . v_hand
    earliest_violation: float  # R - t in seconds, shared across the rollout
    degenerate: bool = False


@dataclass
class FilterResult:
    u_safe: np.ndarray
    delta_r: float
    delta_p: float
    lambda_p: float
    constraints_active: list
    qp_status: str
    qp_iterations: int
    evaluations: list = field(default_factory=list)
    degraded: bool = False

    @property
    def h0(self) -> float:
        return self.evaluations[0].h if self.evaluations else float("nan")


def _cylinder_from_frame(tcp_frame: np.ndarray, cfg: SafetyConfig) -> LinkCylinder:
    axis = tcp_frame[:3, 2]
    axis = axis / np.linalg.norm(axis)
    return LinkCylinder(base=tcp_frame[:3, 3] - cfg.h_cyl * axis, axis=axis, height=cfg.h_cyl, radius=cfg.r_cyl)


def tcp_cylinder(chain: KinematicChain, q, cfg: SafetyConfig) -> LinkCylinder:
    """Bounding cylinder attached to the TCP frame, extending backward along -z."""
    return _cylinder_from_frame(joint_frames(chain, q)[-1], cfg)


def _evaluate_sample(chain, q, hand_pos, variance_diag, tau_index, v_hand, cfg) -> BarrierEvaluation:
    frames = joint_frames(chain, q)
    cyl = _cylinder_from_frame(frames[-1], cfg)
    sep = separation(HandSphere(center=np.asarray(hand_pos, dtype=float), radius=cfg.r_hand), cyl)
    u_hat = sep.interaction_axis
    if cfg.method is Method.UA_PCBF and tau_index > 0 and variance_diag is not None:
        sigma_proj = project_covariance(variance_diag, u_hat)
    else:
        sigma_proj = 0.0
    sigma_bar = clamp_uncertainty(sigma_proj, tau_index, cfg.gamma, cfg.d_min)
    h = barrier_value(sep.distance, sigma_bar, cfg.d_min)
    grad_q = u_hat @ jacobian_from_frames(frames)[:3]
    lf = -float(np.dot(u_hat, v_hand))
    return BarrierEvaluation(
        tau_index=tau_index,
        h=h,
        sigma_bar=sigma_bar,
        d=sep.distance,
        u_hat=u_hat,
        grad_q=grad_q,
        hand_velocity_term=lf,
        earliest_violation=0.0,
        degenerate=sep.degenerate,
    )


def predictive_rollout(chain, q, nominal_policy, forecast, hand_now, cfg: SafetyConfig,
                       hand_velocity_now=None) -> list:
    """Barrier evaluations along the nominal rollout.

    Row 0 is the reactive sample at the current state; rows 1..horizon follow the
    robot integrated under the nominal policy against the forecast means. R is
    the time of the first sample with h > 0 (horizon end when none), stamped on
    every evaluation.
    """
    hand_now = np.asarray(hand_now, dtype=float)
    evals = []
    if cfg.method is Method.CBF:
        v0 = np.zeros(3) if hand_velocity_now is None else np.asarray(hand_velocity_now, dtype=float)
        evals.append(_evaluate_sample(chain, q, hand_now, None, 0, v0, cfg))
    else:
        if forecast is None:
            raise ValueError("predictive modes need a forecast")
        if forecast.horizon != cfg.horizon:
            raise ValueError(f"forecast horizon {forecast.horizon} != cfg.horizon {cfg.horizon}")
        mu_full = np.vstack([hand_now[None, :], forecast.mu])  # the current position leads the path
        var_full = np.vstack([np.zeros((1, 3)), forecast.variance(cfg.use_paper_half_exp)])
        v_hand = np.diff(mu_full, axis=0) / cfg.dt  # v_hand[k] applies at sample k
        v_hand = np.vstack([v_hand, v_hand[-1][None, :]])

        q_roll = np.asarray(q, dtype=float).copy()
        u_frozen = None
        for k in range(cfg.horizon + 1):
            evals.append(_evaluate_sample(chain, q_roll, mu_full[k], var_full[k], k, v_hand[k], cfg))
            if k < cfg.horizon:
                if cfg.open_loop_rollout:
                    if u_frozen is None:
                        u_frozen = np.asarray(nominal_policy(q_roll), dtype=float)
                    u_step = u_frozen
                else:
                    u_step = np.asarray(nominal_policy(q_roll), dtype=float)
                q_roll = q_roll + u_step * cfg.dt

    r_rel = cfg.horizon * cfg.dt
    for ev in evals:
        if ev.h > 0.0:
            r_rel = ev.tau_index * cfg.dt
            break
    for ev in evals:
        ev.earliest_violation = r_rel
    return evals


def assemble_constraints(evals, cfg: SafetyConfig):
    """Inequality rows over x = [u(6), delta_r, delta_p] for the safety QP.

    Returns (a, b, used) with used the tau indices that produced rows; degenerate
    samples are skipped with a diagnostic.
    """
    if not evals or evals[0].tau_index != 0:
        raise ValueError("evaluations must start with the reactive sample (tau = 0)")
    margin = float(evals[0].earliest_violation) ** cfg.margin_exponent
    rows, rhs, used = [], [], []
    for ev in evals:
        if ev.degenerate:
            log.warning("skipping degenerate barrier row at tau=%d (hand on cylinder axis)", ev.tau_index)
            continue
        h_eff = ev.h if ev.tau_index == 0 else ev.h - margin
        row = np.zeros(N_JOINTS + 2)
        row[:N_JOINTS] = ev.grad_q
        row[N_JOINTS if ev.tau_index == 0 else N_JOINTS + 1] = -1.0
        rows.append(row)
        rhs.append(-ev.hand_velocity_term - cfg.alpha_gain * h_eff)
        used.append(ev.tau_index)
    if not rows:
        return np.zeros((0, N_JOINTS + 2)), np.zeros(0), used
    return np.vstack(rows), np.array(rhs), used


class SafetyFilter:
    """Assembles barrier constraints each control step and solves the slack QP.

    Holds the previous command as the fallback for a degraded QP solve. One
    instance per control loop; not shareable across threads.
    """

    def __init__(self, chain: KinematicChain, cfg: SafetyConfig, qp_tol: float = 1e-9):
        self.chain = chain
        self.cfg = cfg
        self.solver = ActiveSetQp(tol=qp_tol)
        self._last_u = np.zeros(N_JOINTS)

    def filter(self, u_nom, q, forecast=None, hand_now=None, hand_velocity_now=None,
               nominal_policy=None) -> FilterResult:
        cfg = self.cfg
        u_nom = np.asarray(u_nom, dtype=float)
        if nominal_policy is None:
            nominal_policy = lambda _q: u_nom
        evals = predictive_rollout(
            self.chain, q, nominal_policy, forecast, hand_now, cfg, hand_velocity_now=hand_velocity_now
        )
        a, b, _ = assemble_constraints(evals, cfg)

        sigma_bar_max = max((ev.sigma_bar for ev in evals), default=0.0)
        if cfg.method is Method.UA_PCBF and not cfg.fixed_lambda_p:
            lam_p = lambda_penalty(cfg.lambda_r, cfg.gamma, sigma_bar_max, cfg.d_min)
        else:
            lam_p = cfg.lambda_r

        hess = np.diag(np.concatenate([np.ones(N_JOINTS), [2.0 * cfg.lambda_r, 2.0 * lam_p]]))
        lin = np.concatenate([-u_nom, [0.0, 0.0]])
        lower = np.concatenate([np.full(N_JOINTS, -np.inf), [0.0, 0.0]])
        problem = QpProblem(hessian=hess, linear=lin, a_ineq=a, b_ineq=b, lower_bounds=lower)
        sol = self.solver.solve(problem)

        if sol.status != STATUS_SOLVED:
            log.warning("safety QP %s; holding previous command", sol.status)
            return FilterResult(
                u_safe=self._last_u.copy(),
                delta_r=0.0,
                delta_p=0.0,
                lambda_p=lam_p,
                constraints_active=[],
                qp_status=sol.status,
                qp_iterations=sol.iterations,
                evaluations=evals,
                degraded=True,
            )
        u_safe = sol.x[:N_JOINTS]
        self._last_u = u_safe.copy()
        return FilterResult(
            u_safe=u_safe,
            delta_r=float(max(0.0, sol.x[N_JOINTS])),
            delta_p=float(max(0.0, sol.x[N_JOINTS + 1])),
            lambda_p=lam_p,
            constraints_active=sol.active_set,
            qp_status=sol.status,
            qp_iterations=sol.iterations,
            evaluations=evals,
        )
