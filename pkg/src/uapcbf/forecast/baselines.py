"""Classical forecasting baselines: linear extrapolation, Kalman, particle filter."""

from __future__ import annotations

import numpy as np

from uapcbf.forecast.network import GaussianForecast, TrajectoryWindow


class ParticleDegeneracyError(RuntimeError):
    """All particle weights collapsed to zero."""


def _window_positions(window) -> np.ndarray:
    pos = window.positions if isinstance(window, TrajectoryWindow) else np.asarray(window, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ValueError("window must be (T_in, 3)")
    return pos


def baseline_linear(window, t_out: int, dt: float = 1.0 / 30.0) -> GaussianForecast:
    """Extrapolate the last-step velocity. log_var is zero by convention."""
    pos = _window_positions(window)
    if pos.shape[0] < 2:
        raise ValueError("linear baseline needs at least two samples")
    v = (pos[-1] - pos[-2]) / dt
    steps = np.arange(1, t_out + 1)[:, None]
    mu = pos[-1][None, :] + steps * dt * v[None, :]
    return GaussianForecast(mu=mu, log_var=np.zeros((t_out, 3)), dt=dt)


def baseline_kalman(
    window,
    t_out: int,
    dt: float = 1.0 / 30.0,
    process_noise: float = 5.0,
    measurement_noise: float = 0.002,
) -> GaussianForecast:
    """Constant-velocity Kalman filter over the window, then open-loop prediction.

    One independent [position, velocity] filter per axis; process noise is a
    white-acceleration spectral density, measurement noise the sensor std (m).
    log_var comes from the predicted position variance, which grows with horizon.
    """
    pos = _window_positions(window)
    f = np.array([[1.0, dt], [0.0, 1.0]])
    q = process_noise * np.array([[dt**3 / 3.0, dt**2 / 2.0], [dt**2 / 2.0, dt]])
    r = max(measurement_noise, 1e-9) ** 2
    hrow = np.array([1.0, 0.0])

    mu = np.zeros((t_out, 3))
    var = np.zeros((t_out, 3))
    for axis in range(3):
        x = np.array([pos[0, axis], 0.0])
        p = np.diag([r, 1.0])
        for z in pos[1:, axis]:
            x = f @ x
            p = f @ p @ f.T + q
            s = hrow @ p @ hrow + r
            k = (p @ hrow) / s
            x = x + k * (z - hrow @ x)
            p = p - np.outer(k, hrow @ p)
        for step in range(t_out):
            x = f @ x
            p = f @ p @ f.T + q
            mu[step, axis] = x[0]
            var[step, axis] = p[0, 0]
    return GaussianForecast(mu=mu, log_var=np.log(var), dt=dt)


def _systematic_resample(weights: np.ndarray, rng) -> np.ndarray:
    n = len(weights)
    positions = (rng.random() + np.arange(n)) / n
    return np.searchsorted(np.cumsum(weights), positions)


def baseline_particle(
    window,
    t_out: int,
    n_particles: int = 500,
    seed: int = 0,
    dt: float = 1.0 / 30.0,
    process_noise: float = 0.5,
    measurement_noise: float = 0.01,  # wider than sensor noise so fast-motion residuals keep finite weights
) -> GaussianForecast:
    """Bootstrap particle filter with a constant-velocity motion model.

    Particles carry [position, velocity] per axis; propagation adds white
    acceleration noise, weights come from a Gaussian measurement likelihood, and
    systematic resampling runs every update. The forecast is the particle-cloud
    mean with log_var from the cloud variance.
    """
    pos = _window_positions(window)
    if pos.shape[0] < 2:
        raise ValueError("particle baseline needs at least two samples")
    rng = np.random.default_rng(seed)

    if measurement_noise > 0:
        # Same prior as the Kalman baseline: position at the first sample with
        # sensor spread, velocity diffuse.
        p_part = pos[0] + rng.normal(scale=measurement_noise, size=(n_particles, 3))
        v_part = rng.normal(scale=1.0, size=(n_particles, 3))
    else:
        p_part = np.tile(pos[0], (n_particles, 1))
        v_part = np.tile((pos[1] - pos[0]) / dt, (n_particles, 1))

    # Exact discretization of white-acceleration noise (matches the KF's Q block).
    if process_noise > 0:
        q_block = process_noise * np.array([[dt**3 / 3.0, dt**2 / 2.0], [dt**2 / 2.0, dt]])
        chol = np.linalg.cholesky(q_block)
    else:
        chol = None

    def propagate(p, v):
        p_new = p + v * dt
        v_new = v.copy()
        if chol is not None:
            noise = rng.normal(size=(n_particles, 3, 2)) @ chol.T
            p_new = p_new + noise[:, :, 0]
            v_new = v_new + noise[:, :, 1]
        return p_new, v_new

    for z in pos[1:]:
        p_part, v_part = propagate(p_part, v_part)
        if measurement_noise > 0:
            sq = np.sum((p_part - z) ** 2, axis=1)
            w = np.exp(-0.5 * sq / measurement_noise**2)
            total = w.sum()
            if total <= 0 or not np.isfinite(total):
                raise ParticleDegeneracyError("all particle weights are zero")
            w /= total
            idx = _systematic_resample(w, rng)
            p_part = p_part[idx]
            v_part = v_part[idx]

    mu = np.zeros((t_out, 3))
    var = np.zeros((t_out, 3))
    for step in range(t_out):
        p_part, v_part = propagate(p_part, v_part)
        mu[step] = p_part.mean(axis=0)
        var[step] = p_part.var(axis=0)
    floor = 1e-300
    return GaussianForecast(mu=mu, log_var=np.log(np.maximum(var, floor)), dt=dt)
