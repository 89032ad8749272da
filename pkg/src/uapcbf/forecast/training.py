"""Composite Gaussian-NLL + MSE training with AdamW and cosine annealing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uapcbf.forecast.network import (
    GaussianForecast,
    NetParams,
    backward,
    init_params,
    run_network,
)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    rho: float = 1.0  # NLL weight
    omega: float = 1.0  # MSE weight
    learning_rate: float = 1e-4
    epochs: int = 200
    batch_size: int = 128
    seed: int = 0
    weight_decay: float = 1e-2
    lr_min: float = 0.0
    hidden_size: int = 64
    num_layers: int = 2
    # Fraction of epochs after which the variance head starts fitting. The MSE
    # term shapes the trunk and means throughout; the NLL term is routed into the
    # log-variance head columns only (naive joint descent on the composite loss
    # collapses into a hold-last-position attractor, see tests).
    variance_start_frac: float = 0.5

    def __post_init__(self):
        if self.rho <= 0 or self.omega <= 0:
            raise ValueError("rho and omega must be > 0")
        if not 0.0 <= self.variance_start_frac < 1.0:
            raise ValueError("variance_start_frac must be in [0, 1)")


def loss_terms(mu, log_var, truth, rho, omega):
    """Loss value plus gradients w.r.t. mu and log_var.

    NLL sums 0.5*log_var + residual^2/(2*var) over steps and coordinates and
    averages over the batch; MSE sums squared residuals over coordinates and
    averages over batch * horizon.
    """
    mu = np.asarray(mu, dtype=float)
    log_var = np.asarray(log_var, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if mu.shape != truth.shape or log_var.shape != truth.shape:
        raise ValueError("mu, log_var, truth shapes must match")
    b, t_out, _ = mu.shape
    err = mu - truth
    inv_var = np.exp(-log_var)
    nll = float(np.sum(0.5 * log_var + 0.5 * err * err * inv_var) / b)
    mse = float(np.sum(err * err) / (b * t_out))
    total = rho * nll + omega * mse
    dmu = rho * (err * inv_var) / b + omega * (2.0 * err) / (b * t_out)
    dlog_var = rho * (0.5 - 0.5 * err * err * inv_var) / b
    return total, dmu, dlog_var, nll, mse


def loss(fc: GaussianForecast, truth, rho: float, omega: float) -> float:
    """Composite loss for a single forecast against its ground truth."""
    total, _, _, _, _ = loss_terms(fc.mu[None], fc.log_var[None], np.asarray(truth, dtype=float)[None], rho, omega)
    return total


def loss_and_grads(params: NetParams, windows, truths, rho, omega):
    """Forward + analytic backward for a centered batch. Returns (loss, grads)."""
    t_out = np.asarray(truths).shape[1]
    mu, log_var, cache = run_network(params, windows, t_out)
    total, dmu, dlog_var, _, _ = loss_terms(mu, log_var, truths, rho, omega)
    grads = backward(params, cache, dmu, dlog_var)
    return total, grads


def _training_grads(params: NetParams, windows, truths, rho, omega, fit_variance: bool):
    """Gradient routing used by train(): MSE drives trunk and means, NLL drives
    the variance head once fit_variance turns on."""
    t_out = np.asarray(truths).shape[1]
    mu, log_var, cache = run_network(params, windows, t_out)
    total, dmu_full, dlog_var_full, _, mse = loss_terms(mu, log_var, truths, rho, omega)
    b, t = mu.shape[0], mu.shape[1]
    err = mu - truths
    dmu = omega * 2.0 * err / (b * t)
    dlog_var = dlog_var_full if fit_variance else np.zeros_like(dlog_var_full)
    grads = backward(params, cache, dmu, dlog_var, detach_log_var=True)
    return total, grads


class AdamW:
    """Decoupled weight decay + adaptive moments over a list of arrays."""

    def __init__(self, arrays, weight_decay=1e-2, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]
        self.t = 0
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def step(self, arrays, grads, lr):
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            a -= lr * self.weight_decay * a
            a -= lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def cosine_lr(base_lr, lr_min, epoch, total_epochs):
    if total_epochs <= 1:
        return base_lr
    frac = epoch / (total_epochs - 1)
    return lr_min + 0.5 * (base_lr - lr_min) * (1.0 + np.cos(np.pi * frac))


def _init_variance_bias(params: NetParams, windows, truths, batch_size):
    t_out = truths.shape[1]
    sums = np.zeros(3)
    count = 0
    for start in range(0, len(windows), batch_size):
        mu, _, _ = run_network(params, windows[start : start + batch_size], t_out)
        err = mu - truths[start : start + batch_size]
        sums += np.sum(err * err, axis=(0, 1))
        count += err.shape[0] * err.shape[1]
    mean_sq = np.maximum(sums / max(count, 1), 1e-12)
    params.b_o[3:] = np.log(mean_sq)


def _center_pairs(dataset):
    """Stack (window, truth) pairs, zero-centered per pair at the last observed sample."""
    windows = np.stack([np.asarray(w, dtype=float) for w, _ in dataset])
    truths = np.stack([np.asarray(t, dtype=float) for _, t in dataset])
    centers = windows[:, -1:, :].copy()
    return windows - centers, truths - centers, centers


def train(dataset, cfg: TrainConfig, params: NetParams | None = None, callback=None):
    """Train on (window, truth) pairs; fully deterministic under cfg.seed.

    Returns (params, history) where history is the per-epoch mean training loss.
    Raises TrainingDivergedError when the loss stops being finite.
    """
    if not dataset:
        raise ValueError("dataset must be nonempty")
    if params is None:
        params = init_params(cfg.hidden_size, cfg.num_layers, seed=cfg.seed)
    else:
        params = params.copy()

    windows, truths, _ = _center_pairs(dataset)
    n = len(windows)
    rng = np.random.default_rng(cfg.seed)
    opt = AdamW(params.arrays(), weight_decay=cfg.weight_decay)
    history = []

    variance_start = int(np.floor(cfg.variance_start_frac * cfg.epochs))
    for epoch in range(cfg.epochs):
        lr = cosine_lr(cfg.learning_rate, cfg.lr_min, epoch, cfg.epochs)
        fit_variance = epoch >= variance_start
        if epoch == variance_start:
            # Warm-start the log-variance bias at the current residual scale so the
            # NLL phase only has to learn structure, not travel orders of magnitude.
            _init_variance_bias(params, windows, truths, cfg.batch_size)
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            total, grads = _training_grads(
                params, windows[idx], truths[idx], cfg.rho, cfg.omega, fit_variance
            )
            if not np.isfinite(total):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch {n_batches} (lr={lr:.2e})"
                )
            opt.step(params.arrays(), grads.arrays(), lr)
            epoch_loss += total
            n_batches += 1
        history.append(epoch_loss / max(n_batches, 1))
        if callback is not None:
            callback(epoch, history[-1])

    return params, history
