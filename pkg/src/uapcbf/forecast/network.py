"""Autoregressive encoder-decoder recurrent network with a Gaussian head, in numpy.

The encoder compresses an observed position window into its final hidden/cell
state; the decoder unrolls from that state, feeding each predicted mean back in
as the next input; a linear head maps each decoder output to [mu_k, log_var_k]
per Cartesian coordinate. Forward and backward passes are hand-written so every
gradient is analytic and checkable against finite differences at 64-bit.

Inference is pure (no RNG). Positions are zero-centered at the last observed
sample before entering the network and the offset is added back on the way out,
making the model translation invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INPUT_DIM = 3
HEAD_DIM = 6  # [mu_x, mu_y, mu_z, logvar_x, logvar_y, logvar_z]


@dataclass
class TrajectoryWindow:
    """Observed positions (T_in, 3) at a fixed rate; t_last is the newest timestamp."""

    positions: np.ndarray
    t_last: float = 0.0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 2:
            raise ValueError("window must be (T_in >= 2, 3)")
        if not np.all(np.isfinite(pos)):
            raise ValueError("window positions must be finite")
        object.__setattr__(self, "positions", pos)


@dataclass
class GaussianForecast:
    """Per-step predicted mean (m) and log-variance over a future horizon."""

    mu: np.ndarray  # (T_out, 3)
    log_var: np.ndarray  # (T_out, 3)
    dt: float

    def variance(self, use_paper_half_exp: bool = False) -> np.ndarray:
        if use_paper_half_exp:
            return np.exp(0.5 * self.log_var)
        return np.exp(self.log_var)

    def std(self) -> np.ndarray:
        return np.exp(0.5 * self.log_var)

    @property
    def horizon(self) -> int:
        return self.mu.shape[0]


@dataclass
class LstmLayerParams:
    w_x: np.ndarray  # (input_dim, 4H), gate order [i, f, g, o]
    w_h: np.ndarray  # (H, 4H)
    b: np.ndarray  # (4H,)


@dataclass
class NetParams:
    encoder: list
    decoder: list
    w_o: np.ndarray  # (H, 6)
    b_o: np.ndarray  # (6,)
    hidden_size: int = 64
    num_layers: int = 2

    def arrays(self):
        """All parameter arrays in a fixed order, for optimizers and flattening."""
        out = []
        for stack in (self.encoder, self.decoder):
            for layer in stack:
                out.extend([layer.w_x, layer.w_h, layer.b])
        out.extend([self.w_o, self.b_o])
        return out

    def copy(self) -> "NetParams":
        enc = [LstmLayerParams(l.w_x.copy(), l.w_h.copy(), l.b.copy()) for l in self.encoder]
        dec = [LstmLayerParams(l.w_x.copy(), l.w_h.copy(), l.b.copy()) for l in self.decoder]
        return NetParams(enc, dec, self.w_o.copy(), self.b_o.copy(), self.hidden_size, self.num_layers)


def init_params(hidden_size: int = 64, num_layers: int = 2, seed: int = 0, zero: bool = False) -> NetParams:
    """Seeded uniform init, forget-gate bias at +1 unless zero-initialized."""
    rng = np.random.default_rng(seed)
    h = hidden_size

    def layer(input_dim):
        if zero:
            return LstmLayerParams(np.zeros((input_dim, 4 * h)), np.zeros((h, 4 * h)), np.zeros(4 * h))
        bound = 1.0 / np.sqrt(h)
        b = np.zeros(4 * h)
        b[h : 2 * h] = 1.0
        return LstmLayerParams(
            rng.uniform(-bound, bound, (input_dim, 4 * h)),
            rng.uniform(-bound, bound, (h, 4 * h)),
            b,
        )

    encoder = [layer(INPUT_DIM if l == 0 else h) for l in range(num_layers)]
    decoder = [layer(INPUT_DIM if l == 0 else h) for l in range(num_layers)]
    if zero:
        w_o = np.zeros((h, HEAD_DIM))
    else:
        w_o = rng.uniform(-1.0 / np.sqrt(h), 1.0 / np.sqrt(h), (h, HEAD_DIM))
    b_o = np.zeros(HEAD_DIM)
    return NetParams(encoder, decoder, w_o, b_o, hidden_size, num_layers)


def zero_grads(params: NetParams) -> NetParams:
    enc = [LstmLayerParams(np.zeros_like(l.w_x), np.zeros_like(l.w_h), np.zeros_like(l.b)) for l in params.encoder]
    dec = [LstmLayerParams(np.zeros_like(l.w_x), np.zeros_like(l.w_h), np.zeros_like(l.b)) for l in params.decoder]
    return NetParams(enc, dec, np.zeros_like(params.w_o), np.zeros_like(params.b_o), params.hidden_size, params.num_layers)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _step_forward(layer: LstmLayerParams, hsz, x, h_prev, c_prev):
    z = x @ layer.w_x + h_prev @ layer.w_h + layer.b
    i = _sigmoid(z[:, :hsz])
    f = _sigmoid(z[:, hsz : 2 * hsz])
    g = np.tanh(z[:, 2 * hsz : 3 * hsz])
    o = _sigmoid(z[:, 3 * hsz :])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    return h, c, (x, h_prev, c_prev, i, f, g, o, c, tc)


def _step_backward(layer: LstmLayerParams, grad: LstmLayerParams, cache, dh, dc):
    x, h_prev, c_prev, i, f, g, o, c, tc = cache
    do = dh * tc
    dc = dc + dh * o * (1.0 - tc * tc)
    di = dc * g
    df = dc * c_prev
    dg = dc * i
    dc_prev = dc * f
    dz = np.concatenate(
        [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g * g), do * o * (1.0 - o)], axis=1
    )
    grad.w_x += x.T @ dz
    grad.w_h += h_prev.T @ dz
    grad.b += dz.sum(axis=0)
    dx = dz @ layer.w_x.T
    dh_prev = dz @ layer.w_h.T
    return dx, dh_prev, dc_prev


def run_network(params: NetParams, windows: np.ndarray, t_out: int):
    """Forward pass on centered windows (B, T_in, 3).

    Returns (mu, log_var, cache) with mu/log_var of shape (B, T_out, 3). The cache
    feeds backward() and can be discarded for inference.
    """
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 3 or windows.shape[2] != INPUT_DIM:
        raise ValueError("windows must be (B, T_in, 3)")
    b, t_in, _ = windows.shape
    hsz, nl = params.hidden_size, params.num_layers

    h = [np.zeros((b, hsz)) for _ in range(nl)]
    c = [np.zeros((b, hsz)) for _ in range(nl)]
    enc_cache = []
    for t in range(t_in):
        x = windows[:, t]
        step_cache = []
        for l in range(nl):
            h[l], c[l], sc = _step_forward(params.encoder[l], hsz, x, h[l], c[l])
            step_cache.append(sc)
            x = h[l]
        enc_cache.append(step_cache)

    mu = np.zeros((b, t_out, INPUT_DIM))
    log_var = np.zeros((b, t_out, INPUT_DIM))
    dec_cache = []
    x = windows[:, -1]  # first decoder input: last observed position
    for k in range(t_out):
        step_cache = []
        inp = x
        for l in range(nl):
            h[l], c[l], sc = _step_forward(params.decoder[l], hsz, inp, h[l], c[l])
            step_cache.append(sc)
            inp = h[l]
        out = h[nl - 1] @ params.w_o + params.b_o
        mu[:, k] = out[:, :INPUT_DIM]
        log_var[:, k] = out[:, INPUT_DIM:]
        dec_cache.append((step_cache, h[nl - 1]))
        x = mu[:, k]

    return mu, log_var, (enc_cache, dec_cache, b, t_in, t_out)


def backward(params: NetParams, cache, dmu: np.ndarray, dlog_var: np.ndarray, detach_log_var: bool = False) -> NetParams:
    """Backpropagation through decoder feedback, decoder, and encoder.

    dmu/dlog_var are the loss gradients w.r.t. the network outputs, shape
    (B, T_out, 3). Returns parameter gradients with the NetParams layout.
    With detach_log_var the log-variance gradients update only the head columns
    that produce them; nothing flows back into the recurrent trunk, so variance
    fitting cannot disturb the mean path.
    """
    enc_cache, dec_cache, b, t_in, t_out = cache
    hsz, nl = params.hidden_size, params.num_layers
    grads = zero_grads(params)

    dh = [np.zeros((b, hsz)) for _ in range(nl)]
    dc = [np.zeros((b, hsz)) for _ in range(nl)]
    dx_feedback = np.zeros((b, INPUT_DIM))  # d(loss)/d(mu_k) routed through step k+1 input

    for k in range(t_out - 1, -1, -1):
        step_cache, h_top = dec_cache[k]
        dout = np.concatenate([dmu[:, k] + dx_feedback, dlog_var[:, k]], axis=1)
        grads.w_o += h_top.T @ dout
        grads.b_o += dout.sum(axis=0)
        if detach_log_var:
            dh[nl - 1] = dh[nl - 1] + dout[:, :INPUT_DIM] @ params.w_o[:, :INPUT_DIM].T
        else:
            dh[nl - 1] = dh[nl - 1] + dout @ params.w_o.T
        dx_feedback = np.zeros((b, INPUT_DIM))
        d_lower = None
        for l in range(nl - 1, -1, -1):
            if d_lower is not None:
                dh[l] = dh[l] + d_lower
            dx, dh[l], dc[l] = _step_backward(params.decoder[l], grads.decoder[l], step_cache[l], dh[l], dc[l])
            d_lower = dx
        if k > 0:
            dx_feedback = d_lower  # flows into mu_{k-1}
        # k == 0: input was observed data, gradient discarded.

    for t in range(t_in - 1, -1, -1):
        step_cache = enc_cache[t]
        d_lower = None
        for l in range(nl - 1, -1, -1):
            if d_lower is not None:
                dh[l] = dh[l] + d_lower
            dx, dh[l], dc[l] = _step_backward(params.encoder[l], grads.encoder[l], step_cache[l], dh[l], dc[l])
            d_lower = dx

    return grads


def forecast(params: NetParams, window, t_out: int, dt: float = 1.0 / 30.0) -> GaussianForecast:
    """Forecast t_out future positions from an observed window.

    A TrajectoryWindow or a raw (T_in, 3) array is accepted. The window is
    centered at its last sample; the offset is restored on the predicted means.
    """
    if t_out < 1:
        raise ValueError("t_out must be >= 1")
    pos = window.positions if isinstance(window, TrajectoryWindow) else np.asarray(window, dtype=float)
    center = pos[-1]
    mu, log_var, _ = run_network(params, (pos - center)[None, :, :], t_out)
    return GaussianForecast(mu=mu[0] + center, log_var=log_var[0], dt=dt)


def params_to_vector(params: NetParams) -> np.ndarray:
    return np.concatenate([a.ravel() for a in params.arrays()])


def vector_to_params(vec: np.ndarray, template: NetParams) -> NetParams:
    out = template.copy()
    offset = 0
    for a in out.arrays():
        n = a.size
        a[...] = vec[offset : offset + n].reshape(a.shape)
        offset += n
    if offset != vec.size:
        raise ValueError("vector length does not match parameter count")
    return out
