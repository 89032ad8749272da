"""Probabilistic hand-trajectory forecasting.

network    autoregressive encoder-decoder recurrent net with a Gaussian head
training   composite NLL + MSE loss, AdamW with cosine annealing
baselines  linear extrapolation, Kalman filter, bootstrap particle filter
metrics    displacement errors and interval calibration
dataset    synthetic trajectory generator, CSV and checkpoint I/O
"""

from uapcbf.forecast.network import (
    GaussianForecast,
    NetParams,
    TrajectoryWindow,
    forecast,
    init_params,
    run_network,
)
from uapcbf.forecast.training import TrainConfig, TrainingDivergedError, loss, train
from uapcbf.forecast.baselines import (
    ParticleDegeneracyError,
    baseline_kalman,
    baseline_linear,
    baseline_particle,
)
from uapcbf.forecast.metrics import calibration, evaluate

__all__ = [
    "GaussianForecast",
    "NetParams",
    "TrajectoryWindow",
    "forecast",
    "init_params",
    "run_network",
    "TrainConfig",
    "TrainingDivergedError",
    "loss",
    "train",
    "ParticleDegeneracyError",
    "baseline_kalman",
    "baseline_linear",
    "baseline_particle",
    "calibration",
    "evaluate",
]
