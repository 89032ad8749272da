"""Displacement-error metrics and interval calibration for forecasts."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

from uapcbf.forecast.network import GaussianForecast

DEFAULT_LEVELS = (0.90, 0.95, 0.99)


def displacement_errors(pred: np.ndarray, truth: np.ndarray):
    """Per-sequence (ADE, FDE): mean and final Euclidean step errors."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth shapes must match")
    dists = np.linalg.norm(pred - truth, axis=-1)
    return float(dists.mean()), float(dists[-1])


def evaluate(predictions, truths):
    """ADE and FDE as mean +/- std across sequences.

    predictions may be GaussianForecast objects or (T_out, 3) arrays.
    """
    if len(predictions) != len(truths) or not predictions:
        raise ValueError("need equal, nonzero numbers of predictions and truths")
    ades, fdes = [], []
    for pred, truth in zip(predictions, truths):
        mu = pred.mu if isinstance(pred, GaussianForecast) else pred
        ade, fde = displacement_errors(mu, truth)
        ades.append(ade)
        fdes.append(fde)
    ades = np.array(ades)
    fdes = np.array(fdes)
    return {
        "ade": (float(ades.mean()), float(ades.std())),
        "fde": (float(fdes.mean()), float(fdes.std())),
    }


def calibration(forecasts, truths, levels=DEFAULT_LEVELS):
    """Empirical coverage of per-coordinate Gaussian intervals mu +/- z*sigma.

    Coverage counts each of the three axes separately (marginal coverage), over
    every forecast step of every sequence.
    """
    if not forecasts:
        raise ValueError("need at least one forecast")
    inside = {level: 0 for level in levels}
    total = 0
    for fc, truth in zip(forecasts, truths):
        truth = np.asarray(truth, dtype=float)
        sigma = fc.std()
        err = np.abs(truth - fc.mu)
        total += err.size
        for level in levels:
            z = norm.ppf(0.5 + level / 2.0)
            inside[level] += int(np.count_nonzero(err <= z * sigma))
    return {level: inside[level] / total for level in levels}
