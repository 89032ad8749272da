#!/usr/bin/env python3
"""Train a small forecaster on synthetic hand motion and compare the baselines.

Uses a reduced corpus and network so the whole script runs in about a minute;
the acceptance suite and `uapcbf train` run the full-size configuration.
"""

import numpy as np

from uapcbf.forecast.baselines import baseline_kalman, baseline_linear, baseline_particle
from uapcbf.forecast.dataset import SynthConfig, make_dataset, subsequence_speed_stats, synth_recordings
from uapcbf.forecast.metrics import calibration, evaluate
from uapcbf.forecast.network import forecast
from uapcbf.forecast.training import TrainConfig, train

T_IN, T_OUT, DT = 15, 30, 1 / 30

train_recs = synth_recordings(SynthConfig(n_recordings=30), seed=1)
test_recs = synth_recordings(SynthConfig(n_recordings=8), seed=2)
speeds, max_speed = subsequence_speed_stats(train_recs)
print(f"corpus: {len(train_recs)} recordings, per-second mean speed {speeds.mean():.3f} m/s, max {max_speed:.2f} m/s")

train_pairs = make_dataset(train_recs, T_IN, T_OUT, stride=12)
test_pairs = make_dataset(test_recs, T_IN, T_OUT, stride=20)
print(f"training on {len(train_pairs)} windows, evaluating on {len(test_pairs)}\n")

cfg = TrainConfig(learning_rate=1e-3, epochs=25, batch_size=128, weight_decay=1e-4,
                  seed=1, hidden_size=32, num_layers=2)
params, history = train(train_pairs, cfg, callback=lambda e, l: print(f"  epoch {e:2d}  loss {l:+.4f}") if e % 5 == 0 else None)

rows = {"model": [forecast(params, w, T_OUT, DT) for w, _ in test_pairs]}
rows["linear"] = [baseline_linear(w, T_OUT, DT) for w, _ in test_pairs]
rows["kalman"] = [baseline_kalman(w, T_OUT, DT) for w, _ in test_pairs]
rows["particle"] = [baseline_particle(w, T_OUT, seed=i, dt=DT) for i, (w, _) in enumerate(test_pairs)]
truths = [t for _, t in test_pairs]

print("\n1000 ms horizon, held-out synthetic data:")
for name, preds in rows.items():
    res = evaluate(preds, truths)
    print(f"  {name:9s} ADE {res['ade'][0]:.4f} +/- {res['ade'][1]:.4f}   FDE {res['fde'][0]:.4f} +/- {res['fde'][1]:.4f}")

cov = calibration(rows["model"], truths)
print("\nmodel interval coverage (per-coordinate):")
for level, got in sorted(cov.items()):
    print(f"  {level:.0%} nominal -> {got:.1%} empirical")
