"""Command line entry point.

Subcommands: train, forecast-eval, calibrate, run-scenario, sweep, serve.
Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DESK_TRAIN = dict(learning_rate=1e-3, epochs=60, batch_size=256, weight_decay=1e-4)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=Path, default=Path("out"))
    parser.add_argument("--log-level", default="INFO")


def build_parser():
    parser = argparse.ArgumentParser(prog="uapcbf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the forecaster on synthetic data")
    _add_common(p)
    p.add_argument("--sequences", type=int, default=5000)
    p.add_argument("--epochs", type=int, default=DESK_TRAIN["epochs"])
    p.add_argument("--learning-rate", type=float, default=DESK_TRAIN["learning_rate"])
    p.add_argument("--batch-size", type=int, default=DESK_TRAIN["batch_size"])
    p.add_argument("--weight-decay", type=float, default=DESK_TRAIN["weight_decay"])
    p.add_argument("--data-dir", type=Path, default=None, help="CSV corpus; generated when omitted")
    p.add_argument("--checkpoint", type=Path, default=None, help="output path (default out-dir/model.bin)")

    p = sub.add_parser("forecast-eval", help="evaluate the model and baselines")
    _add_common(p)
    p.add_argument("--horizon-ms", type=int, default=1000)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--sequences", type=int, default=800)

    p = sub.add_parser("calibrate", help="empirical interval coverage on held-out data")
    _add_common(p)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--sequences", type=int, default=800)

    p = sub.add_parser("run-scenario", help="run one scenario from a JSON config")
    _add_common(p)
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--trace", type=Path, default=None, help="trace output (default out-dir/trace_<seed>.jsonl)")

    p = sub.add_parser("sweep", help="method x gamma grid from a JSON grid spec")
    _add_common(p)
    p.add_argument("--grid", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("serve", help="live teleoperation WebSocket service")
    _add_common(p)
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--rate-hz", type=float, default=30.0)
    return parser


def _dataset_pairs(n_sequences, seed, data_dir=None, t_in=15, t_out=30):
    from uapcbf.forecast.dataset import (
        SynthConfig,
        make_dataset,
        read_trajectory_csv,
        synth_recordings,
    )

    if data_dir is not None:
        recs = []
        for path in sorted(Path(data_dir).glob("*.csv")):
            recs.append(read_trajectory_csv(path))
    else:
        n_rec = max(2, int(np.ceil(n_sequences / 31)))
        recs = synth_recordings(SynthConfig(n_recordings=n_rec), seed)
    pairs = make_dataset(recs, t_in, t_out, stride=10)
    rng = np.random.default_rng(seed)
    if len(pairs) > n_sequences:
        idx = rng.permutation(len(pairs))[:n_sequences]
        pairs = [pairs[i] for i in idx]
    return pairs


def cmd_train(args) -> int:
    from uapcbf.forecast.dataset import save_checkpoint
    from uapcbf.forecast.training import TrainConfig, train

    pairs = _dataset_pairs(args.sequences, args.seed, args.data_dir)
    logging.info("training on %d pairs", len(pairs))
    cfg = TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        weight_decay=args.weight_decay,
        seed=args.seed,
    )
    start = time.time()
    params, history = train(pairs, cfg, callback=lambda e, l: logging.info("epoch %d loss %.5f", e, l))
    out = args.checkpoint or args.out_dir / "model.bin"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out, params, meta={"t_in": 15, "t_out": 30, "dt": 1 / 30, "seconds": time.time() - start})
    print(f"checkpoint written to {out} (final loss {history[-1]:.5f})")
    return EXIT_OK


def _eval_data(args, horizon_steps):
    pairs = _dataset_pairs(args.sequences, args.seed + 1_000_003, None, t_in=15, t_out=horizon_steps)
    windows = [w for w, _ in pairs]
    truths = [t for _, t in pairs]
    return windows, truths


def cmd_forecast_eval(args) -> int:
    from uapcbf.forecast.baselines import baseline_kalman, baseline_linear, baseline_particle
    from uapcbf.forecast.dataset import load_checkpoint
    from uapcbf.forecast.metrics import evaluate
    from uapcbf.forecast.network import forecast as net_forecast

    dt = 1 / 30
    horizon = max(1, int(round(args.horizon_ms / 1000 * 30)))
    windows, truths = _eval_data(args, horizon)
    table = {}
    if args.checkpoint:
        params, _ = load_checkpoint(args.checkpoint)
        table["model"] = evaluate([net_forecast(params, w, horizon, dt) for w in windows], truths)
    table["linear"] = evaluate([baseline_linear(w, horizon, dt) for w in windows], truths)
    table["kalman"] = evaluate([baseline_kalman(w, horizon, dt) for w in windows], truths)
    table["particle"] = evaluate(
        [baseline_particle(w, horizon, seed=args.seed + i, dt=dt) for i, w in enumerate(windows)], truths
    )
    for name, res in table.items():
        print(f"{name:9s} ADE {res['ade'][0]:.4f} +/- {res['ade'][1]:.4f}   FDE {res['fde'][0]:.4f} +/- {res['fde'][1]:.4f}")
    out = args.out_dir / f"forecast_eval_{args.horizon_ms}ms.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print(f"written to {out}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    from uapcbf.forecast.dataset import load_checkpoint
    from uapcbf.forecast.metrics import calibration
    from uapcbf.forecast.network import forecast as net_forecast

    params, _ = load_checkpoint(args.checkpoint)
    windows, truths = _eval_data(args, 30)
    forecasts = [net_forecast(params, w, 30, 1 / 30) for w in windows]
    cov = calibration(forecasts, truths)
    for level, got in sorted(cov.items()):
        print(f"{level:.2f} nominal -> {got:.4f} empirical (per-coordinate intervals)")
    out = args.out_dir / "calibration.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({str(k): v for k, v in cov.items()}, indent=2, sort_keys=True) + "\n")
    print(f"written to {out}")
    return EXIT_OK


def cmd_run_scenario(args) -> int:
    from uapcbf.config import scenario_from_file
    from uapcbf.harness import compute_metrics
    from uapcbf.sim import run_scenario, write_trace

    scenario, chain, seeds = scenario_from_file(args.config)
    seed = args.seed if args.seed != 0 or len(seeds) == 0 else seeds[0]
    records = run_scenario(scenario, seed=seed, chain=chain)
    trace_path = args.trace or args.out_dir / f"trace_{seed}.jsonl"
    write_trace(trace_path, records)
    report = compute_metrics([records], threshold=scenario.safety.violation_threshold,
                             method=scenario.safety.method.value, gamma=scenario.safety.gamma)
    print(f"trace written to {trace_path}")
    print(f"violations: {report.violation_count[0]:.0f}  mean hand-TCP distance: {report.hand_tcp_distance[0]:.3f} m")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from uapcbf.config import scenario_from_dict, load_json
    from uapcbf.harness import DEFAULT_GAMMA_GRID, DEFAULT_METHODS, emit_report, sweep

    grid = load_json(args.grid)
    scenario, chain, seeds = scenario_from_dict(grid.get("scenario", grid))
    methods = grid.get("methods", [m.value for m in DEFAULT_METHODS])
    gammas = grid.get("gammas", list(DEFAULT_GAMMA_GRID))
    seeds = grid.get("seeds", seeds)
    reports = sweep(scenario, methods=methods, gammas=gammas, seeds=seeds,
                    progress=lambda m, g, s: logging.info("cell %s gamma=%s seed=%s done", m, g, s))
    out = args.out_dir / f"sweep.{args.format}"
    emit_report(reports, args.format, out)
    print(f"sweep written to {out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from uapcbf.bridge import serve

    serve(port=args.port, config_path=args.config, rate_hz=args.rate_hz)
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "forecast-eval": cmd_forecast_eval,
    "calibrate": cmd_calibrate,
    "run-scenario": cmd_run_scenario,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
}

CONFIG_ERRORS = (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CONFIG_ERRORS as exc:
        logging.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # runtime failure
        logging.exception("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
