"""Interaction metrics, experiment sweeps, and report emission.

Six metrics per run: mean hand-TCP distance, TCP path length, average TCP
velocity, completion time, safety-violation event count, and mean per-event
violation magnitude. Violations are counted as contiguous excursions of the
reactive barrier value above the threshold (one event per excursion); a
per-step counting mode is available behind a flag.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from uapcbf.barrier import Method
from uapcbf.sim import ScenarioConfig, run_scenario

log = logging.getLogger(__name__)


@dataclass
class MetricsReport:
    hand_tcp_distance: tuple  # (mean, std) over runs, m
    path_length: tuple
    avg_tcp_velocity: tuple
    completion_time: tuple
    violation_count: tuple
    violation_magnitude: tuple
    runs: int
    method: str = ""
    gamma: float = float("nan")

    FIELDS = (
        "hand_tcp_distance",
        "path_length",
        "avg_tcp_velocity",
        "completion_time",
        "violation_count",
        "violation_magnitude",
    )


def violation_events(h_values, threshold: float = 0.010):
    """Contiguous excursions of h above the threshold: [(start, end, peak_h)]."""
    events = []
    start = None
    peak = -np.inf
    for i, h in enumerate(h_values):
        if h > threshold:
            if start is None:
                start = i
                peak = h
            else:
                peak = max(peak, h)
        elif start is not None:
            events.append((start, i, peak))
            start = None
    if start is not None:
        events.append((start, len(h_values), peak))
    return events


def _run_metrics(trace, threshold, per_step_violations, magnitude_over_threshold):
    if not trace:
        raise ValueError("trace must be nonempty")
    tcp = np.array([rec["tcp"] for rec in trace])
    hand = np.array([rec["hand"] for rec in trace])
    h0 = np.array([rec["h0"] for rec in trace])
    ts = np.array([rec["t"] for rec in trace])
    dt = float(ts[1] - ts[0]) if len(ts) > 1 else 0.0

    dist = float(np.linalg.norm(hand - tcp, axis=1).mean())
    seg = np.linalg.norm(np.diff(tcp, axis=0), axis=1)
    path = float(seg.sum())
    velocity = float((seg / dt).mean()) if dt > 0 and len(seg) else 0.0
    duration = float(ts[-1] - ts[0] + dt) if len(ts) > 1 else 0.0

    events = violation_events(h0, threshold)
    if per_step_violations:
        count = int(np.count_nonzero(h0 > threshold))
    else:
        count = len(events)
    baseline = threshold if magnitude_over_threshold else 0.0
    magnitude = float(np.mean([peak - baseline for _, _, peak in events])) if events else 0.0
    return dist, path, velocity, duration, count, magnitude


def compute_metrics(traces, threshold: float = 0.010, per_step_violations: bool = False,
                    magnitude_over_threshold: bool = False, method: str = "",
                    gamma: float = float("nan")) -> MetricsReport:
    """Aggregate per-run metrics into mean +/- std across runs.

    traces is one trace (list of records) or a list of traces.
    """
    if traces and isinstance(traces[0], dict):
        traces = [traces]
    if not traces:
        raise ValueError("need at least one trace")
    rows = np.array([
        _run_metrics(trace, threshold, per_step_violations, magnitude_over_threshold) for trace in traces
    ])
    means = rows.mean(axis=0)
    stds = rows.std(axis=0) if len(rows) > 1 else np.zeros(rows.shape[1])
    vals = [(float(m), float(s)) for m, s in zip(means, stds)]
    return MetricsReport(*vals, runs=len(rows), method=method, gamma=gamma)


DEFAULT_GAMMA_GRID = (0.0, 0.5, 1.0, 2.5, 5.0)
# The lambda ablation keeps the predictive penalty pinned at lambda_r while the
# barrier still uses the uncertainty inflation.
LAMBDA_ABLATION = "UA_PCBF_LAMBDA_FIXED"
DEFAULT_METHODS = (Method.CBF, Method.PCBF, Method.UA_PCBF)


def _resolve_method(method):
    if isinstance(method, str) and method.upper() == LAMBDA_ABLATION:
        return Method.UA_PCBF, True, LAMBDA_ABLATION
    m = Method(method)
    return m, False, m.value


def sweep(base: ScenarioConfig, methods=DEFAULT_METHODS, gammas=DEFAULT_GAMMA_GRID,
          seeds=(0, 1, 2, 3, 4), threshold: float | None = None, progress=None):
    """Method x gamma grid, aggregated over seeds.

    Gamma varies only for the UA-PCBF rows (and the lambda ablation, spelled
    "UA_PCBF_LAMBDA_FIXED" in methods).
    """
    reports = []
    for method in methods:
        method_enum, fixed_lambda, label = _resolve_method(method)
        gamma_values = gammas if method_enum is Method.UA_PCBF else (base.safety.gamma,)
        for gamma in gamma_values:
            cfg = replace(base, safety=replace(base.safety, method=method_enum, gamma=gamma,
                                               fixed_lambda_p=fixed_lambda))
            try:
                traces = []
                for seed in seeds:
                    traces.append(run_scenario(cfg, seed=seed))
                    if progress:
                        progress(label, gamma, seed)
                thr = cfg.safety.violation_threshold if threshold is None else threshold
                reports.append(compute_metrics(traces, threshold=thr, method=label, gamma=gamma))
            except Exception:
                # Diagnostic row: the cell aborted, the sweep continues.
                log.exception("sweep cell failed (method=%s gamma=%s)", label, gamma)
                nan = (float("nan"), float("nan"))
                reports.append(MetricsReport(nan, nan, nan, nan, nan, nan, runs=0,
                                             method=label, gamma=gamma))
    return reports


def _flatten(report: MetricsReport) -> dict:
    row = {"method": report.method, "gamma": report.gamma, "runs": report.runs}
    for name in MetricsReport.FIELDS:
        mean, std = getattr(report, name)
        row[f"{name}_mean"] = mean
        row[f"{name}_std"] = std
    return row


CSV_COLUMNS = ["method", "gamma", "runs"] + [
    f"{name}_{suffix}" for name in MetricsReport.FIELDS for suffix in ("mean", "std")
]


def emit_report(reports, fmt: str, path):
    """Write reports as CSV (fixed column order) or JSON; round trips losslessly."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            payload = [_flatten(r) for r in reports]
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        elif fmt == "csv":
            with open(path, "w", newline="") as f:
                writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
                writer.writeheader()
                for r in reports:
                    writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in _flatten(r).items()})
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_report(path):
    """Parse a report back into MetricsReport objects (inverse of emit_report)."""
    path = Path(path)
    if path.suffix == ".json" or path.read_text(encoding="utf-8").lstrip().startswith("["):
        rows = json.loads(path.read_text())
    else:
        with open(path, newline="") as f:
            rows = []
            for raw in csv.DictReader(f):
                row = dict(raw)
                for k, v in row.items():
                    if k not in ("method",):
                        row[k] = float(v) if k != "runs" else int(v)
                rows.append(row)
    reports = []
    for row in rows:
        vals = [(float(row[f"{name}_mean"]), float(row[f"{name}_std"])) for name in MetricsReport.FIELDS]
        reports.append(MetricsReport(*vals, runs=int(row["runs"]), method=row["method"], gamma=float(row["gamma"])))
    return reports
