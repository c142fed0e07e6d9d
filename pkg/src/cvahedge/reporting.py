"""CSV and manifest writers.  Currency columns are already scaled by the share count."""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_to_dict
from .engine import MetricSeries

METRIC_FIELDS = ("mean_sw", "vol_sw", "mean_sigma", "mean_w", "mean_pnl", "vol_pnl",
                 "mean_unexpl", "vol_unexpl")
_SOURCES = {
    "mean_sw": ("mean", "sw"), "vol_sw": ("vol", "sw"), "mean_sigma": ("mean", "sigma"),
    "mean_w": ("mean", "w"), "mean_pnl": ("mean", "pnl"), "vol_pnl": ("vol", "pnl"),
    "mean_unexpl": ("mean", "unexpl"), "vol_unexpl": ("vol", "unexpl"),
}
PORTFOLIOS = ("p1", "p2")


def _fmt(x) -> str:
    return repr(float(x))


def metrics_header() -> list[str]:
    return ["date"] + [f"{p}_{f}" for p in PORTFOLIOS for f in METRIC_FIELDS]


def write_table(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_metrics_csv(series: MetricSeries, path):
    rows = []
    for k, date in enumerate(series.dates):
        row = [float(date)]
        for p in PORTFOLIOS:
            for f in METRIC_FIELDS:
                stat, metric = _SOURCES[f]
                row.append(float(getattr(series, stat)[p][metric][k]))
        rows.append(row)
    return write_table(path, metrics_header(), rows)


def read_metrics_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    if data.size == 0:
        data = np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_histogram_csv(series: MetricSeries, path):
    edges, counts = series.histogram_edges, series.histogram_counts
    rows = [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))]
    return write_table(path, ["bin_left", "bin_right", "count"], rows)


def write_desk_csv(series: MetricSeries, path):
    rows = [(float(d), float(a), float(b))
            for d, a, b in zip(series.dates, series.desk["w_trading"], series.desk["w_xva"])]
    return write_table(path, ["date", "mean_w_trading", "mean_w_xva"], rows)


def write_event_log(series: MetricSeries, path, shares: float):
    rows = [(p, d, e, a * shares, desk) for p, d, e, a, desk in series.event_log.rows]
    return write_table(path, ["path", "date", "event", "amount", "desk"], rows)


def write_summary(series: MetricSeries, path):
    summary = {
        "v0": series.v0,
        "cva0": series.cva0,
        "epsilon": series.epsilon,
        "epsilon_se": series.epsilon_se,
        "defaults": series.n_defaults,
        "paths": series.n_paths,
        "degenerate_hedges": series.degenerate_hedges,
        "terminal_mean_sw_p1": float(series.terminal["p1"].mean()),
        "terminal_mean_sw_p2": float(series.terminal["p2"].mean()),
    }
    if series.desk is not None:
        summary["desk_max_gap"] = series.desk_max_gap
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return Path(path)


def write_manifest(path, *, config=None, seed=None, command: str, started: str, finished: str,
                   outputs, extra: dict | None = None):
    manifest = {
        "command": command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": seed,
        "config": None if config is None else config_to_dict(config),
        "config_fields": None if config is None else asdict(config),
        "started": started,
        "finished": finished,
        "outputs": sorted(Path(o).name for o in outputs),
    }
    if extra:
        manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return Path(path)
