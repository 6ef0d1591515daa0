"""Trace serialization: wide per-step CSV, events CSV, residual exports.

Floats are written with 17 significant digits so parsing them back gives the
exact same float64 values (round-trip identity); times are strictly
increasing by construction.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .engine import SimTrace
from .errors import ConfigurationError

__all__ = [
    "trace_columns",
    "write_trace_csv",
    "read_trace_csv",
    "write_events_csv",
    "export_residual_plots_data",
    "write_summary",
]

_FMT = "%.17g"


def trace_columns(trace: SimTrace):
    """Ordered (name, 1-D array) pairs that make up the wide CSV."""
    cols = [("t", trace.t)]

    def add_block(prefix, arr):
        for j in range(arr.shape[1]):
            cols.append((f"{prefix}{j}", arr[:, j]))

    add_block("x", trace.x)
    add_block("z", trace.z)
    add_block("zhat", trace.z_hat)
    add_block("zc", trace.z_C)
    add_block("xhat", trace.x_hat)
    cols.append(("g", trace.g))
    add_block("u", trace.u)
    add_block("ustar", trace.u_star)
    add_block("y", trace.y)
    add_block("yz", trace.y_z)
    cols.append(("res_z", trace.res_z))
    cols.append(("dis_t", trace.dis_t))
    cols.append(("res_x", trace.res_x))
    cols.append(("alarm_res_x", trace.alarms[:, 0].astype(float)))
    cols.append(("alarm_res_z", trace.alarms[:, 1].astype(float)))
    cols.append(("alarm_dis_t", trace.alarms[:, 2].astype(float)))
    cols.append(("verdict", trace.verdicts.astype(float)))
    cols.append(("out_event", trace.out_event_flag.astype(float)))
    cols.append(("aux_event", trace.aux_event_flag.astype(float)))
    return cols


def write_trace_csv(trace: SimTrace, path: str) -> None:
    """One wide CSV: header row, then one row per recorded step."""
    cols = trace_columns(trace)
    header = ",".join(name for name, _ in cols)
    data = np.column_stack([arr for _, arr in cols])
    np.savetxt(path, data, fmt=_FMT, delimiter=",", header=header, comments="")


def read_trace_csv(path: str) -> dict:
    """Parse a wide trace CSV back into {column: float64 array}."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
    if not header:
        raise ConfigurationError(f"{path}: empty trace file")
    names = header.split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        return {name: np.zeros(0) for name in names}
    if data.shape[1] != len(names):
        raise ConfigurationError(
            f"{path}: {data.shape[1]} columns but {len(names)} header fields")
    return {name: data[:, j].copy() for j, name in enumerate(names)}


def write_events_csv(trace: SimTrace, path: str) -> None:
    """Event log for both channels: scheduled (expected) vs arrival times.

    The output channel is event-triggered (no precomputed schedule), so its
    scheduled time equals the arrival time by definition.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["channel", "index", "scheduled_time", "arrival_time"])
        out = trace.output_events
        for i in range(len(out["t"])):
            tv = _FMT % out["t"][i]
            w.writerow(["output", i, tv, tv])
        aux = trace.aux_events
        for i in range(len(aux["arrival_t"])):
            w.writerow(["aux", i, _FMT % aux["expected_t"][i],
                        _FMT % aux["arrival_t"][i]])


def export_residual_plots_data(trace: SimTrace, outdir: str) -> list:
    """Two-column (t, value) CSVs per residual plus a thresholds file.

    Enough to reproduce the residual figures with any external plotting
    tool.  Returns the list of written paths.
    """
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create {outdir}: {exc}") from exc
    written = []
    series = [("res_z", trace.res_z), ("dis_t", trace.dis_t), ("res_x", trace.res_x)]
    for name, values in series:
        path = os.path.join(outdir, f"{name}.csv")
        data = np.column_stack([trace.t, values]) if len(trace.t) else np.zeros((0, 2))
        np.savetxt(path, data, fmt=_FMT, delimiter=",", header=f"t,{name}", comments="")
        written.append(path)
    thr_path = os.path.join(outdir, "thresholds.csv")
    cfg = trace.config
    with open(thr_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["residual", "threshold"])
        w.writerow(["res_z", _FMT % cfg.gamma_z])
        w.writerow(["dis_t", _FMT % cfg.latency_threshold])
        w.writerow(["res_x", _FMT % cfg.gamma_x])
    written.append(thr_path)
    return written


def write_summary(trace: SimTrace, path: str) -> None:
    """Human-readable run summary: status, alarms, verdict, monitors."""
    cfg = trace.config
    lines = [
        f"label:            {cfg.label or cfg.preset or 'run'}",
        f"status:           {trace.status}",
        f"steps:            {trace.steps_done} (dt = {cfg.dt}, horizon = {cfg.horizon})",
        f"seed:             {cfg.seed} (noise {'on' if cfg.noise_enabled else 'off'},"
        f" std {cfg.noise_std})",
        f"output events:    {len(trace.output_events['t'])}",
        f"aux events:       {len(trace.aux_events['arrival_t'])}",
        f"max res_z:        {trace.max_res_z:.6g} (threshold {cfg.gamma_z})",
        f"max res_x:        {trace.max_res_x:.6g} (threshold {cfg.gamma_x})",
        f"max |dis_t|:      {trace.max_abs_dis_t:.6g} (threshold {cfg.latency_threshold})",
        f"first res_z alarm: {trace.first_res_z_alarm}",
        f"first res_x alarm: {trace.first_res_x_alarm}",
        f"first dis_t alarm: {trace.first_dis_t_alarm}",
        f"alarms latched:   res_x={trace.latched_res_x} res_z={trace.latched_res_z} "
        f"dis_t={trace.latched_dis_t}",
        f"verdict:          {trace.run_verdict.value}",
        f"max state norm:   {trace.max_state_norm:.6g} (cap {cfg.divergence_cap:g})",
        "monitors:",
    ]
    lines += ["  " + l for l in trace.monitors.lines()]
    lines.append(f"monitors all ok:  {trace.monitors.all_ok}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
