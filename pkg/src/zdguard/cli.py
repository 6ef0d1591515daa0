"""Command-line front end.

Subcommands:

* ``run <scenario.yaml>`` -- simulate a scenario file;
* ``preset <name>`` -- run one of the built-in case-study bundles
  (case1-s1, case1-s2, case1-s3, case2);
* ``design <plant.yaml>`` -- synthesize the auxiliary system and gains;
* ``verify <bundle.yaml>`` -- Hurwitz + LMI certificates + Zeno bound table.

Exit codes: 0 success; 2 configuration error (unreadable file, schema
violation, invalid constants); 3 divergence-cap truncation (the trace is
still written); 4 runtime monitor violation.

Run outputs land in --out, the ZDGUARD_OUT environment variable, or
``./zdguard_out``: trace.csv (wide per-step), events.csv (scheduled vs
arrival per channel), residuals/ (plot-ready two-column series plus
thresholds), summary.txt.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .design import verify_observer_lmi, verify_boundedness_lmi, zeno_bound
from .engine import run as run_sim
from .errors import ConfigurationError, DesignError, InfeasibleError, NotAZeroError
from .linalg import eigenvalues
from .presets import preset_config, preset_names
from .scenario import OVERRIDE_KEYS, load_bundle_file, load_plant_file, load_scenario
from .traceio import (
    export_residual_plots_data,
    write_events_csv,
    write_summary,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_MONITOR = 4

_DEFAULT_CONSTANTS = dict(sigma=0.1, c1=10.0, c2=0.5, eps=1e-4, delta=20.0, eps2=1e-4)


def _out_dir(args) -> str:
    out = args.out or os.environ.get("ZDGUARD_OUT") or "zdguard_out"
    os.makedirs(out, exist_ok=True)
    return out


def _write_run_outputs(trace, out: str) -> None:
    write_trace_csv(trace, os.path.join(out, "trace.csv"))
    write_events_csv(trace, os.path.join(out, "events.csv"))
    export_residual_plots_data(trace, os.path.join(out, "residuals"))
    write_summary(trace, os.path.join(out, "summary.txt"))


def _finish_run(trace, out: str) -> int:
    _write_run_outputs(trace, out)
    print(f"wrote trace to {out} (status: {trace.status}, "
          f"verdict: {trace.run_verdict.value})")
    if not trace.monitors.all_ok:
        print("monitor violation:", file=sys.stderr)
        for line in trace.monitors.lines():
            print("  " + line, file=sys.stderr)
        return EXIT_MONITOR
    if trace.diverged:
        print("run truncated at the divergence cap "
              f"(t = {trace.steps_done * trace.config.dt:g} s)", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_run(args) -> int:
    config, ignored = load_scenario(
        args.scenario, force=args.force,
        dt=args.dt, horizon=args.horizon, seed=args.seed,
        record_every=args.record_every)
    for key in ignored:
        print(f"ignoring override '{key}' (preset-pinned; use --force)",
              file=sys.stderr)
    return _finish_run(run_sim(config), _out_dir(args))


def _cmd_preset(args) -> int:
    overrides = {"dt": args.dt, "horizon": args.horizon, "seed": args.seed,
                 "record_every": args.record_every}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not args.force:
        for key in sorted(set(overrides) - OVERRIDE_KEYS):
            print(f"ignoring override '{key}' (preset-pinned; use --force)",
                  file=sys.stderr)
            overrides.pop(key)
    config = preset_config(args.name, **overrides)
    return _finish_run(run_sim(config), _out_dir(args))


def _cmd_design(args) -> int:
    from .design import design_gains

    plant = load_plant_file(args.plant)
    bundle = design_gains(plant, lambda0=args.lambda0)
    out = _out_dir(args)
    path = os.path.join(out, "design_report.txt")
    from .design import build_augmented

    A_eta, _, _ = build_augmented(plant, bundle)
    lines = [
        "gain design report",
        f"plant: n={plant.n}, m={plant.m}, p={plant.p}",
        f"lambda0 = {bundle.lambda0}",
        f"A_z = diag({bundle.lambda0}) ({plant.m}x{plant.m}); B_z = C_z = I",
        f"K =\n{np.array2string(bundle.K, precision=6)}",
        f"L =\n{np.array2string(bundle.L, precision=6)}",
        f"L2 =\n{np.array2string(bundle.L2, precision=6)}",
        f"eig(A + BKC)     = {np.round(eigenvalues(plant.A + plant.B @ bundle.K @ plant.C), 6)}",
        f"eig(A_z + L C_z) = {np.round(eigenvalues(bundle.aux.A + bundle.L @ bundle.aux.C), 6)}",
        f"eig(A + L2 C)    = {np.round(eigenvalues(plant.A + bundle.L2 @ plant.C), 6)}",
        f"eig(A_eta)       = {np.round(eigenvalues(A_eta), 6)}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    plant, bundle, constants = load_bundle_file(args.bundle)
    consts = dict(_DEFAULT_CONSTANTS)
    consts.update(constants)
    out = _out_dir(args)
    path = os.path.join(out, "verify_report.txt")
    lines = ["certificate report", ""]

    from .design import build_augmented

    A_eta, _, _ = build_augmented(plant, bundle)
    eigs = eigenvalues(A_eta)
    lines.append(f"eig(A_eta) = {np.round(eigs, 6)}")
    lines.append(f"A_eta Hurwitz: {bool(np.max(np.real(eigs)) < 0)}")
    lines.append("")
    try:
        reports = verify_boundedness_lmi(plant, bundle, **consts)
        for rep in reports.values():
            lines.append(rep.summary())
            lines.append("")
    except InfeasibleError as exc:
        lines.append(f"boundedness LMI: infeasible ({exc})")
        lines.append("")
    try:
        rep3 = verify_observer_lmi(plant, bundle.L2, consts["c2"])
        lines.append(rep3.summary())
    except InfeasibleError as exc:
        lines.append(f"plant-observer LMI: infeasible ({exc})")
    lines.append("")
    lines.append("zeno lower bound vs rate constant M "
                 f"(delta={consts['delta']}, eps2={consts['eps2']}):")
    for M in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
        lines.append(f"  M = {M:8.3g}: gap >= "
                     f"{zeno_bound(bundle.az_norm, consts['delta'], consts['eps2'], M):.6g} s")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zdguard",
        description="Event-triggered CPS simulator with zero-dynamics attack "
                    "detection and isolation")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--out", help="output directory (default: $ZDGUARD_OUT or ./zdguard_out)")
        p.add_argument("--seed", type=int, help="noise seed")
        p.add_argument("--dt", type=float, help="integration step [s]")
        p.add_argument("--horizon", type=float, help="simulation horizon [s]")
        p.add_argument("--record-every", type=int, dest="record_every",
                       help="record every k-th step in the trace CSV")
        p.add_argument("--force", action="store_true",
                       help="allow overriding preset-pinned run parameters")

    p_run = sub.add_parser("run", help="simulate a scenario file")
    p_run.add_argument("scenario", help="YAML scenario file")
    add_run_flags(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_pre = sub.add_parser("preset", help="run a built-in case-study bundle")
    p_pre.add_argument("name", choices=preset_names())
    add_run_flags(p_pre)
    p_pre.set_defaults(fn=_cmd_preset)

    p_des = sub.add_parser("design", help="synthesize auxiliary system and gains")
    p_des.add_argument("plant", help="YAML plant file with matrices A, B, C")
    p_des.add_argument("--lambda0", type=float, default=-1.0,
                       help="auxiliary pole (negative real)")
    p_des.add_argument("--out", help="output directory")
    p_des.set_defaults(fn=_cmd_design)

    p_ver = sub.add_parser("verify", help="LMI + Hurwitz + Zeno certificate report")
    p_ver.add_argument("bundle", help="YAML file with plant, bundle, constants")
    p_ver.add_argument("--out", help="output directory")
    p_ver.set_defaults(fn=_cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, DesignError, NotAZeroError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
