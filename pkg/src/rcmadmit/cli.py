"""Command-line front end: validate configs, run scenarios, replay traces.

Exit codes are a stable contract: 0 all monitors pass, 2 invalid input,
3 fault-stop during a run, 4 monitor failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_scenario
from .errors import ConfigError
from .harness.runner import preflight, replay, run_scenario, scenario_meta
from .harness.telemetry import TelemetryServer
from .harness.trace import column_index

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FAULT = 3
EXIT_MONITOR = 4

PLOT_FILES = {
    "plot_xc.csv": ["t", "xc_norm"],
    "plot_distance.csv": ["t", "min_distance"],
    "plot_wrench.csv": ["t"] + [f"F_h_{i}" for i in range(6)]
    + [f"F_r_{i}" for i in range(6)]
    + ["port_axial_force", "port_torque_x", "port_torque_y", "port_torque_z"],
    "plot_damping.csv": None,  # depends on dof; filled at runtime
    "plot_energy.csv": ["t", "energy", "input_power", "power_integral"],
}


def _monitor_overrides(args):
    return {"rcm_tol": getattr(args, "rcm_tol", None)}


def cmd_check(args):
    """Validate a configuration; report alignment, gains and region stats."""
    try:
        spec = load_scenario(args.config, args.scenario)
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INPUT
    lines = [
        f"chain: {spec.chain.name} ({spec.chain.dof} dof, tool "
        f"L={spec.chain.tool_length} m, r={spec.chain.tool_radius} m)",
        f"port: p_c={np.array2string(spec.p_c, precision=6)} "
        f"(alignment tolerance {spec.align_tol * 1e3:.1f} mm)",
        f"region: {spec.region.size} points, d_c={spec.region.d_c} m, "
        f"d_0={spec.region.d_0} m, clearance floor {spec.d_c_eff} m, "
        f"influence onset {spec.influence_radius} m",
        f"coverage: {_coverage_fraction(spec.region):.3f} of points have a "
        f"neighbour within 2 d_c",
        f"timing: dt={spec.admittance.dt} s "
        f"(f_s={spec.admittance.f_s:.6g} Hz), damping ceiling "
        f"{spec.admittance.damping.max_total():.1f}",
    ]
    problems = []
    if not spec.admittance.damping_stable():
        problems.append(
            "admittance.dt: explicit integration unstable, needs "
            f"dt < {2.0 / spec.admittance.damping.max_total():.4g} s"
        )
    try:
        preflight(spec)
        lines.append("alignment: ok")
        lines.append("initial clearance: ok")
    except ConfigError as exc:
        problems.append(str(exc))
    for line in lines:
        print(line)
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INPUT
    print("config ok")
    return EXIT_OK


def _coverage_fraction(region):
    """Fraction of cloud points whose nearest neighbour is within 2 d_c."""
    points = region.points
    if points.shape[0] < 2:
        return 1.0
    covered = 0
    for i, p in enumerate(points):
        neighbours = region.index.query_point(p, 2.0 * region.d_c)
        if any(j != i for j in neighbours):
            covered += 1
    return covered / points.shape[0]


def _write_plot_files(out_dir, columns, data, n_free):
    plots = dict(PLOT_FILES)
    plots["plot_damping.csv"] = ["t"] + [f"D_f_{i}" for i in range(n_free)]
    for filename, cols in plots.items():
        idx = [column_index(columns, c) for c in cols]
        path = out_dir / filename
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(cols) + "\n")
            for row in data:
                fh.write(",".join(repr(float(row[i])) for i in idx) + "\n")


def cmd_run(args):
    """Run a scenario; write trace, report and plot-ready data files."""
    try:
        overrides = {}
        if args.mode:
            overrides["region"] = {"mode": args.mode}
        if args.seed is not None:
            overrides["scenario"] = {"seed": args.seed}
        if args.decimate is not None:
            overrides.setdefault("telemetry", {})["decimate"] = args.decimate
        spec = load_scenario(args.config, args.scenario, overrides=overrides)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        preflight(spec)
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INPUT

    server = None
    if args.live is not None:
        host, _, port = args.live.rpartition(":")
        host = host or "127.0.0.1"
        server = TelemetryServer(
            host=host,
            port=int(port),
            hello=_hello_payload(spec),
        )
        print(f"telemetry on {server.address[0]}:{server.address[1]}",
              flush=True)

    trace_path = out_dir / "trace.csv"
    try:
        result = run_scenario(
            spec,
            trace_path=trace_path,
            live_server=server,
            monitor_overrides=_monitor_overrides(args),
        )
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_FAULT
    finally:
        if server is not None:
            server.close()

    report_path = out_dir / "report.json"
    report_path.write_text(result.report.to_json() + "\n", encoding="utf-8")
    _write_plot_files(out_dir, result.columns, result.data,
                      spec.chain.dof - 2)
    for line in result.report.summary_lines():
        print(line)
    print(f"trace: {trace_path}")
    print(f"report: {report_path}")
    if result.fault is not None:
        print(f"fault at t={result.fault['t']:.3f}s: {result.fault['message']}",
              file=sys.stderr)
        return EXIT_FAULT
    if not result.report.passed:
        return EXIT_MONITOR
    return EXIT_OK


def _hello_payload(spec):
    payload = {
        "mode": spec.mode,
        "d_c": spec.region.d_c,
        "d_0": spec.region.d_0,
        "d_c_eff": spec.d_c_eff,
        "influence_radius": spec.influence_radius,
        "tool_length": spec.chain.tool_length,
        "tool_radius": spec.chain.tool_radius,
        "p_c": [float(v) for v in spec.p_c],
        "dt": spec.admittance.dt,
        "decimate": spec.decimate,
        "duration": spec.duration,
        "points": [[float(v) for v in p] for p in spec.region.points],
    }
    if spec.region.context_points is not None:
        payload["context_points"] = [
            [float(v) for v in p] for p in spec.region.context_points
        ]
    return payload


def cmd_replay(args):
    """Recompute monitors from a trace file."""
    try:
        report = replay(args.trace, monitor_overrides=_monitor_overrides(args))
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for line in report.summary_lines():
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    if report.fault_events:
        return EXIT_FAULT
    if not report.passed:
        return EXIT_MONITOR
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rcmadmit",
        description="RCM-constrained admittance control simulation harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a configuration")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--scenario", default=None)
    p_check.set_defaults(func=cmd_check)

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--scenario", default=None)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--mode", choices=["tip", "capsule"], default=None)
    p_run.add_argument("--live", nargs="?", const="127.0.0.1:0", default=None,
                       metavar="ADDR", help="serve telemetry at host:port")
    p_run.add_argument("--decimate", type=int, default=None, metavar="N",
                       help="publish every Nth tick")
    p_run.add_argument("--rcm-tol", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="recompute monitors from a trace")
    p_replay.add_argument("trace")
    p_replay.add_argument("--out", default=None)
    p_replay.add_argument("--rcm-tol", type=float, default=None)
    p_replay.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
