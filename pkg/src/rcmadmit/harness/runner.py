"""Deterministic closed-loop scenario runner at the fixed control rate.

The loop assumes the robot tracks the reference perfectly (``q = q_d``); an
optional first-order tracking lag reproduces the softer behaviour of a real
position-controlled arm for study, without affecting the reference-side
monitors. Batch runs execute as fast as possible; live runs pace to the wall
clock and accept wrench/pause/resume/reset commands over telemetry.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from ..admittance import AdmittanceState, admittance_step, clamp_wrench, transform_human_wrench
from ..constraint import alignment_error, rcm_error, rcm_frame
from ..errors import (
    AlignmentError,
    ConfigError,
    ConstraintViolationError,
    FaultStopError,
    SingularityError,
)
from ..kinematics import forward_kinematics, geometric_jacobian, redundancy_null_base, skew
from ..potential import capsule_repulsion, region_min_distance, tip_repulsion
from .monitors import evaluate_trace
from .profiles import ForceProfile
from .trace import TraceWriter, trace_columns

# Half-life of a live wrench command once the operator stops sending (s).
LIVE_WRENCH_HALF_LIFE = 0.1


@dataclass
class RunResult:
    meta: dict
    columns: list
    data: np.ndarray
    report: object
    fault: dict = None
    trace_path: object = None


@dataclass
class _LiveState:
    server: object
    paused: bool = False
    wrench: np.ndarray = field(default_factory=lambda: np.zeros(6))
    reset_requested: bool = False


def scenario_meta(spec):
    """Trace metadata: everything replay needs to recompute the monitors."""
    return {
        "scenario": spec.name,
        "mode": spec.mode,
        "dt": spec.admittance.dt,
        "alpha": spec.admittance.alpha,
        "beta": spec.admittance.beta,
        "d_c": spec.region.d_c,
        "d_0": spec.region.d_0,
        "tool_radius": spec.chain.tool_radius,
        "tool_length": spec.chain.tool_length,
        "d_c_eff": spec.d_c_eff,
        "influence_radius": spec.influence_radius,
        "rcm_tol": spec.rcm_tol,
        "passivity_tol": spec.passivity_tol,
        "residual_tol": spec.residual_tol,
        "damping_floor": [float(v) for v in spec.admittance.damping.d_const],
        "seed": spec.seed,
        "duration": spec.duration,
    }


def offset_initial_configuration(spec):
    """Start configuration, with the requested port error imposed exactly.

    Newton iteration through the weighted pseudoinverse; used by the
    convergence scenario to start from a known ``x_c(0)``.
    """
    q = spec.q0.copy()
    target = spec.initial_rcm_offset
    if not np.any(target):
        return q
    for _ in range(12):
        pose = forward_kinematics(spec.chain, q)
        J = geometric_jacobian(spec.chain, q)
        G = redundancy_null_base(spec.chain, J)
        frame = rcm_frame(pose, J, G, spec.p_c, spec.admittance.W)
        err = target - frame.x_c
        if np.linalg.norm(err) < 1e-14:
            break
        q = q + frame.A_dagger @ err
    return q


def _repulsion(spec, pose, clamp=False):
    if spec.mode == "capsule":
        return capsule_repulsion(pose, spec.chain.tool_length,
                                 spec.chain.tool_radius, spec.region, clamp=clamp)
    return tip_repulsion(pose.p_t, spec.region, clamp=clamp)


def _port_wrench(pose, p_c, F_r):
    """Repulsion transported to the entry port: (axial force, torque)."""
    f = F_r[:3]
    tau = skew(pose.p_t - p_c) @ f + F_r[3:]
    return float(pose.n_t @ f), tau


def preflight(spec):
    """Alignment and initial-clearance gate; returns the start pose."""
    pose = forward_kinematics(spec.chain, spec.q0)
    err = alignment_error(pose, spec.p_c)
    if err > spec.align_tol:
        raise AlignmentError(
            f"tool axis misses the port by {err * 1e3:.3f} mm "
            f"(tolerance {spec.align_tol * 1e3:.3f} mm)",
            field="rcm.p_c",
        )
    start_clearance = region_min_distance(
        spec.region, pose, spec.mode, spec.chain.tool_length, spec.chain.tool_radius
    )
    if start_clearance <= spec.d_c_eff:
        raise ConfigError(
            f"initial pose touches the forbidden region "
            f"(distance {start_clearance:.4g} m <= {spec.d_c_eff:.4g} m)",
            field="scenario.q0_deg",
        )
    return pose


def run_scenario(spec, trace_path=None, live_server=None, monitor_overrides=None):
    """Execute the scenario; returns a :class:`RunResult`.

    ``live_server`` switches to wall-clock pacing with telemetry publishing
    and command handling. The run is deterministic in batch mode: identical
    inputs produce byte-identical traces.
    """
    preflight(spec)
    q_start = offset_initial_configuration(spec)

    profile = ForceProfile.load(spec.profile_path) if spec.profile_path else ForceProfile.zero()
    n = spec.chain.dof
    dt = spec.admittance.dt
    n_ticks = int(round(spec.duration / dt))
    columns = trace_columns(n)
    meta = scenario_meta(spec)

    live = _LiveState(server=live_server) if live_server is not None else None
    decay = 0.5 ** (dt / LIVE_WRENCH_HALF_LIFE)

    state = AdmittanceState.initial(q_start)
    q_robot = q_start.copy()
    G_prev = None
    rows = []
    fault = None
    power_integral = 0.0
    prev_power = 0.0
    energy0 = None

    writer = TraceWriter(trace_path, meta, n) if trace_path is not None else None
    next_tick_wall = time.monotonic()
    try:
        k = 0
        while k < n_ticks:
            if live is not None:
                next_tick_wall = _live_tick(live, next_tick_wall, dt)
                if live.reset_requested:
                    state = AdmittanceState.initial(q_start)
                    q_robot = q_start.copy()
                    G_prev = None
                    rows = []
                    fault = None
                    power_integral = 0.0
                    prev_power = 0.0
                    energy0 = None
                    live.reset_requested = False
                    live.wrench = np.zeros(6)
                    k = 0
                    if writer is not None:
                        writer.close()
                        writer = TraceWriter(trace_path, meta, n)

            t = k * dt
            try:
                pose = forward_kinematics(spec.chain, state.q_d)
                J = geometric_jacobian(spec.chain, state.q_d)
                G = redundancy_null_base(spec.chain, J, align_with=G_prev)
                G_prev = G
                frame = rcm_frame(pose, J, G, spec.p_c, spec.admittance.W)

                if live is not None:
                    F_h = live.wrench.copy()
                    live.wrench = live.wrench * decay
                else:
                    F_h = profile.sample(t)
                F_h = clamp_wrench(F_h, spec.admittance.force_cap,
                                   spec.admittance.torque_cap)
                F_th = transform_human_wrench(F_h, pose)
                rep = _repulsion(spec, pose)

                next_state, diag = admittance_step(state, frame, F_th, rep.F_r,
                                                   spec.admittance)
            except (SingularityError, ConstraintViolationError, FaultStopError) as exc:
                fault = {"tick": k, "t": t, "error": type(exc).__name__,
                         "message": str(exc)}
                row = _fault_row(columns, t, state, n)
                rows.append(row)
                if writer is not None:
                    writer.write_row(row)
                break

            energy = 0.5 * float(diag.x_f_dot @ diag.x_f_dot) + rep.V_total
            if energy0 is None:
                energy0 = energy
            if k > 0:
                power_integral += 0.5 * (prev_power + diag.input_power) * dt
            prev_power = diag.input_power

            if spec.tracking_lag_tau > 0.0:
                q_robot = q_robot + (dt / spec.tracking_lag_tau) * (state.q_d - q_robot)
            else:
                q_robot = state.q_d
            robot_pose = (
                pose if spec.tracking_lag_tau == 0.0
                else forward_kinematics(spec.chain, q_robot)
            )
            xc_robot = np.linalg.norm(rcm_error(robot_pose, spec.p_c))
            dist_robot = (
                rep.min_distance if spec.tracking_lag_tau == 0.0
                else region_min_distance(spec.region, robot_pose, spec.mode,
                                         spec.chain.tool_length,
                                         spec.chain.tool_radius)
            )

            axial_force, port_torque = _port_wrench(pose, spec.p_c, rep.F_r)
            row = [
                t, *state.q_d,
                frame.x_c[0], frame.x_c[1], float(np.linalg.norm(frame.x_c)),
                diag.x_c_dot[0], diag.x_c_dot[1],
                *diag.x_f_dot,
                *pose.p_t, rep.min_distance,
                *F_h, *F_th, *rep.F_r,
                axial_force, *port_torque,
                *diag.D_f,
                rep.V_total, energy, diag.input_power, power_integral,
                xc_robot, dist_robot, 0.0,
            ]
            rows.append(row)
            if writer is not None:
                writer.write_row(row)

            if live is not None and k % spec.decimate == 0:
                live.server.publish_state(_snapshot(spec, t, pose, frame, rep,
                                                    F_h, diag, energy))
            state = next_state
            k += 1
    finally:
        if writer is not None:
            writer.close()

    data = np.asarray(rows)
    report = evaluate_trace(meta, columns, data, overrides=monitor_overrides)
    if live is not None:
        live.server.publish_report(_report_payload(report))
    return RunResult(meta=meta, columns=columns, data=data, report=report,
                     fault=fault, trace_path=trace_path)


def _fault_row(columns, t, state, n):
    """All-zero row marking the fault tick (reference frozen from here on)."""
    row = [0.0] * len(columns)
    row[0] = t
    row[1:1 + n] = list(state.q_d)
    row[-1] = 1.0
    return row


def _live_tick(live, next_tick_wall, dt):
    """Wall-clock pacing plus command handling; returns next deadline."""
    while True:
        for cmd in live.server.poll_commands():
            kind = cmd.get("type")
            if kind == "wrench":
                force = np.asarray(cmd.get("force", [0.0] * 3), dtype=float)
                torque = np.asarray(cmd.get("torque", [0.0] * 3), dtype=float)
                if force.shape == (3,) and torque.shape == (3,) and \
                        np.isfinite(force).all() and np.isfinite(torque).all():
                    live.wrench = np.concatenate([force, torque])
            elif kind == "pause":
                live.paused = True
            elif kind == "resume":
                live.paused = False
            elif kind == "reset":
                live.reset_requested = True
                live.paused = False
        if not live.paused:
            break
        time.sleep(0.02)
        next_tick_wall = time.monotonic()
    now = time.monotonic()
    if next_tick_wall > now:
        time.sleep(next_tick_wall - now)
    else:
        next_tick_wall = now
    return next_tick_wall + dt


def _snapshot(spec, t, pose, frame, rep, F_h, diag, energy):
    return {
        "t": t,
        "p_t": [float(v) for v in pose.p_t],
        "tool_base": [float(v) for v in pose.tool_base(spec.chain.tool_length)],
        "p_e": [float(v) for v in pose.p_e],
        "p_c": [float(v) for v in spec.p_c],
        "xc_norm": float(np.linalg.norm(frame.x_c)),
        "min_distance": float(rep.min_distance),
        "active_count": int(rep.active_count),
        "F_h": [float(v) for v in F_h],
        "F_r": [float(v) for v in rep.F_r],
        "D_f": [float(v) for v in diag.D_f],
        "energy": float(energy),
        "input_power": float(diag.input_power),
    }


def _report_payload(report):
    return {"criteria": report.criteria, "fault_events": report.fault_events,
            "passed": report.passed}


def replay(trace_path, monitor_overrides=None):
    """Recompute the monitor report from a trace file alone."""
    from .trace import read_trace

    meta, columns, data = read_trace(trace_path)
    return evaluate_trace(meta, columns, data, overrides=monitor_overrides)
