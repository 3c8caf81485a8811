"""Runtime monitors: numerical checks of the proved closed-loop properties.

Every monitor is computed from the trace alone (plus its metadata), so a
replayed trace yields exactly the report of the live run. The four theorem
statements map to: ``constraint_residual`` (decoupled, exponentially stable
port dynamics), ``rcm_max`` (port error stays small), ``passivity`` (energy
balance slack) and ``clearance`` (forbidden region untouched).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .trace import column_index


@dataclass
class MonitorReport:
    """Per-criterion results; ``passed`` is the conjunction."""

    criteria: dict
    fault_events: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c["passed"] for c in self.criteria.values()) and not self.fault_events

    def to_json(self):
        return json.dumps(
            {"criteria": self.criteria, "fault_events": self.fault_events,
             "passed": self.passed},
            sort_keys=True,
            indent=2,
        )

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(criteria=doc["criteria"], fault_events=doc["fault_events"])

    def summary_lines(self):
        lines = []
        for name in sorted(self.criteria):
            c = self.criteria[name]
            status = "pass" if c["passed"] else "FAIL"
            value = "n/a" if c["value"] is None else f"{c['value']:.6g}"
            lines.append(
                f"{status:4s}  {name}: value={value} "
                f"threshold={c['threshold']:.6g}"
            )
        if self.fault_events:
            lines.append(f"FAIL  faults: {self.fault_events}")
        return lines


def passivity_slack(energy, input_power, dt):
    """Energy-balance slack series.

    ``slack[k] = E[0] + I[k] - E[k]`` with ``I`` the trapezoid integral of
    the logged input power. Nonnegative slack means the system dissipated at
    least as much as it stored beyond the human's injection.
    """
    energy = np.asarray(energy, dtype=float)
    power = np.asarray(input_power, dtype=float)
    integral = np.zeros_like(energy)
    if energy.size > 1:
        integral[1:] = np.cumsum(0.5 * (power[1:] + power[:-1]) * dt)
    return energy[0] + integral - energy, integral


def passivity_monitor(trace_path):
    """Slack series of a stored trace (see :func:`passivity_slack`)."""
    from .trace import read_trace

    meta, columns, data = read_trace(trace_path)
    energy = data[:, column_index(columns, "energy")]
    power = data[:, column_index(columns, "input_power")]
    slack, _ = passivity_slack(energy, power, float(meta["dt"]))
    return slack


def constraint_residual(xc, xc_dot, alpha, beta, dt):
    """Finite-difference residual of the port dynamics, per tick pair."""
    xc = np.asarray(xc, dtype=float)
    xc_dot = np.asarray(xc_dot, dtype=float)
    if xc.shape[0] < 2:
        return np.zeros(0)
    xc_ddot = (xc_dot[1:] - xc_dot[:-1]) / dt
    res = xc_ddot + 2.0 * alpha * xc_dot[:-1] + beta**2 * xc[:-1]
    return np.linalg.norm(res, axis=1)


def evaluate_trace(meta, columns, data, overrides=None):
    """Compute the :class:`MonitorReport` for one trace."""
    overrides = overrides or {}

    def met(key, default=None):
        if key in overrides and overrides[key] is not None:
            return overrides[key]
        if key in meta:
            return meta[key]
        if default is None:
            raise KeyError(f"trace metadata missing '{key}'")
        return default

    fault_all = data[:, column_index(columns, "fault")]
    fault_events = [
        {"tick": int(k), "t": float(data[k, column_index(columns, "t")])}
        for k in np.flatnonzero(fault_all != 0.0)
    ]
    # Monitors run on the healthy prefix; a fault row fails the run by itself.
    live_rows = data[fault_all == 0.0]
    if live_rows.shape[0] == 0:
        return MonitorReport(criteria={}, fault_events=fault_events)

    def col(name):
        return live_rows[:, column_index(columns, name)]

    dt = float(met("dt"))
    criteria = {}

    rcm_tol = float(met("rcm_tol"))
    xc_norm = col("xc_norm")
    criteria["rcm_max"] = {
        "value": float(xc_norm.max()),
        "threshold": rcm_tol,
        "passed": bool(xc_norm.max() <= rcm_tol),
    }

    clearance_floor = float(met("d_c_eff"))
    min_dist = col("min_distance")
    criteria["clearance"] = {
        "value": float(min_dist.min()),
        "threshold": clearance_floor,
        "passed": bool(min_dist.min() > clearance_floor),
    }

    influence = float(met("influence_radius"))
    V_total = col("V_total")
    boundary_fuzz = 1e-12
    interior = min_dist < influence - boundary_fuzz
    exterior = min_dist > influence + boundary_fuzz
    onset_ok = bool(
        np.all(V_total[interior] > 0.0) and np.all(V_total[exterior] == 0.0)
    )
    active_ticks = np.flatnonzero(V_total > 0.0)
    onset_distance = float(min_dist[active_ticks[0]]) if active_ticks.size else None
    criteria["influence_onset"] = {
        "value": onset_distance,
        "threshold": influence,
        "passed": onset_ok,
    }

    alpha = float(met("alpha"))
    beta = float(met("beta"))
    residual_tol = float(met("residual_tol"))
    res = constraint_residual(
        np.column_stack([col("xc_0"), col("xc_1")]),
        np.column_stack([col("xc_dot_0"), col("xc_dot_1")]),
        alpha, beta, dt,
    )
    res_max = float(res.max()) if res.size else 0.0
    criteria["constraint_residual"] = {
        "value": res_max,
        "threshold": residual_tol,
        "passed": bool(res_max <= residual_tol),
    }

    passivity_tol = float(met("passivity_tol"))
    slack, _ = passivity_slack(col("energy"), col("input_power"), dt)
    criteria["passivity"] = {
        "value": float(slack.min()),
        "threshold": -passivity_tol,
        "passed": bool(slack.min() >= -passivity_tol),
    }

    d_const = np.asarray(met("damping_floor"), dtype=float)
    n_free = d_const.size
    D_cols = np.column_stack([col(f"D_f_{i}") for i in range(n_free)])
    floor_gap = float((D_cols - d_const).min())
    criteria["damping_floor"] = {
        "value": floor_gap,
        "threshold": 0.0,
        "passed": bool(floor_gap >= -1e-12),
    }

    return MonitorReport(criteria=criteria, fault_events=fault_events)
