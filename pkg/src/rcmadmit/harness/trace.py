"""Trace files: one row per control tick, exact-round-trip text format.

Layout: ``# key=value`` metadata lines, one header line naming every column,
then comma-separated rows. Floats are written with ``repr`` so parsing
returns bit-identical values and a replay reproduces the live report.
"""

import json

import numpy as np

from ..errors import ConfigError


def trace_columns(n):
    """Fixed column order for an n-dof chain."""
    cols = ["t"]
    cols += [f"q_d_{i}" for i in range(n)]
    cols += ["xc_0", "xc_1", "xc_norm", "xc_dot_0", "xc_dot_1"]
    cols += [f"xf_dot_{i}" for i in range(n - 2)]
    cols += ["p_t_x", "p_t_y", "p_t_z", "min_distance"]
    cols += [f"F_h_{i}" for i in range(6)]
    cols += [f"F_th_{i}" for i in range(6)]
    cols += [f"F_r_{i}" for i in range(6)]
    cols += ["port_axial_force", "port_torque_x", "port_torque_y", "port_torque_z"]
    cols += [f"D_f_{i}" for i in range(n - 2)]
    cols += ["V_total", "energy", "input_power", "power_integral"]
    cols += ["xc_norm_robot", "min_distance_robot", "fault"]
    return cols


class TraceWriter:
    """Streams rows to a trace file."""

    def __init__(self, path, meta, n):
        self.path = path
        self.columns = trace_columns(n)
        self._fh = open(path, "w", encoding="utf-8")
        for key in sorted(meta):
            self._fh.write(f"# {key}={json.dumps(meta[key])}\n")
        self._fh.write(",".join(self.columns) + "\n")

    def write_row(self, values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} values, expected {len(self.columns)}"
            )
        self._fh.write(",".join(repr(float(v)) for v in values) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trace(path):
    """Parse a trace file into ``(meta, columns, data)``.

    Raises :class:`ConfigError` with the offending line number on malformed
    input (wrong column count, bad number, missing header).
    """
    meta = {}
    columns = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if columns is not None:
                    raise ConfigError("metadata after header", line=lineno)
                body = line[1:].strip()
                if "=" not in body:
                    raise ConfigError("expected '# key=value'", line=lineno)
                key, value = body.split("=", 1)
                try:
                    meta[key.strip()] = json.loads(value)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"bad metadata value: {exc}", line=lineno) from exc
                continue
            if columns is None:
                columns = line.split(",")
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise ConfigError(
                    f"expected {len(columns)} columns, found {len(parts)}",
                    line=lineno,
                )
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise ConfigError(f"bad number: {exc}", line=lineno) from exc
    if columns is None:
        raise ConfigError(f"trace {path} has no header line")
    if not rows:
        raise ConfigError(f"trace {path} has no data rows")
    return meta, columns, np.asarray(rows)


def column_index(columns, name):
    try:
        return columns.index(name)
    except ValueError as exc:
        raise ConfigError(f"trace is missing column '{name}'") from exc
