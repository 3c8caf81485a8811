"""Deterministic scenario runner, trace IO, monitors and live telemetry."""

from .monitors import (
    MonitorReport,
    constraint_residual,
    evaluate_trace,
    passivity_monitor,
    passivity_slack,
)
from .profiles import ForceProfile, guidance_profile, press_profile
from .runner import RunResult, preflight, replay, run_scenario, scenario_meta
from .telemetry import MessageReader, TelemetryServer, connect, encode_message
from .trace import TraceWriter, read_trace, trace_columns
