"""Configuration file loading and validation.

One YAML document describes everything a run needs: the chain, the entry
port, admittance gains, the forbidden region and the scenario. ``--scenario``
may point at a second document whose sections override the first. See
``configs/default.yaml`` for the documented schema.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .admittance import AdmittanceConfig, DampingParams
from .errors import ConfigError
from .kinematics import (
    DEFAULT_TOOL_LENGTH,
    DEFAULT_TOOL_RADIUS,
    Joint,
    KinematicChain,
    axis_rotation,
    default_chain,
    forward_kinematics,
    homogeneous,
    port_on_tool_axis,
)
from .potential import ForbiddenRegion, covering_radius, load_point_cloud

DEFAULT_ALIGN_TOL = 0.002
DEFAULT_RCM_TOL = 1e-5
DEFAULT_PASSIVITY_TOL = 1e-3
DEFAULT_RESIDUAL_TOL = 1e-3


@dataclass
class ScenarioSpec:
    """Everything a deterministic run needs, fully built."""

    chain: KinematicChain
    p_c: np.ndarray
    region: ForbiddenRegion
    mode: str
    profile_path: Path = None
    duration: float = 10.0
    admittance: AdmittanceConfig = None
    q0: np.ndarray = None
    initial_rcm_offset: np.ndarray = None
    seed: int = 0
    tracking_lag_tau: float = 0.0
    align_tol: float = DEFAULT_ALIGN_TOL
    rcm_tol: float = DEFAULT_RCM_TOL
    passivity_tol: float = DEFAULT_PASSIVITY_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    decimate: int = 4
    name: str = "scenario"

    @property
    def d_c_eff(self):
        """Clearance floor: covering radius, widened by r in capsule mode."""
        if self.mode == "capsule":
            return self.region.d_c + self.chain.tool_radius
        return self.region.d_c

    @property
    def influence_radius(self):
        return self.d_c_eff + self.region.d_0


def _require(mapping, key, section):
    if key not in mapping:
        raise ConfigError(f"missing required key", field=f"{section}.{key}")
    return mapping[key]


def _vector(value, length, fieldname):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (length,) or not np.isfinite(arr).all():
        raise ConfigError(f"expected {length} finite numbers", field=fieldname)
    return arr


def _transform_entry(entry, fieldname):
    translation = _vector(entry.get("translation", [0.0, 0.0, 0.0]), 3,
                          f"{fieldname}.translation")
    rpy = _vector(entry.get("rotation_rpy_deg", [0.0, 0.0, 0.0]), 3,
                  f"{fieldname}.rotation_rpy_deg")
    r, p, y = np.deg2rad(rpy)
    R = (
        axis_rotation(np.array([0.0, 0.0, 1.0]), y)
        @ axis_rotation(np.array([0.0, 1.0, 0.0]), p)
        @ axis_rotation(np.array([1.0, 0.0, 0.0]), r)
    )
    return homogeneous(R, translation)


def build_chain(section):
    """Chain from the ``chain:`` section (built-in name or explicit joints)."""
    section = section or {}
    tool_length = float(section.get("tool_length", DEFAULT_TOOL_LENGTH))
    tool_radius = float(section.get("tool_radius", DEFAULT_TOOL_RADIUS))
    if "joints" not in section:
        name = section.get("name", "lwr4plus")
        if name != "lwr4plus":
            raise ConfigError(f"unknown built-in chain '{name}'", field="chain.name")
        return default_chain(tool_length=tool_length, tool_radius=tool_radius)
    joints = []
    for i, entry in enumerate(section["joints"]):
        fieldname = f"chain.joints[{i}]"
        axis = _vector(_require(entry, "axis", fieldname), 3, f"{fieldname}.axis")
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise ConfigError("axis must be nonzero", field=f"{fieldname}.axis")
        limits = entry.get("limits_deg", [-170.0, 170.0])
        if len(limits) != 2 or not limits[0] < limits[1]:
            raise ConfigError("limits_deg must be [lower, upper]",
                              field=f"{fieldname}.limits_deg")
        try:
            joints.append(
                Joint(
                    axis=axis / norm,
                    transform=_transform_entry(entry, fieldname),
                    limits=(math.radians(limits[0]), math.radians(limits[1])),
                )
            )
        except ValueError as exc:
            raise ConfigError(str(exc), field=fieldname) from exc
    try:
        return KinematicChain(
            joints=tuple(joints),
            ee_offset=_transform_entry(section.get("ee_offset", {}), "chain.ee_offset"),
            tool_offset=_transform_entry(section.get("tool_offset", {}), "chain.tool_offset"),
            tool_length=tool_length,
            tool_radius=tool_radius,
            name=section.get("name", "custom"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), field="chain") from exc


def build_damping(section, n_free):
    section = section or {}
    axial = section.get("axial", {})
    angular = section.get("angular", {})
    redundant = section.get("redundant", {})
    defaults = DampingParams.table_defaults(n_free)
    d_const = defaults.d_const.copy()
    d_const[0] = float(axial.get("d_const", d_const[0]))
    d_const[1:4] = float(angular.get("d_const", d_const[1]))
    if n_free > 4:
        d_const[4:] = float(redundant.get("d_const", d_const[4] if n_free > 4 else 60.0))
    q_gain = np.array([axial.get("q", defaults.q_gain[0])]
                      + [angular.get("q", defaults.q_gain[1])] * 3, dtype=float)
    m_gain = np.array([axial.get("m", defaults.m_gain[0])]
                      + [angular.get("m", defaults.m_gain[1])] * 3, dtype=float)
    g_gain = np.array([axial.get("g", defaults.g_gain[0])]
                      + [angular.get("g", defaults.g_gain[1])] * 3, dtype=float)
    c_gain = np.array([axial.get("c", defaults.c_gain[0])]
                      + [angular.get("c", defaults.c_gain[1])] * 3, dtype=float)
    try:
        return DampingParams(d_const=d_const, q_gain=q_gain, m_gain=m_gain,
                             g_gain=g_gain, c_gain=c_gain)
    except ValueError as exc:
        raise ConfigError(str(exc), field="damping") from exc


def build_admittance(section, n):
    section = section or {}
    alpha = float(section.get("alpha", 25.0))
    beta = float(section.get("beta", 25.0))
    dt = float(section.get("dt", 0.004))
    weight = section.get("weight", 1.5)
    if np.isscalar(weight):
        W = float(weight) * np.eye(n)
    else:
        W = np.diag(_vector(weight, n, "admittance.weight"))
    damping = build_damping(section.get("damping"), n - 2)
    try:
        return AdmittanceConfig(
            alpha=alpha,
            beta=beta,
            W=W,
            damping=damping,
            dt=dt,
            f_s=1.0 / dt,
            integrator=section.get("integrator", "explicit"),
            force_cap=float(section.get("force_cap", 200.0)),
            torque_cap=float(section.get("torque_cap", 50.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), field="admittance") from exc


def build_region(section, base_dir):
    section = section or {}
    d_0 = float(_require(section, "d_0", "region"))
    gain = float(section.get("gain", 0.01))
    d_c = section.get("d_c")
    density = section.get("density")
    if "source" in section:
        source = Path(section["source"])
        if not source.is_absolute():
            source = base_dir / source
        if not source.exists():
            raise ConfigError(f"cloud file not found: {source}", field="region.source")
        voxel = section.get("voxel_size")
        return load_point_cloud(
            source,
            voxel_size=float(voxel) if voxel else None,
            d_0=d_0,
            gain=gain,
            d_c=float(d_c) if d_c is not None else None,
            density=float(density) if density is not None else None,
        )
    if "points" in section:
        points = np.asarray(section["points"], dtype=float)
        if d_c is None and density is not None:
            d_c = covering_radius(float(density))
        if d_c is None:
            raise ConfigError("give d_c or density", field="region")
        return ForbiddenRegion(points=points, gains=gain, d_c=float(d_c),
                               d_0=d_0, rho=density)
    raise ConfigError("region needs 'source' or inline 'points'", field="region")


def _merge(base, override):
    """Recursive dict merge; override wins, sections merge key-by-key."""
    out = dict(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_yaml(path):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        line = None
        if hasattr(exc, "problem_mark") and exc.problem_mark is not None:
            line = exc.problem_mark.line + 1
        raise ConfigError(f"invalid YAML: {exc}", line=line) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    _absolutize_paths(doc, path.parent)
    return doc


def _absolutize_paths(doc, base_dir):
    """Resolve file references against the document that provided them."""
    region = doc.get("region")
    if isinstance(region, dict) and isinstance(region.get("source"), str):
        source = Path(region["source"])
        if not source.is_absolute():
            region["source"] = str(base_dir / source)
    scen = doc.get("scenario")
    if isinstance(scen, dict) and isinstance(scen.get("profile"), str):
        profile = Path(scen["profile"])
        if not profile.is_absolute():
            scen["profile"] = str(base_dir / profile)


def load_scenario(config_path, scenario_path=None, overrides=None):
    """Build a :class:`ScenarioSpec` from one or two YAML documents."""
    config_path = Path(config_path)
    doc = load_yaml(config_path)
    base_dir = config_path.parent
    if scenario_path is not None:
        doc = _merge(doc, load_yaml(Path(scenario_path)))
    doc = _merge(doc, overrides or {})

    chain = build_chain(doc.get("chain"))
    n = chain.dof
    admittance = build_admittance(doc.get("admittance"), n)

    scen = doc.get("scenario") or {}
    if "q0_deg" in scen:
        q0 = np.deg2rad(_vector(scen["q0_deg"], n, "scenario.q0_deg"))
    elif "q0" in scen:
        q0 = _vector(scen["q0"], n, "scenario.q0")
    else:
        raise ConfigError("missing initial configuration", field="scenario.q0_deg")
    if not chain.within_limits(q0):
        raise ConfigError("initial configuration violates joint limits",
                          field="scenario.q0_deg")

    rcm = doc.get("rcm") or {}
    p_c_entry = rcm.get("p_c", "auto")
    if isinstance(p_c_entry, str):
        if p_c_entry != "auto":
            raise ConfigError("p_c must be [x, y, z] or 'auto'", field="rcm.p_c")
        pose0 = forward_kinematics(chain, q0)
        p_c = port_on_tool_axis(pose0, z=float(rcm.get("auto_z", 0.0)))
    else:
        p_c = _vector(p_c_entry, 3, "rcm.p_c")

    region = build_region(doc.get("region"), base_dir)
    mode = (doc.get("region") or {}).get("mode", "tip")
    if mode not in ("tip", "capsule"):
        raise ConfigError("mode must be 'tip' or 'capsule'", field="region.mode")

    profile_path = scen.get("profile")
    if profile_path is not None:
        profile_path = Path(profile_path)
        if not profile_path.is_absolute():
            profile_path = base_dir / profile_path
        if not profile_path.exists():
            raise ConfigError(f"profile file not found: {profile_path}",
                              field="scenario.profile")

    duration = float(scen.get("duration", 10.0))
    if not duration > 0.0:
        raise ConfigError("duration must be > 0", field="scenario.duration")

    telemetry = doc.get("telemetry") or {}
    decimate = int(telemetry.get("decimate", 4))
    if decimate < 1:
        raise ConfigError("decimate must be >= 1", field="telemetry.decimate")

    return ScenarioSpec(
        chain=chain,
        p_c=p_c,
        region=region,
        mode=mode,
        profile_path=profile_path,
        duration=duration,
        admittance=admittance,
        q0=q0,
        initial_rcm_offset=_vector(scen.get("initial_rcm_offset", [0.0, 0.0]), 2,
                                   "scenario.initial_rcm_offset"),
        seed=int(scen.get("seed", 0)),
        tracking_lag_tau=float(scen.get("tracking_lag_tau", 0.0)),
        align_tol=float(rcm.get("alignment_tolerance", DEFAULT_ALIGN_TOL)),
        rcm_tol=float(scen.get("rcm_tol", DEFAULT_RCM_TOL)),
        passivity_tol=float(scen.get("passivity_tol", DEFAULT_PASSIVITY_TOL)),
        residual_tol=float(scen.get("residual_tol", DEFAULT_RESIDUAL_TOL)),
        decimate=decimate,
        name=str(scen.get("name", config_path.stem)),
    )
