"""Target admittance model producing reference joint motion from wrenches.

The reference acceleration is

    q_dd = -S [h; u] + Z^T Z J_t^T (F_th + F_r)

where ``h`` imposes critically-damped second-order dynamics on the port error
and ``u`` applies variable damping on the free coordinates. Because
``Z J_t^T = [Z_x; 0]`` exactly, the force term is evaluated through ``Z_x``,
which keeps the port dynamics force-free to rounding error.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import FaultStopError
from .kinematics import skew


@dataclass(frozen=True)
class DampingParams:
    """Gains of the variable damping diagonal.

    ``d_const`` covers all free coordinates; the velocity-dependent decay
    (``q_gain``, ``m_gain``) and repulsion-dependent rise (``g_gain``,
    ``c_gain``) apply to the first four (axial + angular) only.
    """

    d_const: np.ndarray
    q_gain: np.ndarray
    m_gain: np.ndarray
    g_gain: np.ndarray
    c_gain: np.ndarray

    def __post_init__(self):
        d_const = np.asarray(self.d_const, dtype=float)
        if d_const.ndim != 1 or d_const.size < 4:
            raise ValueError("need constant damping for at least 4 coordinates")
        if not (d_const > 0.0).all():
            raise ValueError("constant damping must be > 0")
        object.__setattr__(self, "d_const", d_const)
        for name in ("q_gain", "m_gain", "g_gain", "c_gain"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (4,)).copy()
            if (arr < 0.0).any():
                raise ValueError(f"{name} must be >= 0")
            object.__setattr__(self, name, arr)

    @property
    def size(self):
        return self.d_const.size

    def max_total(self):
        """Upper bound of any diagonal entry (used by the dt stability check)."""
        ceiling = self.d_const.copy()
        ceiling[:4] += self.q_gain + self.g_gain
        return float(ceiling.max())

    @classmethod
    def table_defaults(cls, n_free=5):
        """Published gain set: axial row, shared angular rows, redundant rows."""
        d_const = np.full(n_free, 60.0)
        d_const[0] = 10.0
        d_const[1:4] = 4.0
        return cls(
            d_const=d_const,
            q_gain=np.array([25.0, 20.0, 20.0, 20.0]),
            m_gain=np.array([22.0, 19.0, 19.0, 19.0]),
            g_gain=np.array([60.0, 30.0, 30.0, 30.0]),
            c_gain=np.array([0.01, 0.2, 0.2, 0.2]),
        )


@dataclass(frozen=True)
class AdmittanceConfig:
    """Gains and integration settings of the target model."""

    alpha: float = 25.0
    beta: float = 25.0
    W: np.ndarray = None
    damping: DampingParams = None
    dt: float = 0.004
    f_s: float = 250.0
    integrator: str = "explicit"
    force_cap: float = 200.0
    torque_cap: float = 50.0

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("alpha and beta must be > 0")
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if abs(self.dt * self.f_s - 1.0) > 1e-9:
            raise ValueError("dt must equal 1 / f_s")
        if self.integrator not in ("explicit", "semi_implicit"):
            raise ValueError("integrator must be 'explicit' or 'semi_implicit'")
        if self.W is not None:
            W = np.asarray(self.W, dtype=float)
            if W.ndim != 2 or W.shape[0] != W.shape[1]:
                raise ValueError("W must be square")
            if not np.allclose(W, W.T, atol=1e-12):
                raise ValueError("W must be symmetric")
            if np.linalg.eigvalsh(W).min() <= 0.0:
                raise ValueError("W must be positive definite")
            object.__setattr__(self, "W", W)

    def damping_stable(self):
        """Explicit-scheme damping bound: dt < 2 / max(D_f)."""
        if self.damping is None:
            return True
        return self.dt < 2.0 / self.damping.max_total()

    @classmethod
    def table_defaults(cls, n=7, dt=0.004):
        """Published parameter set: W = 1.5 I, alpha = beta = 25."""
        return cls(
            alpha=25.0,
            beta=25.0,
            W=1.5 * np.eye(n),
            damping=DampingParams.table_defaults(n - 2),
            dt=dt,
            f_s=1.0 / dt,
        )


@dataclass(frozen=True)
class WrenchSample:
    """Timestamped human wrench at the end-effector, base-frame components."""

    t: float
    F_h: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F_h, dtype=float)
        if F.shape != (6,) or not np.isfinite(F).all():
            raise ValueError("wrench must be a finite 6-vector")
        object.__setattr__(self, "F_h", F)


@dataclass(frozen=True)
class AdmittanceState:
    """Reference joint state plus previous-tick matrices for the derivatives."""

    q_d: np.ndarray
    q_d_dot: np.ndarray
    t: float = 0.0
    prev_A: np.ndarray = None
    prev_Zdagger_T: np.ndarray = None

    @classmethod
    def initial(cls, q0):
        q0 = np.asarray(q0, dtype=float)
        return cls(q_d=q0.copy(), q_d_dot=np.zeros_like(q0))


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-tick values logged by the harness."""

    x_c: np.ndarray
    x_c_dot: np.ndarray
    x_f_dot: np.ndarray
    q_dd: np.ndarray
    D_f: np.ndarray
    h: np.ndarray
    u: np.ndarray
    filtered_force: np.ndarray
    input_power: float


def clamp_wrench(F_h, force_cap, torque_cap):
    """Scale force/torque parts down to their magnitude caps."""
    F = np.asarray(F_h, dtype=float).copy()
    f_norm = np.linalg.norm(F[:3])
    if f_norm > force_cap:
        F[:3] *= force_cap / f_norm
    t_norm = np.linalg.norm(F[3:])
    if t_norm > torque_cap:
        F[3:] *= torque_cap / t_norm
    return F


def transform_human_wrench(F_h, pose):
    """Move the end-effector wrench to the tool tip: ``F_th = T_te F_h``."""
    F_h = np.asarray(F_h, dtype=float)
    F_th = F_h.copy()
    F_th[3:] += skew(pose.p_e - pose.p_t) @ F_h[:3]
    return F_th


def variable_damping(x_f_dot, F_r, Z_x, params):
    """Diagonal of ``D_f`` for the current free velocity and repulsion.

    The first four entries get a velocity term ``Q exp(-M s)`` (high damping
    at rest, low at speed) and a repulsion term ``G (1 - exp(-C z^2))`` that
    stiffens the response inside the influence shell. ``s`` and ``z`` couple
    the three angular coordinates so they respond together.
    """
    x_f_dot = np.asarray(x_f_dot, dtype=float)
    D = params.d_const.copy()
    if D.size != x_f_dot.size:
        raise ValueError("damping size does not match free coordinates")
    F_rx = Z_x @ np.asarray(F_r, dtype=float)
    s = np.empty(4)
    s[0] = abs(x_f_dot[0])
    s[1:] = np.linalg.norm(x_f_dot[1:4])
    z = np.empty(4)
    z[0] = abs(F_rx[0])
    z[1:] = np.linalg.norm(F_rx[1:4])
    D[:4] += params.q_gain * np.exp(-params.m_gain * s)
    D[:4] += params.g_gain * (1.0 - np.exp(-params.c_gain * z**2))
    return D


def admittance_step(state, frame, F_th, F_r, config):
    """Advance the reference state by one control period.

    Returns ``(next_state, diagnostics)``. ``frame`` must be built at the
    current ``q_d``. Matrix time derivatives use backward differences of the
    previous tick (zero on the first tick).
    """
    dt = config.dt
    q_dot = state.q_d_dot
    n = q_dot.size

    x_c = frame.x_c
    x_c_dot = frame.A @ q_dot
    Zdag_T = frame.Z_dagger.T
    x_f_dot = Zdag_T @ q_dot

    if state.prev_A is None:
        A_dot_qdot = np.zeros(2)
    else:
        A_dot_qdot = ((frame.A - state.prev_A) / dt) @ q_dot
    if state.prev_Zdagger_T is None:
        Zdag_T_dot_qdot = np.zeros(n - 2)
    else:
        Zdag_T_dot_qdot = ((Zdag_T - state.prev_Zdagger_T) / dt) @ q_dot

    D_f = variable_damping(x_f_dot, F_r, frame.Z_x, config.damping)

    h = A_dot_qdot + 2.0 * config.alpha * x_c_dot + config.beta**2 * x_c
    u = D_f * x_f_dot + Zdag_T_dot_qdot

    # Z J_t^T = [Z_x; 0]: the generalized forces act on the free coordinates.
    filtered = np.zeros(n - 2)
    filtered[:4] = frame.Z_x @ (np.asarray(F_th, dtype=float) + np.asarray(F_r, dtype=float))
    q_dd = -(frame.A_dagger @ h + frame.Z.T @ u) + frame.Z.T @ filtered

    if not np.isfinite(q_dd).all():
        raise FaultStopError("non-finite reference acceleration")

    if config.integrator == "semi_implicit":
        q_d_dot = q_dot + q_dd * dt
        q_d = state.q_d + q_d_dot * dt
    else:
        q_d = state.q_d + q_dot * dt
        q_d_dot = q_dot + q_dd * dt

    power_force = np.zeros(n - 2)
    power_force[:4] = frame.Z_x @ np.asarray(F_th, dtype=float)
    diagnostics = StepDiagnostics(
        x_c=x_c,
        x_c_dot=x_c_dot,
        x_f_dot=x_f_dot,
        q_dd=q_dd,
        D_f=D_f,
        h=h,
        u=u,
        filtered_force=filtered,
        input_power=float(x_f_dot @ power_force),
    )
    next_state = replace(
        state,
        q_d=q_d,
        q_d_dot=q_d_dot,
        t=state.t + dt,
        prev_A=frame.A.copy(),
        prev_Zdagger_T=Zdag_T.copy(),
    )
    return next_state, diagnostics
