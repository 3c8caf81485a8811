"""Serial-chain kinematics: tool pose, geometric Jacobian, redundancy null base.

The robot is a chain of revolute joints. Each joint carries a fixed transform
from its parent frame and rotates about a unit axis expressed in its own
frame. A fixed ``ee_offset`` after the last joint locates the end-effector
(where the human wrench is measured) and ``tool_offset`` locates the tool tip
frame ``R_t = [a_t o_t n_t]``, with ``n_t`` the tool axis pointing from the
mount toward the tip.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError

# Smallest singular value of J_t below which the constraint maps are refused.
SINGULARITY_TOL = 1e-6


def skew(v):
    """Skew-symmetric matrix such that skew(v) @ u == cross(v, u)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def axis_rotation(axis, angle):
    """Rotation matrix about a unit axis (Rodrigues form)."""
    k = skew(axis)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def homogeneous(rotation, translation):
    T = np.eye(4)
    T[:3, :3] = rotation
    T[:3, 3] = translation
    return T


@dataclass(frozen=True)
class Joint:
    """One revolute joint: fixed parent transform, rotation axis, limits."""

    axis: np.ndarray
    transform: np.ndarray
    limits: tuple

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,) or not np.isfinite(axis).all():
            raise ValueError("joint axis must be a finite 3-vector")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ValueError("joint axis must be a unit vector")
        transform = np.asarray(self.transform, dtype=float)
        if transform.shape != (4, 4):
            raise ValueError("joint transform must be 4x4")
        lo, hi = self.limits
        if not lo < hi:
            raise ValueError("joint limits must satisfy lower < upper")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "transform", transform)


@dataclass(frozen=True)
class KinematicChain:
    """Robot description: joints, end-effector and tool mounts, tool capsule."""

    joints: tuple
    ee_offset: np.ndarray
    tool_offset: np.ndarray
    tool_length: float
    tool_radius: float
    name: str = "chain"

    def __post_init__(self):
        if len(self.joints) < 6:
            raise ValueError("chain needs at least 6 joints")
        if not self.tool_length > 0.0:
            raise ValueError("tool_length must be > 0")
        if self.tool_radius < 0.0:
            raise ValueError("tool_radius must be >= 0")
        for attr in ("ee_offset", "tool_offset"):
            T = np.asarray(getattr(self, attr), dtype=float)
            if T.shape != (4, 4):
                raise ValueError(f"{attr} must be a 4x4 transform")
            object.__setattr__(self, attr, T)
        object.__setattr__(self, "joints", tuple(self.joints))

    @property
    def dof(self):
        return len(self.joints)

    def lower_limits(self):
        return np.array([j.limits[0] for j in self.joints])

    def upper_limits(self):
        return np.array([j.limits[1] for j in self.joints])

    def within_limits(self, q):
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.lower_limits()) and np.all(q <= self.upper_limits()))


@dataclass(frozen=True)
class JointState:
    """Joint positions and velocities (rad, rad/s)."""

    q: np.ndarray
    q_dot: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        q_dot = np.asarray(self.q_dot, dtype=float)
        if q.shape != q_dot.shape:
            raise ValueError("q and q_dot must have matching length")
        if not (np.isfinite(q).all() and np.isfinite(q_dot).all()):
            raise ValueError("joint state must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_dot", q_dot)


@dataclass(frozen=True)
class ToolPose:
    """Tool tip frame plus the end-effector (tool mount) position."""

    p_t: np.ndarray
    R_t: np.ndarray
    p_e: np.ndarray

    @property
    def a_t(self):
        return self.R_t[:, 0]

    @property
    def o_t(self):
        return self.R_t[:, 1]

    @property
    def n_t(self):
        """Tool axis (third column of R_t)."""
        return self.R_t[:, 2]

    @property
    def B_c(self):
        """Basis [a_t o_t] of the plane orthogonal to the tool axis."""
        return self.R_t[:, :2]

    def tool_base(self, tool_length):
        """Far end of the tool segment, ``p_t - L * n_t``."""
        return self.p_t - tool_length * self.n_t


def _check_q(chain, q):
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.dof,):
        raise ValueError(f"expected {chain.dof} joint values, got shape {q.shape}")
    if not np.isfinite(q).all():
        raise ValueError("joint positions must be finite")
    return q


def _link_frames(chain, q):
    """World transforms of every joint frame plus the end-effector transform."""
    frames = []
    T = np.eye(4)
    for joint, angle in zip(chain.joints, q):
        T = T @ joint.transform
        frames.append(T)
        T = T @ homogeneous(axis_rotation(joint.axis, angle), np.zeros(3))
    return frames, T @ chain.ee_offset


def forward_kinematics(chain, q):
    """Tool pose for joint positions ``q``.

    Returns a :class:`ToolPose` with the tip position, the tip rotation
    (third column is the tool axis) and the end-effector position where the
    human wrench is measured.
    """
    q = _check_q(chain, q)
    _, T_ee = _link_frames(chain, q)
    T_tool = T_ee @ chain.tool_offset
    return ToolPose(p_t=T_tool[:3, 3].copy(), R_t=T_tool[:3, :3].copy(),
                    p_e=T_ee[:3, 3].copy())


def geometric_jacobian(chain, q):
    """Geometric Jacobian of the tool tip: ``[p_t_dot; omega_t] = J_t q_dot``."""
    q = _check_q(chain, q)
    frames, T_ee = _link_frames(chain, q)
    p_t = (T_ee @ chain.tool_offset)[:3, 3]
    J = np.zeros((6, chain.dof))
    for i, (joint, frame) in enumerate(zip(chain.joints, frames)):
        z = frame[:3, :3] @ joint.axis
        o = frame[:3, 3]
        J[:3, i] = np.cross(z, p_t - o)
        J[3:, i] = z
    return J


def redundancy_null_base(chain, J_t, W=None, align_with=None):
    """Orthonormal base ``G`` of the null space of ``J_t`` (rows span it).

    For ``n == 6`` there is no redundancy and an empty ``(0, 6)`` matrix is
    returned. ``W`` is accepted for interface stability; the construction is
    an unweighted SVD. ``align_with`` fixes row signs against a previous-tick
    ``G`` so the base varies continuously along a trajectory.
    """
    n = chain.dof
    if n == 6:
        return np.zeros((0, 6))
    _, s, Vt = np.linalg.svd(J_t)
    if s[-1] < SINGULARITY_TOL:
        raise SingularityError(
            f"J_t near-singular: smallest singular value {s[-1]:.3e}"
        )
    G = Vt[6:, :].copy()
    if align_with is not None and np.shape(align_with) == G.shape:
        signs = np.sign(np.sum(G * np.asarray(align_with), axis=1))
        signs[signs == 0.0] = 1.0
        G *= signs[:, None]
    else:
        # Deterministic sign convention: largest-magnitude entry positive.
        for row in G:
            k = int(np.argmax(np.abs(row)))
            if row[k] < 0.0:
                row *= -1.0
    return G


def port_on_tool_axis(pose, z=0.0):
    """Point of the tool axis at height ``z`` (used to record the entry port)."""
    n = pose.n_t
    if abs(n[2]) < 1e-12:
        raise ValueError("tool axis is horizontal; no unique point at given z")
    s = (z - pose.p_t[2]) / n[2]
    return pose.p_t + s * n


# --- default chain -----------------------------------------------------------

# Classic DH rows (a_i = 0) of the 7-dof LWR4+-style arm used by the shipped
# configurations. The tool is a straight stick along the flange z axis; the
# true mount of the original hardware is unpublished, see README.
_LWR_ALPHA = (math.pi / 2, -math.pi / 2, -math.pi / 2, math.pi / 2,
              math.pi / 2, -math.pi / 2, 0.0)
_LWR_D = (0.310, 0.0, 0.400, 0.0, 0.390, 0.0, 0.078)
_LWR_LIMITS_DEG = (170.0, 120.0, 170.0, 120.0, 170.0, 120.0, 170.0)

DEFAULT_TOOL_LENGTH = 0.43
DEFAULT_TOOL_RADIUS = 0.0035

_X_AXIS = np.array([1.0, 0.0, 0.0])
_Z_AXIS = np.array([0.0, 0.0, 1.0])


def chain_from_dh(alphas, ds, limits_deg, tool_offset, tool_length, tool_radius,
                  name="dh-chain"):
    """Build a chain from classic DH rows with ``a_i = 0``.

    Row ``i`` is ``RotZ(q_i) TransZ(d_i) RotX(alpha_i)``; the tail of each row
    becomes the fixed transform of the next joint and the last tail lands in
    ``ee_offset``.
    """
    joints = []
    tail = np.eye(4)
    for alpha, d, lim in zip(alphas, ds, limits_deg):
        lim_rad = math.radians(lim)
        joints.append(Joint(axis=_Z_AXIS.copy(), transform=tail,
                            limits=(-lim_rad, lim_rad)))
        tail = homogeneous(axis_rotation(_X_AXIS, alpha), np.array([0.0, 0.0, d]))
    return KinematicChain(
        joints=tuple(joints),
        ee_offset=tail,
        tool_offset=np.asarray(tool_offset, dtype=float),
        tool_length=tool_length,
        tool_radius=tool_radius,
        name=name,
    )


def default_chain(tool_length=DEFAULT_TOOL_LENGTH, tool_radius=DEFAULT_TOOL_RADIUS):
    """The shipped 7-dof arm holding a straight tool along the flange z axis."""
    tool = np.eye(4)
    tool[2, 3] = tool_length
    return chain_from_dh(_LWR_ALPHA, _LWR_D, _LWR_LIMITS_DEG, tool,
                         tool_length, tool_radius, name="lwr4plus")
