"""Entry-port constraint geometry and joint-space decoupling maps.

Per control tick this module builds, from the tool pose and Jacobian:

* the port error ``x_c = B_c^T (p_t - p_c)`` and its Jacobians ``A_x`` (task
  space) and ``A = A_x J_t`` (joint space),
* the null-space bases ``Z_x`` (task) and ``Z`` (joint) of those Jacobians,
* the weighted pseudoinverses and the square maps ``S = [A_dag  Z^T]`` and
  ``S_inv = [A; Z_dag^T]`` that split joint velocity into the port-constrained
  pair ``x_c_dot`` and the free coordinates ``x_f_dot``.

The free coordinates are, in order: translation along the tool axis, the three
angular velocity components about the port, then the robot's redundant motions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .kinematics import skew

# Condition-number ceiling for the small inner matrices of the pseudoinverses.
CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class RcmFrame:
    """Per-tick snapshot of every constraint-geometry quantity."""

    p_c: np.ndarray
    B_c: np.ndarray
    x_c: np.ndarray
    A_x: np.ndarray
    A: np.ndarray
    Z_x: np.ndarray
    Z: np.ndarray
    A_dagger: np.ndarray
    Z_dagger: np.ndarray
    S: np.ndarray
    S_inv: np.ndarray
    W: np.ndarray

    @property
    def Z_dagger_T(self):
        return self.Z_dagger.T


def rcm_error(pose, p_c):
    """Port error ``x_c``: offset of the tip from the port, in the [a_t o_t] plane."""
    return pose.B_c.T @ (pose.p_t - np.asarray(p_c, dtype=float))


def alignment_error(pose, p_c):
    """Distance from the port to the tool axis line."""
    v = np.asarray(p_c, dtype=float) - pose.p_t
    return float(np.linalg.norm(v - (v @ pose.n_t) * pose.n_t))


def constraint_jacobians(pose, J_t, p_c):
    """Task- and joint-space constraint Jacobians ``(A_x, A)``.

    ``A_x = B_c^T [I  (p_t - p_c)^]`` maps the tip twist to ``x_c_dot``;
    ``A = A_x J_t`` maps joint velocity to it.
    """
    lever = skew(pose.p_t - np.asarray(p_c, dtype=float))
    A_x = np.hstack([pose.B_c.T, pose.B_c.T @ lever])
    A = A_x @ J_t
    if np.linalg.matrix_rank(A, tol=1e-10) < 2:
        raise SingularityError("constraint Jacobian A lost rank 2")
    return A_x, A


def null_basis(pose, J_t, G, p_c, W=None):
    """Null-space bases ``(Z_x, Z)`` of ``A_x`` and ``A``.

    ``Z_x`` stacks the tool-axis direction over the port-pivot rows; ``Z``
    carries it to joint space through the right pseudoinverse of ``J_t`` and
    appends the redundancy base ``G``. ``W`` is accepted for interface
    stability; this construction does not use it.
    """
    n = J_t.shape[1]
    lever = skew(pose.p_t - np.asarray(p_c, dtype=float))
    Z_x = np.zeros((4, 6))
    Z_x[0, :3] = pose.n_t
    Z_x[1:, :3] = lever
    Z_x[1:, 3:] = np.eye(3)

    JJt = J_t @ J_t.T
    if np.linalg.cond(JJt) > CONDITION_LIMIT:
        raise SingularityError("J_t J_t^T ill-conditioned")
    Z = np.vstack([Z_x @ np.linalg.solve(JJt, J_t), np.atleast_2d(G).reshape(-1, n)])
    if Z.shape != (n - 2, n):
        raise SingularityError(
            f"null basis has shape {Z.shape}, expected {(n - 2, n)}"
        )
    return Z_x, Z


def decoupling_maps(A, Z, W):
    """Weighted pseudoinverses and the decoupling pair ``(S, S_inv)``.

    ``A_dag = W^-1 A^T (A W^-1 A^T)^-1`` and ``Z_dag = W Z^T (Z W Z^T)^-1``;
    ``S = [A_dag  Z^T]`` maps ``[x_c_dot; x_f_dot]`` to joint velocity and
    ``S_inv = [A; Z_dag^T]`` inverts it.
    """
    W = np.asarray(W, dtype=float)
    try:
        WinvAT = np.linalg.solve(W, A.T)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"weight matrix not invertible: {exc}") from exc
    inner_a = A @ WinvAT
    if np.linalg.cond(inner_a) > CONDITION_LIMIT:
        raise SingularityError("A W^-1 A^T ill-conditioned")
    A_dagger = np.linalg.solve(inner_a.T, WinvAT.T).T

    WZT = W @ Z.T
    inner_z = Z @ WZT
    if np.linalg.cond(inner_z) > CONDITION_LIMIT:
        raise SingularityError("Z W Z^T ill-conditioned")
    Z_dagger = np.linalg.solve(inner_z.T, WZT.T).T

    S = np.hstack([A_dagger, Z.T])
    S_inv = np.vstack([A, Z_dagger.T])
    return A_dagger, Z_dagger, S, S_inv


def split_velocity(S_inv, q_dot):
    """Split joint velocity into ``(x_c_dot, x_f_dot)`` via ``S_inv``."""
    v = S_inv @ np.asarray(q_dot, dtype=float)
    return v[:2], v[2:]


def rcm_frame(pose, J_t, G, p_c, W):
    """Assemble the full per-tick :class:`RcmFrame`."""
    p_c = np.asarray(p_c, dtype=float)
    x_c = rcm_error(pose, p_c)
    A_x, A = constraint_jacobians(pose, J_t, p_c)
    Z_x, Z = null_basis(pose, J_t, G, p_c)
    A_dagger, Z_dagger, S, S_inv = decoupling_maps(A, Z, W)
    return RcmFrame(
        p_c=p_c,
        B_c=pose.B_c.copy(),
        x_c=x_c,
        A_x=A_x,
        A=A,
        Z_x=Z_x,
        Z=Z,
        A_dagger=A_dagger,
        Z_dagger=Z_dagger,
        S=S,
        S_inv=S_inv,
        W=np.asarray(W, dtype=float),
    )
