"""Vectorized numpy implementation of the repulsion-field kernels.

Same contracts as the compiled extension ``_fieldcore``; selected as the
fallback when the extension is unavailable (or when forced via the
``RCMADMIT_PURE_PYTHON`` environment variable).
"""

import numpy as np

PSI_CLAMP = 1.0 - 1e-12


def point_distances(points, p):
    """Distances from each cloud point to ``p``."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return np.empty(0)
    return np.linalg.norm(points - np.asarray(p, dtype=float), axis=1)


def segment_distances(points, p_t, n_t, length):
    """Distances from each cloud point to the tool segment.

    The segment runs from the tip ``p_t`` back to ``p_t - length * n_t``.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return np.empty(0)
    zeta = (np.asarray(p_t) - points) @ np.asarray(n_t) / length
    sigma = np.clip(zeta, 0.0, 1.0)
    feet = np.asarray(p_t) - np.outer(sigma * length, np.asarray(n_t))
    return np.linalg.norm(feet - points, axis=1)


def _field_terms(dist, gains, d_c, d_0, clamp):
    """Common potential/stiffness terms for points inside the influence shell.

    Returns (psi, V_i, k_v, e_mag) arrays over the given distances.
    """
    psi = (dist - (d_0 + d_c)) ** 2 / d_0**2
    if clamp:
        psi = np.minimum(psi, PSI_CLAMP)
    ln = np.log(1.0 / (1.0 - psi))
    V = 0.5 * gains * ln**2
    k_v = 2.0 * gains / (d_0**2 * (1.0 - psi)) * ln
    e_mag = (d_0 + d_c) - dist
    return psi, V, k_v, e_mag


def _violation(dist, d_c):
    hit = np.flatnonzero(dist <= d_c)
    if hit.size == 0:
        return -1
    return int(hit[np.argmin(dist[hit])])


def tip_field(points, gains, p_t, d_c, d_0, clamp=False):
    """Repulsion of the cloud on the tool tip.

    Returns ``(force, V_total, min_dist, active_count, violated_index)``
    where ``violated_index`` is -1 unless some point is at or inside its
    covering sphere (then it is the offending row of ``points``).
    """
    points = np.asarray(points, dtype=float)
    p_t = np.asarray(p_t, dtype=float)
    if points.size == 0:
        return np.zeros(3), 0.0, np.inf, 0, -1
    gains = np.broadcast_to(np.asarray(gains, dtype=float), (points.shape[0],))
    delta = p_t - points
    dist = np.linalg.norm(delta, axis=1)
    violated = _violation(dist, d_c)
    min_dist = float(dist.min())
    active = dist <= d_c + d_0
    count = int(active.sum())
    if count == 0:
        return np.zeros(3), 0.0, min_dist, 0, violated
    if violated >= 0 and not clamp:
        return np.zeros(3), np.inf, min_dist, count, violated
    dist_a = dist[active]
    _, V, k_v, e_mag = _field_terms(dist_a, gains[active], d_c, d_0, clamp)
    units = delta[active] / dist_a[:, None]
    force = (k_v * e_mag) @ units
    return force, float(V.sum()), min_dist, count, violated


def capsule_field(points, gains, p_t, n_t, length, d_c, d_0, clamp=False):
    """Repulsion of the cloud on the whole tool segment, as a tip wrench.

    Each point repels its nearest segment point; the force there maps to the
    tip as ``[f; (p_star - p_t) x f]``. ``d_c`` must already include the
    capsule radius. Returns the same tuple as :func:`tip_field` with a
    6-vector wrench.
    """
    points = np.asarray(points, dtype=float)
    p_t = np.asarray(p_t, dtype=float)
    n_t = np.asarray(n_t, dtype=float)
    if points.size == 0:
        return np.zeros(6), 0.0, np.inf, 0, -1
    gains = np.broadcast_to(np.asarray(gains, dtype=float), (points.shape[0],))
    zeta = (p_t - points) @ n_t / length
    sigma = np.clip(zeta, 0.0, 1.0)
    feet = p_t - np.outer(sigma * length, n_t)
    delta = feet - points
    dist = np.linalg.norm(delta, axis=1)
    violated = _violation(dist, d_c)
    min_dist = float(dist.min())
    active = dist <= d_c + d_0
    count = int(active.sum())
    if count == 0:
        return np.zeros(6), 0.0, min_dist, 0, violated
    if violated >= 0 and not clamp:
        return np.zeros(6), np.inf, min_dist, count, violated
    dist_a = dist[active]
    _, V, k_v, e_mag = _field_terms(dist_a, gains[active], d_c, d_0, clamp)
    units = delta[active] / dist_a[:, None]
    forces = (k_v * e_mag)[:, None] * units
    arms = feet[active] - p_t
    torques = np.cross(arms, forces)
    wrench = np.concatenate([forces.sum(axis=0), torques.sum(axis=0)])
    return wrench, float(V.sum()), min_dist, count, violated
