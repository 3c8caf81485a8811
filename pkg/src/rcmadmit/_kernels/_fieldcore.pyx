# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled repulsion-field kernels (sequential accumulation in point order)."""

from libc.math cimport INFINITY, log, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

PSI_CLAMP = 1.0 - 1e-12
cdef double _PSI_CLAMP = 1.0 - 1e-12


def point_distances(points, p):
    """Distances from each cloud point to ``p``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double dx, dy, dz
    for i in range(m):
        dx = q[0] - pts[i, 0]
        dy = q[1] - pts[i, 1]
        dz = q[2] - pts[i, 2]
        out[i] = sqrt(dx * dx + dy * dy + dz * dz)
    return out


def segment_distances(points, p_t, n_t, double length):
    """Distances from each cloud point to the tool segment."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tip = np.ascontiguousarray(p_t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axis = np.ascontiguousarray(n_t, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double zeta, sigma, fx, fy, fz
    for i in range(m):
        zeta = ((tip[0] - pts[i, 0]) * axis[0]
                + (tip[1] - pts[i, 1]) * axis[1]
                + (tip[2] - pts[i, 2]) * axis[2]) / length
        sigma = zeta
        if sigma < 0.0:
            sigma = 0.0
        elif sigma > 1.0:
            sigma = 1.0
        fx = tip[0] - sigma * length * axis[0] - pts[i, 0]
        fy = tip[1] - sigma * length * axis[1] - pts[i, 1]
        fz = tip[2] - sigma * length * axis[2] - pts[i, 2]
        out[i] = sqrt(fx * fx + fy * fy + fz * fz)
    return out


def tip_field(points, gains, p_t, double d_c, double d_0, bint clamp=False):
    """Repulsion of the cloud on the tool tip.

    Returns ``(force, V_total, min_dist, active_count, violated_index)``.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ks = np.ascontiguousarray(
        np.broadcast_to(np.asarray(gains, dtype=np.float64), (pts.shape[0],)))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tip = np.ascontiguousarray(p_t, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] force = np.zeros(3, dtype=np.float64)
    if m == 0:
        return force, 0.0, INFINITY, 0, -1
    cdef double reach = d_c + d_0
    cdef double min_dist = INFINITY, viol_dist = INFINITY
    cdef double V = 0.0
    cdef Py_ssize_t i, violated = -1
    cdef int count = 0
    cdef double dx, dy, dz, dist, psi, ln, kv, coeff
    for i in range(m):
        dx = tip[0] - pts[i, 0]
        dy = tip[1] - pts[i, 1]
        dz = tip[2] - pts[i, 2]
        dist = sqrt(dx * dx + dy * dy + dz * dz)
        if dist < min_dist:
            min_dist = dist
        if dist <= d_c and dist < viol_dist:
            violated = i
            viol_dist = dist
        if dist <= reach:
            count += 1
    if count == 0:
        return force, 0.0, min_dist, 0, violated
    if violated >= 0 and not clamp:
        return force, INFINITY, min_dist, count, violated
    for i in range(m):
        dx = tip[0] - pts[i, 0]
        dy = tip[1] - pts[i, 1]
        dz = tip[2] - pts[i, 2]
        dist = sqrt(dx * dx + dy * dy + dz * dz)
        if dist > reach:
            continue
        psi = (dist - reach) * (dist - reach) / (d_0 * d_0)
        if psi > _PSI_CLAMP:
            psi = _PSI_CLAMP
        ln = log(1.0 / (1.0 - psi))
        V += 0.5 * ks[i] * ln * ln
        kv = 2.0 * ks[i] / (d_0 * d_0 * (1.0 - psi)) * ln
        coeff = kv * (reach - dist) / dist
        force[0] += coeff * dx
        force[1] += coeff * dy
        force[2] += coeff * dz
    return force, V, min_dist, count, violated


def capsule_field(points, gains, p_t, n_t, double length, double d_c,
                  double d_0, bint clamp=False):
    """Repulsion of the cloud on the whole tool segment, as a tip wrench."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ks = np.ascontiguousarray(
        np.broadcast_to(np.asarray(gains, dtype=np.float64), (pts.shape[0],)))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tip = np.ascontiguousarray(p_t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] axis = np.ascontiguousarray(n_t, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wrench = np.zeros(6, dtype=np.float64)
    if m == 0:
        return wrench, 0.0, INFINITY, 0, -1
    cdef double reach = d_c + d_0
    cdef double min_dist = INFINITY, viol_dist = INFINITY
    cdef double V = 0.0
    cdef Py_ssize_t i, violated = -1
    cdef int count = 0
    cdef double zeta, sigma, px, py, pz, dx, dy, dz, dist
    cdef double psi, ln, kv, coeff, fx, fy, fz, ax, ay, az
    for i in range(m):
        zeta = ((tip[0] - pts[i, 0]) * axis[0]
                + (tip[1] - pts[i, 1]) * axis[1]
                + (tip[2] - pts[i, 2]) * axis[2]) / length
        sigma = zeta
        if sigma < 0.0:
            sigma = 0.0
        elif sigma > 1.0:
            sigma = 1.0
        px = tip[0] - sigma * length * axis[0]
        py = tip[1] - sigma * length * axis[1]
        pz = tip[2] - sigma * length * axis[2]
        dx = px - pts[i, 0]
        dy = py - pts[i, 1]
        dz = pz - pts[i, 2]
        dist = sqrt(dx * dx + dy * dy + dz * dz)
        if dist < min_dist:
            min_dist = dist
        if dist <= d_c and dist < viol_dist:
            violated = i
            viol_dist = dist
        if dist <= reach:
            count += 1
    if count == 0:
        return wrench, 0.0, min_dist, 0, violated
    if violated >= 0 and not clamp:
        return wrench, INFINITY, min_dist, count, violated
    for i in range(m):
        zeta = ((tip[0] - pts[i, 0]) * axis[0]
                + (tip[1] - pts[i, 1]) * axis[1]
                + (tip[2] - pts[i, 2]) * axis[2]) / length
        sigma = zeta
        if sigma < 0.0:
            sigma = 0.0
        elif sigma > 1.0:
            sigma = 1.0
        px = tip[0] - sigma * length * axis[0]
        py = tip[1] - sigma * length * axis[1]
        pz = tip[2] - sigma * length * axis[2]
        dx = px - pts[i, 0]
        dy = py - pts[i, 1]
        dz = pz - pts[i, 2]
        dist = sqrt(dx * dx + dy * dy + dz * dz)
        if dist > reach:
            continue
        psi = (dist - reach) * (dist - reach) / (d_0 * d_0)
        if psi > _PSI_CLAMP:
            psi = _PSI_CLAMP
        ln = log(1.0 / (1.0 - psi))
        V += 0.5 * ks[i] * ln * ln
        kv = 2.0 * ks[i] / (d_0 * d_0 * (1.0 - psi)) * ln
        coeff = kv * (reach - dist) / dist
        fx = coeff * dx
        fy = coeff * dy
        fz = coeff * dz
        ax = px - tip[0]
        ay = py - tip[1]
        az = pz - tip[2]
        wrench[0] += fx
        wrench[1] += fy
        wrench[2] += fz
        wrench[3] += ay * fz - az * fy
        wrench[4] += az * fx - ax * fz
        wrench[5] += ax * fy - ay * fx
    return wrench, V, min_dist, count, violated
