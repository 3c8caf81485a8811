"""Forbidden regions as sphere-covered point clouds and their repulsion.

A forbidden region is a point cloud sampled from a surface that the tool must
never touch. Covering spheres of radius ``d_c`` close the gaps between
samples; a log-barrier potential with influence range ``d_0`` around each
sphere repels the tool tip (or the whole tool capsule) and diverges at the
sphere surface.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, ConstraintViolationError
from .grid import PointGrid

SQRT3 = math.sqrt(3.0)


def covering_radius(rho):
    """Covering-sphere radius (m) for a homogeneous density in points/cm^3.

    Each point owns a cube of side ``1/rho^(1/3)`` cm; the sphere that
    contains the cube has radius ``sqrt(3)/2`` times that side.
    """
    if not rho > 0.0:
        raise ValueError("density must be > 0 points/cm^3")
    return SQRT3 / (2.0 * rho ** (1.0 / 3.0)) / 100.0


@dataclass(frozen=True)
class RepulsionResult:
    """Total repulsion wrench at the tool tip plus field diagnostics."""

    F_r: np.ndarray
    V_total: float
    min_distance: float
    active_count: int


@dataclass(frozen=True)
class ForbiddenRegion:
    """Point cloud with covering radius, influence range, gains and index."""

    points: np.ndarray
    gains: np.ndarray
    d_c: float
    d_0: float
    rho: float = None
    context_points: np.ndarray = field(default=None, repr=False)
    index: PointGrid = field(default=None, repr=False)

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.shape[0] == 0:
            raise ConfigError("forbidden region has no points")
        if points.shape[1] != 3 or not np.isfinite(points).all():
            raise ConfigError("region points must be finite (m, 3) coordinates")
        if not self.d_c > 0.0:
            raise ConfigError("d_c must be > 0", field="region.d_c")
        if not self.d_0 > 0.0:
            raise ConfigError("d_0 must be > 0", field="region.d_0")
        gains = np.broadcast_to(
            np.asarray(self.gains, dtype=float), (points.shape[0],)
        ).copy()
        if not (gains > 0.0).all():
            raise ConfigError("field gains must be > 0", field="region.gain")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "gains", gains)
        if self.index is None:
            object.__setattr__(
                self, "index", PointGrid(points, cell_size=self.d_c + self.d_0)
            )

    @property
    def size(self):
        return self.points.shape[0]

    def influence(self, offset=0.0):
        """Outer radius of the repulsive shell around each point."""
        return self.d_c + self.d_0 + offset


def potential_at(point, region, offset=0.0):
    """Total barrier potential at ``point`` and the per-point shell terms.

    ``offset`` widens every covering sphere (the capsule radius when the
    query point is a shaft foot). Returns ``(V_total, terms)`` where terms
    is a list of ``(cloud_index, psi_i)`` for points inside influence.
    Raises :class:`ConstraintViolationError` if the point is at or inside a
    covering sphere, where the potential diverges.
    """
    point = np.asarray(point, dtype=float)
    d_c = region.d_c + offset
    cand = region.index.query_point(point, region.influence(offset))
    if cand.size == 0:
        return 0.0, []
    dist = _kernels.point_distances(region.points[cand], point)
    violated = dist <= d_c
    if violated.any():
        worst = int(np.flatnonzero(violated)[np.argmin(dist[violated])])
        raise ConstraintViolationError(float(dist[worst]), int(cand[worst]))
    psi = (dist - (region.d_0 + d_c)) ** 2 / region.d_0**2
    V = 0.5 * region.gains[cand] * np.log(1.0 / (1.0 - psi)) ** 2
    terms = [(int(c), float(p)) for c, p in zip(cand, psi)]
    return float(V.sum()), terms


def tip_repulsion(p_t, region, clamp=False):
    """Total repulsive force of the region on the tool tip.

    The wrench is ``[sum f_i; 0]``: the tip potentials produce no torque.
    With ``clamp`` the barrier is saturated instead of raising on violation
    (display/monitoring use only).
    """
    p_t = np.asarray(p_t, dtype=float)
    cand = region.index.query_point(p_t, region.influence())
    force, V, min_dist, count, violated = _kernels.tip_field(
        region.points[cand], region.gains[cand], p_t, region.d_c, region.d_0,
        clamp=clamp,
    )
    if violated >= 0 and not clamp:
        raise ConstraintViolationError(min_dist, int(cand[violated]))
    if cand.size == 0:
        min_dist = float(_kernels.point_distances(region.points, p_t).min())
    return RepulsionResult(
        F_r=np.concatenate([force, np.zeros(3)]),
        V_total=V,
        min_distance=min_dist,
        active_count=count,
    )


def capsule_nearest(p_t, n_t, length, p_i):
    """Nearest point of the tool segment to ``p_i``.

    Returns ``(sigma_star, p_star)`` with ``p_star = p_t - n_t * length *
    sigma_star`` and ``sigma_star`` the segment parameter clamped to [0, 1].
    """
    p_t = np.asarray(p_t, dtype=float)
    n_t = np.asarray(n_t, dtype=float)
    zeta = float(n_t @ (p_t - np.asarray(p_i, dtype=float))) / length
    sigma = min(max(zeta, 0.0), 1.0)
    return sigma, p_t - n_t * length * sigma


def capsule_repulsion(pose, tool_length, tool_radius, region, clamp=False):
    """Total repulsion wrench of the region on the whole tool capsule.

    Every cloud point repels its nearest shaft point through the barrier with
    the covering radius widened by the capsule radius; forces map to the tip
    as force plus moment.
    """
    d_c = region.d_c + tool_radius
    cand = region.index.query_segment(
        pose.p_t, pose.tool_base(tool_length), region.influence(tool_radius)
    )
    wrench, V, min_dist, count, violated = _kernels.capsule_field(
        region.points[cand], region.gains[cand], pose.p_t, pose.n_t,
        tool_length, d_c, region.d_0, clamp=clamp,
    )
    if violated >= 0 and not clamp:
        raise ConstraintViolationError(min_dist, int(cand[violated]))
    if cand.size == 0:
        min_dist = float(
            _kernels.segment_distances(
                region.points, pose.p_t, pose.n_t, tool_length
            ).min()
        )
    return RepulsionResult(
        F_r=wrench, V_total=V, min_distance=min_dist, active_count=count
    )


def region_min_distance(region, pose, mode, tool_length=None, tool_radius=None):
    """Exact distance from the tip (or shaft) to the closest cloud point."""
    if mode == "tip":
        return float(_kernels.point_distances(region.points, pose.p_t).min())
    return float(
        _kernels.segment_distances(
            region.points, pose.p_t, pose.n_t, tool_length
        ).min()
    )


def voxel_downsample(points, voxel_size, gains=None):
    """Centroid per occupied voxel; gains are averaged per voxel."""
    points = np.asarray(points, dtype=float)
    keys = np.floor(points / voxel_size).astype(np.int64)
    buckets = {}
    for i, key in enumerate(map(tuple, keys)):
        buckets.setdefault(key, []).append(i)
    out_pts = np.empty((len(buckets), 3))
    out_gain = np.empty(len(buckets)) if gains is not None else None
    # Deterministic order: by first-seen index of each voxel.
    for row, members in enumerate(buckets.values()):
        out_pts[row] = points[members].mean(axis=0)
        if gains is not None:
            out_gain[row] = np.asarray(gains)[members].mean()
    return (out_pts, out_gain) if gains is not None else (out_pts, None)


def load_point_cloud(path, voxel_size=None, *, d_0, gain, d_c=None,
                     density=None, context_labels=("context",)):
    """Read a region from a text cloud file.

    Format: one point per line, ``x y z [label] [k_i]`` in meters, ``#``
    comments. Points whose label is in ``context_labels`` are display-only.
    Exactly one of ``d_c`` or ``density`` defines the covering radius.
    """
    if (d_c is None) == (density is None):
        raise ConfigError("give exactly one of d_c or density", field="region")
    forbidden, f_gains, context = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) < 3:
                raise ConfigError("expected 'x y z [label] [k]'", line=lineno)
            try:
                xyz = [float(v) for v in parts[:3]]
            except ValueError as exc:
                raise ConfigError(f"bad coordinate: {exc}", line=lineno) from exc
            label = parts[3] if len(parts) > 3 else "forbidden"
            k_i = gain
            if len(parts) > 4:
                try:
                    k_i = float(parts[4])
                except ValueError as exc:
                    raise ConfigError(f"bad gain value: {exc}", line=lineno) from exc
            if len(parts) > 5:
                raise ConfigError("too many columns", line=lineno)
            if not all(math.isfinite(v) for v in xyz):
                raise ConfigError("non-finite coordinate", line=lineno)
            if label in context_labels:
                context.append(xyz)
            else:
                forbidden.append(xyz)
                f_gains.append(k_i)
    if not forbidden:
        raise ConfigError(f"no forbidden points in {path}")
    points = np.asarray(forbidden)
    gains = np.asarray(f_gains)
    if voxel_size is not None:
        points, gains = voxel_downsample(points, voxel_size, gains)
    if d_c is None:
        d_c = covering_radius(density)
    return ForbiddenRegion(
        points=points,
        gains=gains,
        d_c=d_c,
        d_0=d_0,
        rho=density,
        context_points=np.asarray(context) if context else None,
    )
