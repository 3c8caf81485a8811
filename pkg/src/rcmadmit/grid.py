"""Uniform hash grid over a point cloud for exact radius queries.

Cells are cubes of a fixed edge length keyed by integer coordinates; a query
visits only the cells the query volume can touch and then distance-filters,
so results are exactly the points a linear scan would return. Query results
are ascending point indices, which fixes the summation order downstream.
"""

import math

import numpy as np


def segment_point_distances(points, p0, p1):
    """Distances from each point to the segment [p0, p1] (vectorized)."""
    points = np.asarray(points, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    dd = float(d @ d)
    if dd == 0.0:
        return np.linalg.norm(points - p0, axis=1)
    t = np.clip((points - p0) @ d / dd, 0.0, 1.0)
    feet = p0 + t[:, None] * d
    return np.linalg.norm(points - feet, axis=1)


class PointGrid:
    """Spatial index over a fixed set of points."""

    def __init__(self, points, cell_size):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError("points must be an (m, 3) array")
        if not cell_size > 0.0:
            raise ValueError("cell_size must be > 0")
        self.points = points
        self.cell_size = float(cell_size)
        self._cells = {}
        keys = np.floor(points / self.cell_size).astype(np.int64)
        for idx, key in enumerate(map(tuple, keys)):
            self._cells.setdefault(key, []).append(idx)
        for key, members in self._cells.items():
            self._cells[key] = np.array(members, dtype=np.intp)

    def __len__(self):
        return self.points.shape[0]

    def _key(self, p):
        return tuple(int(math.floor(c / self.cell_size)) for c in p)

    def _candidates_in_box(self, lo, hi):
        """Indices stored in cells overlapping the axis-aligned box [lo, hi]."""
        klo = self._key(lo)
        khi = self._key(hi)
        hits = []
        for kx in range(klo[0], khi[0] + 1):
            for ky in range(klo[1], khi[1] + 1):
                for kz in range(klo[2], khi[2] + 1):
                    members = self._cells.get((kx, ky, kz))
                    if members is not None:
                        hits.append(members)
        if not hits:
            return np.empty(0, dtype=np.intp)
        return np.concatenate(hits)

    def query_point(self, center, radius):
        """Ascending indices of all points within ``radius`` of ``center``."""
        center = np.asarray(center, dtype=float)
        cand = self._candidates_in_box(center - radius, center + radius)
        if cand.size == 0:
            return cand
        dist = np.linalg.norm(self.points[cand] - center, axis=1)
        return np.sort(cand[dist <= radius])

    def query_segment(self, p0, p1, radius):
        """Ascending indices of all points within ``radius`` of segment [p0, p1]."""
        p0 = np.asarray(p0, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        lo = np.minimum(p0, p1) - radius
        hi = np.maximum(p0, p1) + radius
        cand = self._candidates_in_box(lo, hi)
        if cand.size == 0:
            return cand
        dist = segment_point_distances(self.points[cand], p0, p1)
        return np.sort(cand[dist <= radius])
