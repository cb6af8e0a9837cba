"""Grid binning and exact nearest-neighbor lookup."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .core import Point3, PointCloud

# Flat occupancy tables above this many cells fall back to sort-based ids.
_DENSE_CELL_LIMIT = float(1 << 22)
# Relative gap under which two tree candidates count as a possible tie.
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class CellGrid:
    cell_edge: float
    origin: Point3
    cells: dict[tuple[int, int, int], list[int]]

    def cell_of(self, p) -> tuple[int, int, int]:
        return tuple(
            int(math.floor((v - o) / self.cell_edge)) for v, o in zip(p, self.origin)
        )

    def cell_center(self, cell: tuple[int, int, int]) -> Point3:
        return Point3(*(o + (c + 0.5) * self.cell_edge for o, c in zip(self.origin, cell)))

    def __len__(self) -> int:
        return len(self.cells)


def build_grid(cloud: PointCloud, cell_edge: float, origin=None) -> CellGrid:
    """Bin every point into the cell ``floor((p - origin) / cell_edge)``.

    ``origin`` defaults to the bounding-box minimum corner. Cells are keyed
    by integer coordinate triples and listed in lexicographic order; member
    lists are in ascending point index.
    """
    if not cell_edge > 0:
        raise ValueError(f"cell_edge must be positive, got {cell_edge}")
    if len(cloud) == 0:
        raise ValueError("empty input")
    xyz = cloud.xyz
    o = xyz.min(axis=0) if origin is None else np.asarray(origin, dtype=np.float64)
    coords = np.floor((xyz - o) / cell_edge).astype(np.int64)
    keys, inverse = np.unique(coords, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(keys) + 1))
    cells = {
        (int(k[0]), int(k[1]), int(k[2])): order[bounds[c]:bounds[c + 1]].tolist()
        for c, k in enumerate(keys)
    }
    return CellGrid(float(cell_edge), Point3(*map(float, o)), cells)


class GridBinner:
    """Repeated grid passes over one cloud at varying cell edges.

    Caches the origin and bounding box so each pass is a single compiled
    loop over the points.
    """

    def __init__(self, cols: np.ndarray, origin=None) -> None:
        self.cols = cols
        self.lo, self.hi = _kernels.bounds(cols)
        self.origin = self.lo if origin is None else np.asarray(origin, dtype=np.float64)
        self.extent = self.hi - self.lo
        self._reach = float(max(np.abs(self.lo - self.origin).max(), np.abs(self.hi - self.origin).max()))
        # Keeps cell coordinates well inside int64 and float precision.
        self.min_edge = max(self._reach, 1.0) * 2.0**-40

    def _check(self, edge: float) -> float:
        edge = float(edge)
        if not edge > 0:
            raise ValueError(f"cell edge must be positive, got {edge}")
        if self._reach / edge > 2.0**52:
            raise ValueError("cell edge too small for the cloud extent")
        return edge

    def count(self, edge: float) -> int:
        """Number of occupied cells at ``edge``."""
        edge = self._check(edge)
        return int(_kernels.count_cells(self.cols, self.origin, edge, self.lo, self.hi, _DENSE_CELL_LIMIT))

    def representatives(self, edge: float) -> np.ndarray:
        """Closest-to-center point of each occupied cell, in lexicographic cell order."""
        edge = self._check(edge)
        return _kernels.representatives(self.cols, self.origin, edge, self.lo, self.hi, _DENSE_CELL_LIMIT)


def _sqdist(xyz: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = xyz - q
    return d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1] + d[..., 2] * d[..., 2]


class NnIndex:
    """Exact 1-nearest-neighbor queries over a fixed cloud.

    A k-d tree proposes the neighbor; squared distances are then recomputed
    directly so they agree exactly with a linear scan, and near-ties are
    resolved by scanning every candidate and keeping the lowest index.
    """

    def __init__(self, cloud: PointCloud) -> None:
        if len(cloud) == 0:
            raise ValueError("empty input")
        self._xyz = cloud.xyz
        self._tree = cKDTree(cloud.xyz)

    def __len__(self) -> int:
        return self._xyz.shape[0]

    def nearest(self, query) -> tuple[int, float]:
        q = np.asarray(query, dtype=np.float64)
        dist, _ = self._tree.query(q, k=1)
        cand = np.array(self._tree.query_ball_point(q, dist * (1 + _TIE_RTOL) + 1e-300), dtype=np.int64)
        if cand.size == 0:
            _, j = self._tree.query(q, k=1)
            cand = np.array([j], dtype=np.int64)
        cand.sort()
        d2 = _sqdist(self._xyz[cand], q)
        pos = int(np.argmin(d2))
        return int(cand[pos]), float(d2[pos])

    def nearest_many(self, queries) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`nearest` over an (M, 3) array of queries."""
        q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        if len(self) == 1:
            idx = np.zeros(q.shape[0], dtype=np.int64)
            return idx, _sqdist(self._xyz[idx], q)
        dist, idx = self._tree.query(q, k=2)
        idx = idx[:, 0].astype(np.int64)
        d2 = _sqdist(self._xyz[idx], q)
        close = np.flatnonzero(dist[:, 1] <= dist[:, 0] * (1 + _TIE_RTOL) + 1e-300)
        for r in close:
            idx[r], d2[r] = self.nearest(q[r])
        return idx, d2


def nearest(index: NnIndex, query) -> tuple[int, float]:
    """(point index, squared distance) of the indexed point closest to ``query``."""
    return index.nearest(query)
