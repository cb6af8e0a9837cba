"""Point containers and the geometry helpers every other module leans on."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class PointCloud:
    """Immutable, ordered set of 3D points stored as float64.

    Construction widens the input to 64-bit and rejects NaN/inf. The
    backing arrays are read-only, so the i-th point keeps its identity for
    the lifetime of the object.
    """

    def __init__(self, points) -> None:
        xyz = np.array(points, dtype=np.float64)
        if xyz.size == 0:
            xyz = xyz.reshape(0, 3)
        if xyz.ndim != 2 or xyz.shape[1] != 3:
            raise ValueError(f"expected an (N, 3) array of points, got shape {xyz.shape}")
        if not np.isfinite(xyz).all():
            raise ValueError("non-finite coordinate in point cloud")
        xyz.setflags(write=False)
        self._xyz = xyz

    @classmethod
    def _trusted(cls, xyz: np.ndarray) -> PointCloud:
        # Skips validation; only for arrays derived from an existing cloud.
        obj = cls.__new__(cls)
        xyz = np.ascontiguousarray(xyz, dtype=np.float64)
        xyz.setflags(write=False)
        obj._xyz = xyz
        return obj

    @property
    def xyz(self) -> np.ndarray:
        """(N, 3) read-only coordinate array."""
        return self._xyz

    @cached_property
    def columns(self) -> np.ndarray:
        """(3, N) contiguous copy of the coordinates, one row per axis."""
        cols = np.ascontiguousarray(self._xyz.T)
        cols.setflags(write=False)
        return cols

    def __len__(self) -> int:
        return self._xyz.shape[0]

    def __getitem__(self, i: int) -> Point3:
        x, y, z = self._xyz[i]
        return Point3(float(x), float(y), float(z))

    def __iter__(self) -> Iterator[Point3]:
        for row in self._xyz:
            yield Point3(float(row[0]), float(row[1]), float(row[2]))

    def __repr__(self) -> str:
        return f"PointCloud(n={len(self)})"

    def take(self, indices: Sequence[int] | np.ndarray) -> PointCloud:
        """Sub-cloud holding ``indices`` in the given order."""
        return PointCloud._trusted(np.take(self._xyz, np.asarray(indices, dtype=np.int64), axis=0))


@dataclass(frozen=True)
class Aabb:
    min_corner: Point3
    max_corner: Point3

    def contains(self, p) -> bool:
        return all(lo <= v <= hi for lo, v, hi in zip(self.min_corner, p, self.max_corner))

    @property
    def extent(self) -> Point3:
        return Point3(*(hi - lo for lo, hi in zip(self.min_corner, self.max_corner)))


@dataclass(frozen=True)
class NormalizationTransform:
    """Maps sensor coordinates to the unit frame via ``(p - translation) / scale``."""

    translation: Point3
    scale: float

    def __post_init__(self) -> None:
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")

    @classmethod
    def identity(cls) -> NormalizationTransform:
        return cls(Point3(0.0, 0.0, 0.0), 1.0)

    def apply(self, cloud: PointCloud) -> PointCloud:
        t = np.asarray(self.translation, dtype=np.float64)
        return PointCloud._trusted((cloud.xyz - t) / self.scale)


def _require_points(cloud: PointCloud) -> None:
    if len(cloud) == 0:
        raise ValueError("empty input")


def centroid(cloud: PointCloud) -> Point3:
    _require_points(cloud)
    return Point3(*(float(v) for v in cloud.xyz.mean(axis=0)))


def bounding_box(cloud: PointCloud) -> Aabb:
    _require_points(cloud)
    lo = cloud.xyz.min(axis=0)
    hi = cloud.xyz.max(axis=0)
    return Aabb(Point3(*map(float, lo)), Point3(*map(float, hi)))


def normalize(cloud: PointCloud) -> tuple[PointCloud, NormalizationTransform]:
    """Center on the centroid and scale so the farthest point sits at radius 1.

    Raises ``ValueError("degenerate cloud")`` when every point coincides,
    since the scale would be zero.
    """
    _require_points(cloud)
    xyz = cloud.xyz
    if np.all(xyz == xyz[0]):
        raise ValueError("degenerate cloud")
    center = xyz.mean(axis=0)
    shifted = xyz - center
    radius = float(np.sqrt((shifted * shifted).sum(axis=1)).max())
    if radius == 0.0:
        raise ValueError("degenerate cloud")
    transform = NormalizationTransform(Point3(*map(float, center)), radius)
    return PointCloud._trusted(shifted / radius), transform


def apply_inverse(transform: NormalizationTransform, cloud: PointCloud) -> PointCloud:
    """Map normalized coordinates back to the original frame."""
    t = np.asarray(transform.translation, dtype=np.float64)
    return PointCloud._trusted(cloud.xyz * transform.scale + t)
