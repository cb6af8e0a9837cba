"""Uniform downsampling: farthest point sampling, cell sampling and Cell-IFPS.

Every sampler returns a :class:`SampleSelection` of indices into the source
cloud. Distances are compared as squared Euclidean values throughout.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _kernels
from .core import PointCloud
from .spatial_index import _DENSE_CELL_LIMIT, GridBinner, NnIndex

STAGE_SIZES = (1024, 512)
DEGENERATE_EXTENT = 1e-12

# Occupied-cell counts scale roughly like edge**slope, with slope -3 for
# volumes and -2 for surfaces; scanned clouds are surfaces.
_SLOPE_PRIOR = -2.0
_SLOPE_RANGE = (-3.0, -1.0)
# A bracket narrower than this (in log edge) straddles a jump in the count
# curve, typically a grid layer sweeping across an axis-aligned face.
_MIN_BRACKET = 0.01


@dataclass(frozen=True)
class SampleSelection:
    source_size: int
    indices: np.ndarray

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def apply(self, cloud: PointCloud) -> PointCloud:
        if len(cloud) != self.source_size:
            raise ValueError("selection does not belong to this cloud")
        return cloud.take(self.indices)


@dataclass(frozen=True)
class CellIfpsConfig:
    """Tuning knobs for :func:`cell_ifps`.

    ``count_tolerance`` bounds the accepted cell count to
    ``[n, n + ceil(count_tolerance * n)]`` while the cell edge is being
    resized. ``removal`` picks what happens when the grid overshoots:
    ``"literal"`` moves the farthest-point picks out of the sample,
    ``"keep_fps"`` keeps the ``n`` farthest-point picks instead.
    """

    overshoot_factor: float = 1.5
    max_resize_rounds: int = 8
    rng_seed: int = 0
    count_tolerance: float = 0.05
    removal: Literal["literal", "keep_fps"] = "literal"

    def __post_init__(self) -> None:
        if not self.overshoot_factor >= 1:
            raise ValueError("overshoot_factor must be >= 1")
        if self.max_resize_rounds < 1:
            raise ValueError("max_resize_rounds must be >= 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be unsigned")
        if not self.count_tolerance >= 0:
            raise ValueError("count_tolerance must be >= 0")
        if self.removal not in ("literal", "keep_fps"):
            raise ValueError(f"unknown removal mode {self.removal!r}")


@dataclass(frozen=True)
class CellIfpsTrace:
    """How a :func:`cell_ifps` call reached its answer."""

    cell_edge: float
    cell_count: int
    rounds: int
    path: Literal["identity", "exact", "remove", "add"]
    edges_tried: tuple[tuple[float, int], ...] = field(default=())


def _check_count(n: int, size: int) -> None:
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if n > size:
        raise ValueError(f"insufficient points: requested {n} from {size}")


@functools.lru_cache(maxsize=64)
def _seed_unit(seed: int) -> float:
    return float(np.random.default_rng(seed).random())


def _seeded_index(seed: int, size: int) -> int:
    """Start point for farthest point sampling, a uniform draw from ``seed``."""
    return min(int(_seed_unit(seed) * size), size - 1)


def ifps(cloud: PointCloud, n: int, rng_seed: int = 0, *, start_index: int | None = None) -> SampleSelection:
    """Iterative farthest point sampling.

    Starts from a seeded random point (or ``start_index``) and repeatedly
    adds the remaining point whose squared distance to the selected set is
    largest, lowest index first on ties. Runs in O(n * len(cloud)).
    """
    size = len(cloud)
    _check_count(n, size)
    if start_index is None:
        start = _seeded_index(rng_seed, size)
    elif 0 <= start_index < size:
        start = int(start_index)
    else:
        raise IndexError(f"start_index {start_index} out of range")
    dist = np.full(size, np.inf)
    return SampleSelection(size, _kernels.farthest_points(cloud.columns, n, start, dist))


def radius_to_cell_edge(radius: float) -> float:
    """Edge of the cube inscribed in a sphere of ``radius``."""
    return 2.0 * radius / math.sqrt(3.0)


def cell_sample_edge(cloud: PointCloud, cell_edge: float, origin=None) -> SampleSelection:
    """One representative per occupied grid cell of edge ``cell_edge``.

    The representative is the member closest to its cell center (lowest
    index on ties); output follows lexicographic cell order. The grid is
    anchored at the bounding-box minimum unless ``origin`` is given.
    """
    if not cell_edge > 0:
        raise ValueError(f"cell_edge must be positive, got {cell_edge}")
    if len(cloud) == 0:
        raise ValueError("empty input")
    binner = GridBinner(cloud.columns, origin)
    return SampleSelection(len(cloud), binner.representatives(float(cell_edge)))


def cell_sample(cloud: PointCloud, radius: float, origin=None) -> SampleSelection:
    """Cell sampling with spheres of ``radius``, realized as inscribed grid cells."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return cell_sample_edge(cloud, radius_to_cell_edge(radius), origin)


def estimate_cell_edge(cloud: PointCloud, n: int, overshoot: float = 1.5) -> float:
    """Cell edge expected to yield about ``overshoot * n`` occupied cells.

    Spreads the bounding-box volume evenly over the cells; axes flatter
    than 1e-12 are dropped and the root order shrinks to match.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if not overshoot > 0:
        raise ValueError("overshoot must be positive")
    if len(cloud) == 0:
        raise ValueError("empty input")
    xyz = cloud.xyz
    return float(_kernels.edge_from_extent(xyz.max(axis=0) - xyz.min(axis=0), n, float(overshoot), DEGENERATE_EXTENT))


def cell_ifps_trace(
    cloud: PointCloud, n: int, config: CellIfpsConfig | None = None
) -> tuple[SampleSelection, CellIfpsTrace]:
    """:func:`cell_ifps` plus a record of the grid search and correction path."""
    config = config or CellIfpsConfig()
    size = len(cloud)
    _check_count(n, size)
    if n == size:
        return SampleSelection(size, np.arange(size)), CellIfpsTrace(0.0, size, 0, "identity")

    cols = cloud.columns
    upper = n + math.ceil(config.count_tolerance * n)
    indices, edges, counts, pick = _kernels.cell_ifps_select(
        cols, n, upper, config.overshoot_factor, DEGENERATE_EXTENT, config.max_resize_rounds,
        _SLOPE_PRIOR, *_SLOPE_RANGE, _MIN_BRACKET, _DENSE_CELL_LIMIT,
        _seed_unit(config.rng_seed), config.removal == "keep_fps",
    )
    edge = float(edges[pick])
    tried = tuple(zip(edges.tolist(), counts.tolist()))
    n_cur = int(counts[pick])

    if n_cur == n:
        path = "exact"
    elif n_cur > n:
        path = "remove"
    else:
        path = "add"
        picked = indices
        rest = np.ones(size, dtype=bool)
        rest[picked] = False
        remainder = np.flatnonzero(rest)
        _, dist = NnIndex(cloud.take(picked)).nearest_many(cloud.xyz[remainder])
        sub = np.ascontiguousarray(cols[:, remainder])
        added = _kernels.farthest_points(sub, n - n_cur, -1, dist)
        indices = np.concatenate([picked, remainder[added]])

    trace = CellIfpsTrace(edge, n_cur, len(tried), path, tried)
    return SampleSelection(size, indices), trace


def cell_ifps(cloud: PointCloud, n: int, config: CellIfpsConfig | None = None) -> SampleSelection:
    """Cell-IFPS: cell sampling followed by a small farthest-point correction.

    The cell edge starts from :func:`estimate_cell_edge` and is rescaled
    for at most ``config.max_resize_rounds`` grid passes until the occupied
    cell count lands in the accepted window. If the grid then holds too
    many representatives, farthest point sampling over them picks the ones
    to drop (or keep, per ``config.removal``); if it holds too few,
    farthest point sampling over the leftover points, seeded with the
    representatives as the selected set, adds the rest. Always returns
    exactly ``n`` distinct indices.
    """
    return cell_ifps_trace(cloud, n, config)[0]


def multiscale_sample(
    cloud: PointCloud,
    config: CellIfpsConfig | None = None,
    sampler: Literal["ifps", "cell_ifps"] = "cell_ifps",
) -> tuple[PointCloud, PointCloud, PointCloud]:
    """Three-scale input pyramid: the cloud, a 1024-point sample of it, and a
    512-point sample of that sample."""
    config = config or CellIfpsConfig()
    if len(cloud) < STAGE_SIZES[0]:
        raise ValueError(f"input below minimum scale: {len(cloud)} < {STAGE_SIZES[0]} points")
    if sampler == "ifps":
        def select(c, n):
            return ifps(c, n, config.rng_seed)
    elif sampler == "cell_ifps":
        def select(c, n):
            return cell_ifps(c, n, config)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")

    stages = [cloud]
    for n in STAGE_SIZES:
        prev = stages[-1]
        stages.append(prev if len(prev) == n else prev.take(select(prev, n).indices))
    return stages[0], stages[1], stages[2]
