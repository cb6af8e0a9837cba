"""Directional nearest-neighbor errors and the Chamfer distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointCloud
from .spatial_index import NnIndex


@dataclass(frozen=True)
class CompletionErrorReport:
    """Mean squared nearest-neighbor distances in both directions, and their sum."""

    pred_to_gt: float
    gt_to_pred: float
    chamfer: float


def _directed(src: PointCloud, dst: PointCloud) -> float:
    # Mean over src of the squared distance to the nearest dst point.
    if len(src) == 0 or len(dst) == 0:
        raise ValueError("empty input")
    _, d2 = NnIndex(dst).nearest_many(src.xyz)
    return float(np.sum(d2) / d2.shape[0])


def pred_to_gt_error(pred: PointCloud, gt: PointCloud) -> float:
    """Mean over predicted points of the squared distance to the nearest ground-truth point."""
    return _directed(pred, gt)


def gt_to_pred_error(pred: PointCloud, gt: PointCloud) -> float:
    """Mean over ground-truth points of the squared distance to the nearest predicted point."""
    return _directed(gt, pred)


def chamfer(s1: PointCloud, s2: PointCloud) -> CompletionErrorReport:
    """Chamfer distance between ``s1`` (prediction) and ``s2`` (ground truth).

    Each directional term is averaged over its own source set, so the two
    clouds may differ in size.
    """
    a = _directed(s1, s2)
    b = _directed(s2, s1)
    return CompletionErrorReport(a, b, a + b)
