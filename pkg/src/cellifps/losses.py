"""Training-loss arithmetic for three-stage point-cloud completion.

These are scoring functions over fixed point sets and discriminator
outputs; nothing here computes gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import PointCloud
from .metrics import chamfer
from .sampling import ifps

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class StagePredictions:
    """Coarse-to-fine predictions: full detail plus two sparser center sets."""

    detail: PointCloud
    primary_centers: PointCloud
    secondary_centers: PointCloud

    def __post_init__(self) -> None:
        sizes = (len(self.secondary_centers), len(self.primary_centers), len(self.detail))
        if min(sizes) < 1:
            raise ValueError("empty input")
        if not sizes[0] <= sizes[1] <= sizes[2]:
            raise ValueError(f"stage sizes must satisfy secondary <= primary <= detail, got {sizes}")


@dataclass(frozen=True)
class LossWeights:
    alpha: float
    lambda_c: float
    lambda_a: float

    def __post_init__(self) -> None:
        if not self.alpha >= 0 or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be a finite nonnegative number, got {self.alpha}")
        for name in ("lambda_c", "lambda_a"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.lambda_c + self.lambda_a - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"lambda_c + lambda_a must equal 1, got {self.lambda_c + self.lambda_a!r}")


@dataclass(frozen=True)
class ScoreSet:
    """Discriminator outputs on real and generated samples, index-aligned."""

    real_scores: Sequence[float]
    fake_scores: Sequence[float]

    def __post_init__(self) -> None:
        real = tuple(float(s) for s in self.real_scores)
        fake = tuple(float(s) for s in self.fake_scores)
        if len(real) != len(fake):
            raise ValueError(f"score lists differ in length: {len(real)} real, {len(fake)} fake")
        # Written as negated checks so NaN is rejected too.
        if not all(0.0 < s <= 1.0 for s in real):
            raise ValueError("log domain: real scores must lie in (0, 1]")
        if not all(0.0 <= s < 1.0 for s in fake):
            raise ValueError("log domain: fake scores must lie in [0, 1)")
        object.__setattr__(self, "real_scores", real)
        object.__setattr__(self, "fake_scores", fake)


def multi_stage_completion_loss(preds: StagePredictions, gt: PointCloud, alpha: float, rng_seed: int) -> float:
    """Chamfer loss summed over the three stages with weights 1, alpha, 2 * alpha.

    The coarse targets are farthest-point samples of ``gt`` sized to match
    each prediction stage, both drawn from ``gt`` itself with ``rng_seed``.
    """
    if not alpha >= 0 or not math.isfinite(alpha):
        raise ValueError(f"alpha must be a finite nonnegative number, got {alpha}")
    if len(gt) == 0:
        raise ValueError("empty input")
    if len(gt) < len(preds.primary_centers):
        raise ValueError(
            f"ground truth has {len(gt)} points, fewer than the {len(preds.primary_centers)} primary centers"
        )
    gt_primary = gt.take(ifps(gt, len(preds.primary_centers), rng_seed).indices)
    gt_secondary = gt.take(ifps(gt, len(preds.secondary_centers), rng_seed).indices)
    fine = chamfer(preds.detail, gt).chamfer
    mid = chamfer(preds.primary_centers, gt_primary).chamfer
    coarse = chamfer(preds.secondary_centers, gt_secondary).chamfer
    return fine + alpha * mid + 2.0 * alpha * coarse


def adversarial_loss(scores: ScoreSet) -> float:
    """``sum(log D(real)) + sum(log(1 - D(fake)))`` with natural logs."""
    if not isinstance(scores, ScoreSet):
        scores = ScoreSet(*scores)
    total = 0.0
    for s in scores.real_scores:
        total += math.log(s)
    for s in scores.fake_scores:
        total += math.log1p(-s)
    return total


def joint_loss(l_com: float, l_adv: float, weights: LossWeights) -> float:
    if abs(weights.lambda_c + weights.lambda_a - 1.0) > _WEIGHT_SUM_TOL:
        raise ValueError("lambda_c + lambda_a must equal 1")
    return weights.lambda_c * l_com + weights.lambda_a * l_adv
