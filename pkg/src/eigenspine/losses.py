"""Scalar training objectives for the detection stage.

Only the loss formulas live here; anchor assignment and gradients are
out of scope.  Classification probabilities are clamped away from 0 and
1 so saturated predictions stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

# Transition point of the smooth-L1 branch switch; fixed, not tunable.
SMOOTH_L1_BETA = 1.0

# Probabilities are clamped to [PROB_CLAMP, 1 - PROB_CLAMP].
PROB_CLAMP = 1e-7


@dataclass(frozen=True)
class LossWeights:
    """Weights and shape parameters of the combined objective."""

    lambda_reg: float = 0.1
    lambda_cls: float = 1.0
    focal_gamma: float = 2.0
    focal_alpha: float = 0.25

    def __post_init__(self):
        values = (
            self.lambda_reg,
            self.lambda_cls,
            self.focal_gamma,
            self.focal_alpha,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValueError("loss weights must be finite")
        if self.lambda_reg < 0 or self.lambda_cls < 0:
            raise ValueError("lambda weights must be non-negative")
        if self.lambda_reg + self.lambda_cls <= 0:
            raise ValueError("at least one lambda must be positive")
        if self.focal_gamma < 0:
            raise ValueError("focal_gamma must be non-negative")
        if not 0 < self.focal_alpha <= 1:
            raise ValueError("focal_alpha must lie in (0, 1]")


def smooth_l1(pred, target) -> float:
    """Element-wise smooth-L1 distance, summed over coordinates."""
    pred = np.asarray(pred, dtype=float).reshape(-1)
    target = np.asarray(target, dtype=float).reshape(-1)
    if pred.shape != target.shape:
        raise DimensionMismatchError(
            f"shape mismatch: {pred.shape} vs {target.shape}"
        )
    diff = np.abs(pred - target)
    quadratic = 0.5 * diff * diff
    linear = diff - 0.5 * SMOOTH_L1_BETA
    return float(np.where(diff < SMOOTH_L1_BETA, quadratic, linear).sum())


def _clamp(p: float) -> float:
    return min(max(float(p), PROB_CLAMP), 1.0 - PROB_CLAMP)


def cross_entropy(p: float, y: int) -> float:
    """Binary cross-entropy with probability clamping."""
    p = _clamp(p)
    if y:
        return -math.log(p)
    return -math.log(1.0 - p)


def focal(p: float, y: int, weights: LossWeights = LossWeights()) -> float:
    """Focal loss: cross-entropy scaled down for well-classified points."""
    p = _clamp(p)
    p_t = p if y else 1.0 - p
    return -weights.focal_alpha * (1.0 - p_t) ** weights.focal_gamma * math.log(p_t)


def total_loss(
    reg_terms,
    sr_terms,
    ssr_terms,
    weights: LossWeights = LossWeights(),
) -> float:
    """Weighted sum of regression and classification objectives.

    Parameters
    ----------
    reg_terms : iterable of (pred, target, positive)
        Contour regression terms; only entries flagged positive count.
    sr_terms : iterable of (p, y)
        Spine-region classification terms, scored with cross-entropy.
    ssr_terms : iterable of (p, y)
        Sparse-sampling-region terms, scored with focal loss.
    """
    reg = sum(
        smooth_l1(pred, target)
        for pred, target, positive in reg_terms
        if positive
    )
    cls = sum(cross_entropy(p, y) for p, y in sr_terms)
    cls += sum(focal(p, y, weights) for p, y in ssr_terms)
    return weights.lambda_reg * reg + weights.lambda_cls * cls
