"""Identity loss on the Poincare ball.

Class probabilities live just inside the unit ball (rows are l2-clamped
to 0.9999) and the target is the matching one-hot vertex scaled the
same way. The hyperbolic distance between them,

    arccosh(1 + 2 ||v1 - v2||^2 / ((1 - ||v1||^2)(1 - ||v2||^2))),

blows up near the boundary, so confidently wrong predictions are
punished far harder than a cross-entropy would.
"""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, ops

BALL_CLAMP = 0.9999


def target_vertex(num_classes: int, target: int, dtype=np.float32) -> np.ndarray:
    """One-hot vector for `target`, scaled to sit just inside the ball."""
    if not 0 <= target < num_classes:
        raise ValueError(f"target {target} out of range for {num_classes} classes")
    v = np.zeros(num_classes, dtype=dtype)
    v[target] = BALL_CLAMP
    return v


def poincare_distance_rows(v1: Tensor, v2: np.ndarray) -> Tensor:
    """Per-row hyperbolic distance between v1 (B, K) and a fixed v2 (K,).

    v1 must already lie strictly inside the unit ball; the attack path
    guarantees this by clamping, and tests exercise it directly.
    """
    diff = ops.sub(v1, Tensor(np.broadcast_to(v2, v1.shape).copy()))
    sq_dist = ops.reduce_sum(ops.mul(diff, diff), axis=1)
    v1_sq = ops.reduce_sum(ops.mul(v1, v1), axis=1)
    denom_1 = ops.sub(1.0, v1_sq)
    denom_2 = float(1.0 - np.dot(v2, v2))
    ratio = ops.div(sq_dist, ops.mul(denom_1, denom_2))
    return ops.arccosh(ops.add(ops.mul(ratio, 2.0), 1.0))


def poincare_loss(logits: Tensor, target: int) -> Tensor:
    """Per-sample loss (B,) pulling softmax(logits) toward class `target`."""
    probs = ops.clip_rows_l2(ops.softmax(logits), BALL_CLAMP)
    v2 = target_vertex(logits.shape[1], target, dtype=logits.dtype)
    return poincare_distance_rows(probs, v2)


def poincare_loss_mean(logits: Tensor, target: int) -> Tensor:
    """Scalar mean of `poincare_loss`, the optimization objective."""
    return ops.reduce_mean(poincare_loss(logits, target))
