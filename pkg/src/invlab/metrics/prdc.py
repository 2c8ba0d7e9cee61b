"""Precision, recall, density, coverage from k-NN manifold estimates.

Each real (resp. fake) point defines a ball whose radius is the
distance to its k-th nearest neighbor within its own set. Precision
asks how many fakes land inside some real ball, recall the converse,
density counts multiplicity, coverage asks how many real balls catch at
least one fake.
"""

from __future__ import annotations

import numpy as np


def pairwise_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix between rows of x and rows of y."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sq = (x * x).sum(1)[:, None] + (y * y).sum(1)[None, :] - 2.0 * (x @ y.T)
    return np.sqrt(np.maximum(sq, 0.0))


def knn_radii(features: np.ndarray, k: int) -> np.ndarray:
    """Distance from each row to its k-th nearest other row."""
    d = pairwise_distances(features, features)
    # Row-wise sort puts the self-distance (0) first; index k is the
    # k-th nearest distinct neighbor.
    return np.sort(d, axis=1)[:, k]


def prdc(real: np.ndarray, fake: np.ndarray, k: int = 3) -> dict:
    """Returns {"precision", "recall", "density", "coverage"}."""
    real = np.asarray(real, dtype=np.float64)
    fake = np.asarray(fake, dtype=np.float64)
    if real.ndim != 2 or fake.ndim != 2 or real.shape[1] != fake.shape[1]:
        raise ValueError(f"feature sets must be (n, d) with equal d, "
                         f"got {real.shape} and {fake.shape}")
    if k >= len(real) or k >= len(fake):
        raise ValueError(f"k={k} needs > k samples in both sets "
                         f"(got {len(real)} real, {len(fake)} fake)")
    real_radii = knn_radii(real, k)
    fake_radii = knn_radii(fake, k)
    d_rf = pairwise_distances(real, fake)

    inside_real_balls = d_rf <= real_radii[:, None]   # (n_real, n_fake)
    precision = float(inside_real_balls.any(axis=0).mean())
    recall = float((d_rf <= fake_radii[None, :]).any(axis=1).mean())
    density = float(inside_real_balls.sum(axis=0).mean() / k)
    coverage = float((d_rf.min(axis=1) <= real_radii).mean())
    return {"precision": precision, "recall": recall,
            "density": density, "coverage": coverage}
