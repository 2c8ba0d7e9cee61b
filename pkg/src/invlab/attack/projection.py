"""Exact Euclidean projection onto an l1 ball around an anchor point.

Sort-based simplex projection: soft-threshold the offsets from the
anchor by the unique theta >= 0 that brings the l1 norm down to the
radius. Points already inside the ball pass through bit-identically.
"""

from __future__ import annotations

import numpy as np


def project_l1_ball(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Project each sample of `x` onto {p : ||p - center||_1 <= radius}.

    Both arrays share a shape whose first axis is the sample axis; the
    remaining axes are flattened per sample. A 1-D input is treated as
    a single sample. Returns a new array, input untouched.
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    if x.shape != center.shape:
        raise ValueError(f"shape mismatch: x {x.shape} vs center {center.shape}")

    single = x.ndim == 1
    rows = x.reshape(1, -1) if single else x.reshape(x.shape[0], -1)
    anchor = center.reshape(rows.shape)

    u = rows - anchor
    a = np.abs(u)
    norms = a.sum(axis=1)
    inside = norms <= radius
    if inside.all():
        return x.copy()
    if radius == 0.0:
        return center.astype(x.dtype, copy=True).reshape(x.shape)

    n = rows.shape[1]
    mu = np.sort(a, axis=1)[:, ::-1]
    cssv = np.cumsum(mu, axis=1) - radius
    counts = np.arange(1, n + 1, dtype=mu.dtype)
    # Largest j with mu_j > cssv_j / j; j = 1 qualifies whenever radius > 0.
    cond = mu * counts > cssv
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = np.maximum(cssv[np.arange(rows.shape[0]), rho] / (rho + 1), 0.0)
    shrunk = np.sign(u) * np.maximum(a - theta[:, None], 0.0)

    out = np.where(inside[:, None], rows, shrunk + anchor)
    return out.reshape(x.shape).astype(x.dtype, copy=False)


def l1_distances(x: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Per-sample l1 distance to the anchor, for constraint audits."""
    if x.shape != center.shape:
        raise ValueError(f"shape mismatch: x {x.shape} vs center {center.shape}")
    rows = x.reshape(1, -1) if x.ndim == 1 else x.reshape(x.shape[0], -1)
    return np.abs(rows - center.reshape(rows.shape)).sum(axis=1)
