"""Fréchet distance between Gaussian fits of two feature sets.

    fid = ||mu_A - mu_B||^2 + Tr(C_A + C_B - 2 (C_A C_B)^{1/2})

The matrix square root is taken through the symmetrized product
S C_B S with S = C_A^{1/2}: it is similar to C_A C_B, so its (clamped)
eigenvalues give Tr((C_A C_B)^{1/2}) without forming a non-symmetric
root. Covariances get +1e-6 I; sets smaller than dim+1 samples are
additionally shrunk toward a scaled identity.
"""

from __future__ import annotations

import numpy as np

COV_REG = 1e-6


def _covariance(x: np.ndarray) -> np.ndarray:
    n, d = x.shape
    c = np.cov(x, rowvar=False).reshape(d, d)
    if n < d + 1:
        # Shrink toward the isotropic fit; weight fades with sample count.
        gamma = d / (d + n)
        mu = np.trace(c) / d
        c = (1.0 - gamma) * c + gamma * mu * np.eye(d)
    return c + COV_REG * np.eye(d)


def _sym_eigh_clamped(m: np.ndarray):
    vals, vecs = np.linalg.eigh((m + m.T) / 2.0)
    return np.maximum(vals, 0.0), vecs


def trace_sqrt_product(ca: np.ndarray, cb: np.ndarray) -> float:
    """Tr((ca cb)^{1/2}) for symmetric PSD ca, cb."""
    vals, vecs = _sym_eigh_clamped(ca)
    sqrt_ca = (vecs * np.sqrt(vals)) @ vecs.T
    inner_vals, _ = _sym_eigh_clamped(sqrt_ca @ cb @ sqrt_ca)
    return float(np.sqrt(inner_vals).sum())


def fid_from_moments(mu_a, ca, mu_b, cb) -> float:
    mean_term = float(np.sum((np.asarray(mu_a) - np.asarray(mu_b)) ** 2))
    trace_term = float(np.trace(ca) + np.trace(cb)) \
        - 2.0 * trace_sqrt_product(np.asarray(ca), np.asarray(cb))
    return mean_term + trace_term


def fid(features_a: np.ndarray, features_b: np.ndarray) -> float:
    """Fréchet distance between the Gaussian fits of two (n, d) sets."""
    a = np.asarray(features_a, dtype=np.float64)
    b = np.asarray(features_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError(f"feature sets must be (n, d) with equal d, "
                         f"got {a.shape} and {b.shape}")
    if len(a) < 2 or len(b) < 2:
        raise ValueError("fid needs at least 2 samples per set")
    return fid_from_moments(a.mean(axis=0), _covariance(a),
                            b.mean(axis=0), _covariance(b))
