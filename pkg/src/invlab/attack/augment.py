"""Scoring-time augmentation: random crop, bilinear resize, flip.

Used only to measure confidence robustly (never differentiated), so it
runs on plain numpy arrays. A crop of the full 32 px square with no
flip reproduces the input bit-exactly, which the identity tests rely
on.
"""

from __future__ import annotations

import numpy as np

CROP_MIN = 24
CROP_MAX = 32
OUT_SIZE = 32


def resize_bilinear(image: np.ndarray, out_size: int = OUT_SIZE) -> np.ndarray:
    """Resize one (C, H, W) image to (C, out, out), pixel-center aligned."""
    c, h, w = image.shape
    if h == out_size and w == out_size:
        return image.copy()

    def axis_coords(n_in, n_out):
        src = (np.arange(n_out) + 0.5) * n_in / n_out - 0.5
        i0 = np.clip(np.floor(src), 0, n_in - 1).astype(np.int64)
        i1 = np.clip(i0 + 1, 0, n_in - 1)
        frac = np.clip(src - i0, 0.0, 1.0)
        return i0, i1, frac.astype(image.dtype)

    r0, r1, rf = axis_coords(h, out_size)
    c0, c1, cf = axis_coords(w, out_size)
    rows = image[:, r0, :] * (1.0 - rf)[None, :, None] \
        + image[:, r1, :] * rf[None, :, None]
    return rows[:, :, c0] * (1.0 - cf)[None, None, :] \
        + rows[:, :, c1] * cf[None, None, :]


def augment(images: np.ndarray, seed: int) -> np.ndarray:
    """Randomly crop (24-32 px), resize back to 32, flip with p=0.5.

    Deterministic given the seed; one independent draw per image.
    """
    if images.ndim != 4 or images.shape[1:] != (3, OUT_SIZE, OUT_SIZE):
        raise ValueError(f"expected (B, 3, 32, 32) batch, got {images.shape}")
    rng = np.random.default_rng(seed)
    out = np.empty_like(images)
    for b, img in enumerate(images):
        size = int(rng.integers(CROP_MIN, CROP_MAX + 1))
        top = int(rng.integers(0, OUT_SIZE - size + 1))
        left = int(rng.integers(0, OUT_SIZE - size + 1))
        flip = rng.random() < 0.5
        view = resize_bilinear(img[:, top:top + size, left:left + size])
        out[b] = view[:, :, ::-1] if flip else view
    return out
