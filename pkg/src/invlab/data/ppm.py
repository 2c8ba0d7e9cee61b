"""Binary PPM (P6) export for visual inspection, dependency-free."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def to_uint8(image: np.ndarray) -> np.ndarray:
    """Map a (3, H, W) image from [-1, 1] to (H, W, 3) uint8."""
    if image.ndim != 3 or image.shape[0] != 3:
        raise ValueError(f"expected (3, H, W) image, got {image.shape}")
    scaled = (np.clip(image, -1.0, 1.0) + 1.0) * 127.5
    return np.round(scaled).astype(np.uint8).transpose(1, 2, 0)


def write_ppm(path, image: np.ndarray) -> None:
    """Write one (3, H, W) image in [-1, 1] as binary PPM."""
    rgb = to_uint8(image)
    h, w = rgb.shape[:2]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def image_grid(images: np.ndarray, columns: int = 8,
               pad: int = 1) -> np.ndarray:
    """Tile a (N, 3, H, W) batch into one (3, H', W') image.

    Cells are padded with mid-gray; incomplete last rows are filled
    with blank cells.
    """
    if images.ndim != 4 or images.shape[1] != 3:
        raise ValueError(f"expected (N, 3, H, W) batch, got {images.shape}")
    n, _, h, w = images.shape
    columns = max(1, min(columns, n))
    rows = (n + columns - 1) // columns
    grid = np.zeros((3, rows * (h + pad) + pad, columns * (w + pad) + pad),
                    dtype=np.float32)
    for idx in range(n):
        r, c = divmod(idx, columns)
        top = pad + r * (h + pad)
        left = pad + c * (w + pad)
        grid[:, top:top + h, left:left + w] = images[idx]
    return grid


def write_ppm_grid(path, images: np.ndarray, columns: int = 8) -> None:
    write_ppm(path, image_grid(images, columns))
