"""Procedural "identity" renderer.

Each identity is a soft-edged blob face: an elliptical head with two
eyes and a mouth over a flat background, all colored from a per-identity
palette. Geometry and palette are a deterministic function of
(corpus seed, identity id); every sample adds nuisance variation
(position jitter, lighting, background noise) from its own seed.

Distribution shift for the public corpus has two ingredients, scaled by
a single knob sigma in [0, 1]:

  * palette rotation — every palette color is rotated about the gray
    axis, so gray levels survive but hues move;
  * texture overlay — luminance stripes with per-sample orientation,
    frequency and phase.

Per-channel statistics can compensate a palette rotation, but the
stripes are spatially structured, which is what makes the strong-shift
setting genuinely hard for purely global (style-only) correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..seeds import rng_for

IMAGE_SIZE = 32
PARAM_DIM = 19

# Pixel-center coordinate grids in [0, 1], y down.
_YY, _XX = np.meshgrid((np.arange(IMAGE_SIZE) + 0.5) / IMAGE_SIZE,
                       (np.arange(IMAGE_SIZE) + 0.5) / IMAGE_SIZE,
                       indexing="ij")

GRAY_AXIS = np.ones(3) / np.sqrt(3.0)


@dataclass(frozen=True)
class IdentitySpec:
    """One identity: id plus its appearance parameter vector.

    Layout of ``params`` (all values in renderer units):
      0:2   face center (x, y)
      2:4   face radii (rx, ry)
      4:6   eye offset (dx, dy up from center)
      6     eye radius
      7     mouth half-width
      8     mouth drop below center
      9     mouth half-height
      10:13 skin RGB
      13:16 background RGB
      16:19 eye/mouth RGB
    """

    identity_id: int
    params: np.ndarray = field(repr=False)

    def palette(self) -> np.ndarray:
        """The three palette colors as rows of a (3, 3) array."""
        return self.params[10:19].reshape(3, 3)

    def with_palette(self, palette: np.ndarray) -> "IdentitySpec":
        params = self.params.copy()
        params[10:19] = np.clip(palette, 0.0, 1.0).reshape(-1)
        return IdentitySpec(self.identity_id, params)


@dataclass(frozen=True)
class ShiftConfig:
    """Distribution-shift knob for the public corpus.

    sigma=0 leaves the renderer distribution untouched. kind selects
    which ingredients are active; both are on by default.
    """

    sigma: float
    kind: str = "both"  # "palette" | "texture" | "both"
    max_angle: float = 2.0 * np.pi / 3.0
    texture_amp: float = 0.35

    def __post_init__(self):
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"shift sigma must be in [0, 1], got {self.sigma}")
        if self.kind not in ("palette", "texture", "both"):
            raise ValueError(f"unknown shift kind {self.kind!r}")

    @property
    def palette_angle(self) -> float:
        return self.max_angle * self.sigma if self.kind in ("palette", "both") else 0.0

    @property
    def stripe_amp(self) -> float:
        return self.texture_amp * self.sigma if self.kind in ("texture", "both") else 0.0


def rotate_palette(palette: np.ndarray, angle: float) -> np.ndarray:
    """Rotate colors (rows) about the gray axis by ``angle`` radians."""
    if angle == 0.0:
        return palette.copy()
    u = GRAY_AXIS
    ux = np.array([[0.0, -u[2], u[1]],
                   [u[2], 0.0, -u[0]],
                   [-u[1], u[0], 0.0]])
    rot = (np.cos(angle) * np.eye(3) + np.sin(angle) * ux
           + (1.0 - np.cos(angle)) * np.outer(u, u))
    return np.clip(palette @ rot.T, 0.0, 1.0)


def identity_spec(corpus_seed: int, identity_id: int) -> IdentitySpec:
    """Deterministic appearance parameters for one identity."""
    rng = rng_for(corpus_seed, "identity", identity_id)
    p = np.empty(PARAM_DIM)
    p[0:2] = rng.uniform(0.44, 0.56, 2)        # face center
    p[2:4] = rng.uniform(0.24, 0.36, 2)        # face radii
    p[4] = rng.uniform(0.09, 0.16)             # eye dx
    p[5] = rng.uniform(0.05, 0.13)             # eye dy (up)
    p[6] = rng.uniform(0.035, 0.065)           # eye radius
    p[7] = rng.uniform(0.08, 0.16)             # mouth half-width
    p[8] = rng.uniform(0.10, 0.18)             # mouth drop
    p[9] = rng.uniform(0.02, 0.045)            # mouth half-height
    # Warm skin tones and cool backgrounds: palette means sit off the
    # gray axis, so a palette rotation visibly moves the distribution.
    p[10:13] = rng.uniform((0.55, 0.40, 0.30), (0.95, 0.80, 0.70))  # skin
    p[13:16] = rng.uniform((0.05, 0.10, 0.20), (0.45, 0.50, 0.60))  # background
    p[16:19] = rng.uniform(0.0, 0.35, 3)                            # eyes/mouth
    return IdentitySpec(identity_id, p)


def _soft_mask(d2: np.ndarray, edge: float = 0.25) -> np.ndarray:
    # d2 is a squared normalized distance; 1 inside, 0 outside, smooth edge.
    return np.clip((1.0 - d2) / edge, 0.0, 1.0)


def render_identity_image(spec: IdentitySpec, sample_seed: int,
                          shift: ShiftConfig | None = None) -> np.ndarray:
    """Render one (3, 32, 32) float32 image with values in [-1, 1]."""
    rng = np.random.default_rng(sample_seed)
    p = spec.params
    if shift is not None and shift.palette_angle != 0.0:
        spec = spec.with_palette(rotate_palette(spec.palette(),
                                                shift.palette_angle))
        p = spec.params

    # Nuisance draws (fixed order keeps sample streams stable).
    jitter = rng.uniform(-0.03, 0.03, 2)
    lighting = rng.uniform(0.85, 1.15)
    radius_jitter = rng.uniform(-0.02, 0.02)
    noise = rng.normal(0.0, 0.03, (3, IMAGE_SIZE, IMAGE_SIZE))

    cx, cy = p[0] + jitter[0], p[1] + jitter[1]
    rx, ry = p[2] + radius_jitter, p[3] + radius_jitter
    skin, bg, dark = p[10:13], p[13:16], p[16:19]

    img = bg[:, None, None] + noise

    # Head with a vertical lighting ramp.
    d2 = ((_XX - cx) / rx) ** 2 + ((_YY - cy) / ry) ** 2
    head = _soft_mask(d2)
    shade = lighting * (1.0 - 0.35 * (_YY - cy))
    img = img * (1.0 - head) + (skin[:, None, None] * shade) * head

    # Eyes.
    for sx in (-1.0, 1.0):
        ex, ey = cx + sx * p[4], cy - p[5]
        e2 = ((_XX - ex) ** 2 + (_YY - ey) ** 2) / (p[6] ** 2)
        eye = _soft_mask(e2)
        img = img * (1.0 - eye) + dark[:, None, None] * eye

    # Mouth: soft rectangle below center.
    m2 = np.maximum(((_XX - cx) / p[7]) ** 2, ((_YY - cy - p[8]) / p[9]) ** 2)
    mouth = _soft_mask(m2)
    img = img * (1.0 - mouth) + dark[:, None, None] * mouth

    if shift is not None and shift.stripe_amp > 0.0:
        orient = rng.uniform(0.0, np.pi)
        freq = rng.uniform(2.5, 5.5)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        fx, fy = freq * np.cos(orient), freq * np.sin(orient)
        stripes = np.sin(2.0 * np.pi * (fx * _XX + fy * _YY) + phase)
        img = img + shift.stripe_amp * stripes[None, :, :]

    return np.clip(2.0 * img - 1.0, -1.0, 1.0).astype(np.float32)
