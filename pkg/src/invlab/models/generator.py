"""Style-conditioned generator, decomposable into blocks.

The mapping network turns latent z into style w; the synthesis stack
grows a learned 4x4 constant to 32x32 through four conv blocks, each
modulated per-channel by an affine function of w, then maps to RGB with
a 1x1 conv and tanh. Prefix/suffix evaluation at any block boundary is
the structural hook the staged attack relies on: optimizing the feature
between a prefix and suffix must be exactly equivalent to cutting the
full forward pass at that point.
"""

from __future__ import annotations

import numpy as np

from ..nn import ShapeError, Tensor, ops
from ..seeds import rng_for
from .layers import Conv2d, Linear, collect_named, load_named

LATENT_DIM = 64
STYLE_DIM = 64

# (in_ch, out_ch, upsample) per synthesis block; 4x4 constant input.
BLOCK_LAYOUT = ((64, 64, False), (64, 64, True), (64, 48, True), (48, 32, True))
BASE_SIZE = 4
RGB_CHANNELS = 3


class MappingNetwork:
    """3 fully connected layers 64 -> 64 -> 64 -> 64, leaky-rectified."""

    def __init__(self, seed: int):
        rng = rng_for(seed, "mapping")
        self.layers = [Linear(rng, LATENT_DIM, STYLE_DIM, f"mapping.fc{i}")
                       for i in range(3)]

    def forward(self, z: Tensor) -> Tensor:
        h = z
        for layer in self.layers:
            h = ops.leaky_relu(layer(h))
        return h

    def map_np(self, z: np.ndarray) -> np.ndarray:
        """Untaped convenience mapping for numpy latents."""
        return self.forward(Tensor(z.astype(np.float32))).data

    def params(self) -> list:
        return [p for layer in self.layers for p in layer.params()]


class SynthesisBlock:
    """Optional 2x upsample, 3x3 conv, instance norm, per-sample style
    scale/shift from w, leaky rectifier."""

    def __init__(self, rng: np.random.Generator, in_ch: int, out_ch: int,
                 upsample: bool, name: str):
        self.upsample = upsample
        self.out_ch = out_ch
        self.conv = Conv2d(rng, in_ch, out_ch, f"{name}.conv")
        # Small-scale style affines: modulation starts near identity
        # (scale 1 + s with s ~ 0, shift ~ 0).
        self.style_scale = Linear(rng, STYLE_DIM, out_ch, f"{name}.style_scale",
                                  weight_scale=0.1 / np.sqrt(STYLE_DIM))
        self.style_shift = Linear(rng, STYLE_DIM, out_ch, f"{name}.style_shift",
                                  weight_scale=0.1 / np.sqrt(STYLE_DIM))

    def forward(self, x: Tensor, w: Tensor) -> Tensor:
        if self.upsample:
            x = ops.upsample2x(x)
        h = ops.instance_norm(self.conv(x))
        scale = ops.add(self.style_scale(w), 1.0)
        shift = self.style_shift(w)
        return ops.leaky_relu(ops.channel_affine(h, scale, shift))

    def params(self) -> list:
        return (self.conv.params() + self.style_scale.params()
                + self.style_shift.params())


class SynthesisStack:
    """Learned constant plus four style blocks and a tanh RGB head.

    Split points: prefix(w, i) returns the feature after block i
    (i=0 is the batch-tiled constant); suffix(f, w, i) resumes from
    there. i runs 0..4 for features; i=5 denotes the finished RGB image
    (prefix(w, 5) is the full forward, suffix at 5 is the identity).
    """

    def __init__(self, seed: int):
        rng = rng_for(seed, "synthesis")
        first_ch = BLOCK_LAYOUT[0][0]
        self.const = Tensor(
            rng.standard_normal((first_ch, BASE_SIZE, BASE_SIZE))
            .astype(np.float32),
            requires_grad=True, name="stack.const")
        self.blocks = [
            SynthesisBlock(rng, cin, cout, up, f"stack.block{i}")
            for i, (cin, cout, up) in enumerate(BLOCK_LAYOUT)
        ]
        self.to_rgb = Conv2d(rng, BLOCK_LAYOUT[-1][1], RGB_CHANNELS,
                             "stack.to_rgb", kernel=1)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def split_points(self) -> int:
        """Number of feature split points usable by the staged attack."""
        return len(self.blocks)

    def feature_shape(self, i: int) -> tuple:
        """Per-sample shape of the feature at split point i."""
        self._check_split(i, self.num_blocks + 1)
        if i == self.num_blocks + 1:
            return (RGB_CHANNELS, BASE_SIZE * 8, BASE_SIZE * 8)
        size, ch = BASE_SIZE, BLOCK_LAYOUT[0][0]
        for cin, cout, up in BLOCK_LAYOUT[:i]:
            size *= 2 if up else 1
            ch = cout
        return (ch, size, size)

    def _check_split(self, i: int, top: int) -> None:
        if not 0 <= i <= top:
            raise ValueError(f"split point {i} out of range [0, {top}]")

    def prefix(self, w: Tensor, i: int) -> Tensor:
        """Feature after block i for a style batch w (B, 64)."""
        self._check_split(i, self.num_blocks + 1)
        batch = w.shape[0]
        f = ops.tile_batch(self.const, batch)
        for block in self.blocks[:min(i, self.num_blocks)]:
            f = block.forward(f, w)
        if i == self.num_blocks + 1:
            f = self._rgb(f)
        return f

    def suffix(self, f: Tensor, w: Tensor, i: int) -> Tensor:
        """Image from the feature at split point i onward."""
        self._check_split(i, self.num_blocks + 1)
        expected = self.feature_shape(i)
        if f.shape[1:] != expected:
            raise ShapeError(f"suffix at split {i}: feature shape "
                             f"{f.shape[1:]} != expected {expected}")
        if i == self.num_blocks + 1:
            return f
        for block in self.blocks[i:]:
            f = block.forward(f, w)
        return self._rgb(f)

    def _rgb(self, f: Tensor) -> Tensor:
        return ops.tanh(self.to_rgb(f))

    def forward(self, w: Tensor) -> Tensor:
        return self.suffix(self.prefix(w, 0), w, 0)

    def synth_np(self, w: np.ndarray) -> np.ndarray:
        return self.forward(Tensor(w.astype(np.float32))).data

    def params(self) -> list:
        out = [self.const]
        for block in self.blocks:
            out.extend(block.params())
        out.extend(self.to_rgb.params())
        return out


class Generator:
    """Mapping network plus synthesis stack under one namespace."""

    def __init__(self, seed: int):
        self.mapping = MappingNetwork(seed)
        self.stack = SynthesisStack(seed)

    def generate_np(self, z: np.ndarray) -> np.ndarray:
        return self.stack.synth_np(self.mapping.map_np(z))

    def params(self) -> list:
        return self.mapping.params() + self.stack.params()

    def named_params(self) -> dict:
        return collect_named(self.params())

    def load_state(self, state: dict) -> None:
        load_named(self.params(), state)
