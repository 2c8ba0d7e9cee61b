"""Convolutional discriminator with an exact input-gradient graph.

The net is piecewise linear (conv, leaky rectifier, average pool,
linear), so the gradient of its output w.r.t. the input image is itself
expressible with taped primitives: run the forward once to cache the
rectifier slopes, then replay the chain rule as explicit ops (transposed
convs via flipped kernels, pool backward as scaled upsample). Training
the R1 penalty then needs nothing beyond ordinary first-order backward
on that graph. The slope masks are treated as constants, which is exact
almost everywhere for a piecewise-linear net.
"""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, ops
from ..seeds import rng_for
from .layers import Conv2d, Linear, collect_named, load_named

# (in_ch, out_ch) per stage; each stage is conv3x3 -> lrelu -> avgpool.
STAGE_LAYOUT = ((3, 32), (32, 48), (48, 64), (64, 64))
FINAL_SPATIAL = 2  # 32 / 2^4
LRELU_ALPHA = 0.2


class Discriminator:
    def __init__(self, seed: int):
        rng = rng_for(seed, "discriminator")
        self.stages = [Conv2d(rng, cin, cout, f"disc.stage{i}.conv")
                       for i, (cin, cout) in enumerate(STAGE_LAYOUT)]
        flat_dim = STAGE_LAYOUT[-1][1] * FINAL_SPATIAL * FINAL_SPATIAL
        self.head = Linear(rng, flat_dim, 1, "disc.head")

    def forward_with_cache(self, x: Tensor):
        """Logits (B,) plus the rectifier-slope cache for input_gradient."""
        masks = []
        h = x
        for stage in self.stages:
            pre = stage(h)
            masks.append(np.where(pre.data >= 0, 1.0, LRELU_ALPHA)
                         .astype(np.float32))
            h = ops.avg_pool2d(ops.leaky_relu(pre, LRELU_ALPHA))
        batch = x.shape[0]
        flat = ops.reshape(h, (batch, -1))
        logits = ops.reshape(self.head(flat), (batch,))
        return logits, {"masks": masks, "batch": batch}

    def forward(self, x: Tensor) -> Tensor:
        logits, _ = self.forward_with_cache(x)
        return logits

    def logits_np(self, images: np.ndarray) -> np.ndarray:
        return self.forward(Tensor(images.astype(np.float32))).data

    def input_gradient(self, cache: dict) -> Tensor:
        """d logit / d input at the cached forward point, as a taped graph.

        Bias terms drop out; only conv/head weights and the cached
        slopes appear, so the result is differentiable in the weights.
        """
        batch = cache["batch"]
        ones = Tensor(np.ones((batch, 1), dtype=np.float32))
        g = ops.matmul(ones, ops.transpose(self.head.weight))
        ch = STAGE_LAYOUT[-1][1]
        g = ops.reshape(g, (batch, ch, FINAL_SPATIAL, FINAL_SPATIAL))
        for stage, mask in zip(reversed(self.stages),
                               reversed(cache["masks"])):
            g = ops.mul(ops.upsample2x(g), 0.25)          # avgpool backward
            g = ops.mul(g, Tensor(mask))                  # lrelu backward
            g = ops.conv2d(g, ops.flip_conv_weight(stage.weight))
        return g

    def r1_penalty(self, x: Tensor):
        """(logits, mean per-sample squared input-gradient norm)."""
        logits, cache = self.forward_with_cache(x)
        g = self.input_gradient(cache)
        penalty = ops.mul(ops.reduce_sum(ops.mul(g, g)), 1.0 / x.shape[0])
        return logits, penalty

    def params(self) -> list:
        out = [p for stage in self.stages for p in stage.params()]
        out.extend(self.head.params())
        return out

    def named_params(self) -> dict:
        return collect_named(self.params())

    def load_state(self, state: dict) -> None:
        load_named(self.params(), state)
