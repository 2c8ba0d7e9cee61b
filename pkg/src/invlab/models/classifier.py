"""Identity classifiers: target, evaluation, and independent variants.

All three share the same topology (three conv+pool stages, a 64-d
penultimate feature layer, a linear head) but differ in trunk widths
and init seed, so their feature spaces are genuinely different models
of the same task.
"""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, ops
from ..seeds import rng_for
from .layers import Conv2d, Linear, collect_named, load_named

FEATURE_DIM = 64

VARIANT_WIDTHS = {
    "target": (32, 64, 96),
    "eval": (28, 56, 84),
    "indep": (40, 48, 72),
}


class Classifier:
    def __init__(self, num_classes: int, variant: str, seed: int):
        if variant not in VARIANT_WIDTHS:
            raise ValueError(f"unknown classifier variant {variant!r}; "
                             f"choose from {sorted(VARIANT_WIDTHS)}")
        self.num_classes = num_classes
        self.variant = variant
        self.seed = seed
        widths = VARIANT_WIDTHS[variant]
        rng = rng_for(seed, "classifier", variant)
        chans = (3,) + widths
        self.trunk = [Conv2d(rng, chans[i], chans[i + 1], f"cls.conv{i}")
                      for i in range(3)]
        flat_dim = widths[-1] * 4 * 4  # 32 -> 16 -> 8 -> 4 after 3 pools
        self.feature_layer = Linear(rng, flat_dim, FEATURE_DIM, "cls.feature")
        self.head = Linear(rng, FEATURE_DIM, num_classes, "cls.head")

    def forward_features(self, x: Tensor) -> Tensor:
        h = x
        for conv in self.trunk:
            h = ops.avg_pool2d(ops.leaky_relu(conv(h)))
        flat = ops.reshape(h, (h.shape[0], -1))
        return ops.leaky_relu(self.feature_layer(flat))

    def forward_logits(self, x: Tensor) -> Tensor:
        return self.head(self.forward_features(x))

    # numpy conveniences (no tape).
    def features(self, images: np.ndarray) -> np.ndarray:
        return self.forward_features(Tensor(np.asarray(images, dtype=np.float32))).data

    def logits(self, images: np.ndarray) -> np.ndarray:
        return self.forward_logits(Tensor(np.asarray(images, dtype=np.float32))).data

    def params(self) -> list:
        out = [p for conv in self.trunk for p in conv.params()]
        out.extend(self.feature_layer.params())
        out.extend(self.head.params())
        return out

    def named_params(self) -> dict:
        return collect_named(self.params())

    def load_state(self, state: dict) -> None:
        load_named(self.params(), state)
