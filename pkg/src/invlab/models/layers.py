"""Parameterized layers shared by the generator, discriminator, and
classifiers. Parameters are float32 leaf tensors with stable names so
checkpoints stay readable."""

from __future__ import annotations

import numpy as np

from ..nn import Tensor, ops


class Linear:
    """Fully connected layer y = x W + b over (B, fan_in) rows."""

    def __init__(self, rng: np.random.Generator, fan_in: int, fan_out: int,
                 name: str, weight_scale: float | None = None):
        scale = weight_scale if weight_scale is not None \
            else np.sqrt(2.0 / fan_in)
        w = (rng.standard_normal((fan_in, fan_out)) * scale).astype(np.float32)
        self.weight = Tensor(w, requires_grad=True, name=f"{name}.weight")
        self.bias = Tensor(np.zeros(fan_out, dtype=np.float32),
                           requires_grad=True, name=f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.bias_add_rows(ops.matmul(x, self.weight), self.bias)

    def params(self) -> list:
        return [self.weight, self.bias]


class Conv2d:
    """3x3 (or 1x1) same-padding convolution with bias."""

    def __init__(self, rng: np.random.Generator, in_ch: int, out_ch: int,
                 name: str, kernel: int = 3):
        scale = np.sqrt(2.0 / (in_ch * kernel * kernel))
        w = (rng.standard_normal((out_ch, in_ch, kernel, kernel))
             * scale).astype(np.float32)
        self.weight = Tensor(w, requires_grad=True, name=f"{name}.weight")
        self.bias = Tensor(np.zeros(out_ch, dtype=np.float32),
                           requires_grad=True, name=f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.bias)

    def params(self) -> list:
        return [self.weight, self.bias]


def collect_named(params: list) -> dict:
    named = {}
    for p in params:
        if p.name is None or p.name in named:
            raise ValueError(f"parameter name missing or duplicated: {p.name!r}")
        named[p.name] = p
    return named


def load_named(params: list, state: dict) -> None:
    """Copy arrays from ``state`` into the named parameter tensors."""
    named = collect_named(params)
    missing = sorted(set(named) - set(state))
    if missing:
        raise KeyError(f"checkpoint missing parameters: {missing[:3]}")
    for name, tensor in named.items():
        arr = np.asarray(state[name], dtype=tensor.dtype)
        if arr.shape != tensor.shape:
            raise ValueError(f"parameter {name}: checkpoint shape {arr.shape} "
                             f"!= model shape {tensor.shape}")
        tensor.data = arr.copy()
