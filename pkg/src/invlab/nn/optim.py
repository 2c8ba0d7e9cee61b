"""Adam with bias correction.

The defaults match the attack's optimizer settings (lr 0.005 and very
low momentum, so each step mostly follows the sign of the current
gradient). Training code passes its own hyperparameters.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .tensor import NonFiniteGradientError, Tensor


class AdamState:
    """First/second moment buffers and step counter for one parameter."""

    __slots__ = ("m", "v", "t")

    def __init__(self, shape, dtype=np.float32):
        self.m = np.zeros(shape, dtype=dtype)
        self.v = np.zeros(shape, dtype=dtype)
        self.t = 0


def adam_step(param: Tensor, state: AdamState, lr: float = 0.005,
              beta1: float = 0.1, beta2: float = 0.1,
              eps: float = 1e-8) -> None:
    """Apply one Adam update to ``param`` in place from ``param.grad``."""
    g = param.grad
    if g is None:
        raise ValueError(f"adam_step: parameter {param.name!r} has no gradient")
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradientError(
            f"non-finite gradient for parameter {param.name!r}")
    state.t += 1
    state.m = beta1 * state.m + (1.0 - beta1) * g
    state.v = beta2 * state.v + (1.0 - beta2) * (g * g)
    m_hat = state.m / (1.0 - beta1 ** state.t)
    v_hat = state.v / (1.0 - beta2 ** state.t)
    param.data -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(param.dtype)


class Adam:
    """Convenience wrapper updating a fixed list of parameters."""

    def __init__(self, params: Iterable[Tensor], lr: float = 0.005,
                 betas: Sequence[float] = (0.1, 0.1), eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.states = [AdamState(p.shape, p.dtype) for p in self.params]

    def step(self) -> None:
        for p, s in zip(self.params, self.states):
            if p.grad is None:  # not part of the last graph; leave untouched
                continue
            adam_step(p, s, self.lr, self.beta1, self.beta2, self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None
