"""Reference attacks the staged method is compared against.

Pixel inversion optimizes the image directly (no generator), clamped to
the valid range after every step. Latent inversion optimizes z through
the full generator with an optional discriminator realism term; with
the weight at its default 0 it is plain whole-generator inversion.
"""

from __future__ import annotations

import numpy as np

from ..models.generator import LATENT_DIM
from ..nn import Adam, Tape, Tensor, backward, ops
from ..seeds import derive_seed
from .core import _freeze, _guarded_step, _live_mean, _mark_bad_rows, _restore, _scrub_grads
from .losses import poincare_loss

IMAGE_SHAPE = (3, 32, 32)


def pixel_inversion(model, target: int, *, batch: int, steps: int,
                    lr: float = 0.005, betas: tuple = (0.1, 0.1),
                    seed: int = 0):
    """Optimize raw pixels toward the target class. Returns (images, losses)."""
    rng = np.random.default_rng(derive_seed(seed, "pixel", target))
    x = Tensor(rng.uniform(-1.0, 1.0, (batch, *IMAGE_SHAPE)).astype(np.float32),
               requires_grad=True, name="attack.x")
    failed = np.zeros(batch, dtype=bool)
    frozen = _freeze(model.params())
    try:
        opt = Adam([x], lr=lr, betas=betas)
        losses = []
        for _ in range(steps):
            with Tape() as tape:
                per = poincare_loss(model.forward_logits(x), target)
                loss = ops.reduce_mean(per)
            _mark_bad_rows(per.data, failed)
            losses.append(_live_mean(per.data, failed))
            backward(tape, loss)
            _scrub_grads([x], failed)
            _guarded_step(opt, [x], failed)
            np.clip(x.data, -1.0, 1.0, out=x.data)
    finally:
        _restore(frozen)
    return x.data, losses


def latent_inversion(generator, model, target: int, *, batch: int, steps: int,
                     lr: float = 0.005, betas: tuple = (0.1, 0.1),
                     seed: int = 0, disc=None, realism_weight: float = 0.0):
    """Optimize latent z through the whole generator. Returns (images, losses).

    With realism_weight > 0 a discriminator must be supplied; its
    softplus(-logit) on the decoded image is added to the identity loss.
    """
    if realism_weight > 0.0 and disc is None:
        raise ValueError("realism_weight > 0 requires a discriminator")
    rng = np.random.default_rng(derive_seed(seed, "latent", target))
    z = Tensor(rng.standard_normal((batch, LATENT_DIM)).astype(np.float32),
               requires_grad=True, name="attack.z")
    failed = np.zeros(batch, dtype=bool)
    params = generator.params() + model.params()
    if disc is not None:
        params = params + disc.params()
    frozen = _freeze(params)
    try:
        opt = Adam([z], lr=lr, betas=betas)
        losses = []
        for _ in range(steps):
            with Tape() as tape:
                images = generator.stack.forward(generator.mapping.forward(z))
                per = poincare_loss(model.forward_logits(images), target)
                loss = ops.reduce_mean(per)
                if realism_weight > 0.0:
                    fake_score = ops.reduce_mean(ops.softplus(ops.neg(disc.forward(images))))
                    loss = ops.add(loss, ops.mul(fake_score, realism_weight))
            _mark_bad_rows(per.data, failed)
            losses.append(_live_mean(per.data, failed))
            backward(tape, loss)
            _scrub_grads([z], failed)
            _guarded_step(opt, [z], failed)
        final = generator.generate_np(z.data)
    finally:
        _restore(frozen)
    return final, losses
