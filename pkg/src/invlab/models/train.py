"""Training loops: cross-entropy classifiers and the adversarial prior."""

from __future__ import annotations

import numpy as np

from ..nn import Adam, Tape, Tensor, backward, ops
from ..seeds import rng_for
from .classifier import Classifier
from .discriminator import Discriminator
from .generator import LATENT_DIM, Generator


class TrainingDivergence(RuntimeError):
    """Adversarial training collapsed or produced non-finite losses."""


def _one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    eye = np.eye(num_classes, dtype=np.float32)
    return eye[np.asarray(labels, dtype=np.int64)]


def _cross_entropy(logits: Tensor, onehot: np.ndarray) -> Tensor:
    logp = ops.log_softmax(logits)
    picked = ops.reduce_sum(ops.mul(logp, Tensor(onehot)))
    return ops.mul(picked, -1.0 / len(onehot))


def _accuracy(model: Classifier, images: np.ndarray,
              labels: np.ndarray) -> float:
    pred = model.logits(images).argmax(axis=1)
    return float((pred == np.asarray(labels, dtype=np.int64)).mean())


def train_classifier(dataset: dict, num_classes: int, variant: str,
                     seed: int, epochs: int = 15, batch_size: int = 32,
                     lr: float = 1e-3):
    """Cross-entropy training on the private corpus.

    Returns (classifier, summary); summary flags models whose held-out
    accuracy is too low to anchor attack experiments.
    """
    model = Classifier(num_classes, variant, seed)
    images = dataset["train_images"]
    labels = dataset["train_labels"].astype(np.int64)
    rng = rng_for(seed, "classifier-train", variant)
    opt = Adam(model.params(), lr=lr, betas=(0.9, 0.999))
    n = len(images)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n - batch_size + 1, batch_size):
            idx = order[start:start + batch_size]
            x = Tensor(images[idx])
            onehot = _one_hot(labels[idx], num_classes)
            with Tape() as tape:
                loss = _cross_entropy(model.forward_logits(x), onehot)
            backward(tape, loss)
            opt.step()
            opt.zero_grad()
    test_acc = _accuracy(model, dataset["test_images"],
                         dataset["test_labels"].astype(np.int64))
    summary = {
        "variant": variant,
        "seed": seed,
        "epochs": epochs,
        "num_classes": num_classes,
        "train_accuracy": _accuracy(model, images, labels),
        "test_accuracy": test_acc,
        "usable": test_acc >= 0.5,
    }
    return model, summary


def pixel_features(images: np.ndarray) -> np.ndarray:
    """Block-pooled pixels (3x8x8 = 192 dims): a model-free feature map
    for tracking prior quality during/after GAN training."""
    n = images.shape[0]
    return images.reshape(n, 3, 8, 4, 8, 4).mean(axis=(3, 5)).reshape(n, -1)


def _sample_fid(generator: Generator, public: np.ndarray, rng, n: int = 512):
    from ..metrics import fid
    z = rng.standard_normal((n, LATENT_DIM)).astype(np.float32)
    samples = generator.generate_np(z)
    ref = public[:min(len(public), 2 * n)]
    return fid(pixel_features(samples), pixel_features(ref))


def _freeze(params, flag: bool) -> None:
    for p in params:
        p.requires_grad = flag


def train_prior(public_images: np.ndarray, epochs: int, seed: int,
                batch_size: int = 32, lr: float = 2e-3,
                betas=(0.0, 0.99), r1_gamma: float = 1.0,
                r1_interval: int = 8, loss_kind: str = "logistic",
                fid_ceiling: float | None = None,
                collapse_threshold: float = 1e-3,
                collapse_patience: int = 200):
    """Adversarial training of the prior on the public corpus.

    Returns (generator, discriminator, summary). Raises
    TrainingDivergence on collapse (discriminator loss pinned near zero
    for ``collapse_patience`` consecutive steps) or non-finite losses.
    """
    if loss_kind not in ("logistic", "hinge"):
        raise ValueError(f"unknown GAN loss kind {loss_kind!r}")
    generator = Generator(seed)
    disc = Discriminator(seed)
    rng = rng_for(seed, "prior-train")
    fid_before = _sample_fid(generator, public_images, rng)

    opt_g = Adam(generator.params(), lr=lr, betas=betas)
    opt_d = Adam(disc.params(), lr=lr, betas=betas)
    n = len(public_images)
    steps_per_epoch = max(1, n // batch_size)
    step = 0
    collapsed_streak = 0
    d_losses, g_losses = [], []

    def relu_mean(t: Tensor) -> Tensor:
        return ops.reduce_mean(ops.leaky_relu(t, 0.0))

    for _ in range(epochs):
        order = rng.permutation(n)
        for b in range(steps_per_epoch):
            real = public_images[order[b * batch_size:(b + 1) * batch_size]]
            if len(real) < batch_size:
                continue

            # Discriminator step; fakes are generated outside the tape.
            z = rng.standard_normal((batch_size, LATENT_DIM)).astype(np.float32)
            fake = generator.generate_np(z)
            with_r1 = r1_gamma > 0 and step % r1_interval == 0
            with Tape() as tape:
                x_real = Tensor(real)
                if with_r1:
                    logits_real, penalty = disc.r1_penalty(x_real)
                else:
                    logits_real = disc.forward(x_real)
                logits_fake = disc.forward(Tensor(fake))
                if loss_kind == "logistic":
                    d_loss = ops.add(
                        ops.reduce_mean(ops.softplus(ops.neg(logits_real))),
                        ops.reduce_mean(ops.softplus(logits_fake)))
                else:
                    d_loss = ops.add(relu_mean(ops.sub(1.0, logits_real)),
                                     relu_mean(ops.add(1.0, logits_fake)))
                if with_r1:
                    d_loss = ops.add(d_loss,
                                     ops.mul(penalty, 0.5 * r1_gamma))
            d_value = d_loss.item()
            if not np.isfinite(d_value):
                raise TrainingDivergence(
                    f"non-finite discriminator loss at step {step}")
            backward(tape, d_loss)
            opt_d.step()
            opt_d.zero_grad()

            # Generator step; discriminator weights are frozen.
            z = rng.standard_normal((batch_size, LATENT_DIM)).astype(np.float32)
            _freeze(disc.params(), False)
            with Tape() as tape:
                img = generator.stack.forward(
                    generator.mapping.forward(Tensor(z)))
                logits = disc.forward(img)
                if loss_kind == "logistic":
                    g_loss = ops.reduce_mean(ops.softplus(ops.neg(logits)))
                else:
                    g_loss = ops.neg(ops.reduce_mean(logits))
            _freeze(disc.params(), True)
            g_value = g_loss.item()
            if not np.isfinite(g_value):
                raise TrainingDivergence(
                    f"non-finite generator loss at step {step}")
            backward(tape, g_loss)
            opt_g.step()
            opt_g.zero_grad()

            d_losses.append(d_value)
            g_losses.append(g_value)
            collapsed_streak = collapsed_streak + 1 \
                if d_value < collapse_threshold else 0
            if collapsed_streak >= collapse_patience:
                raise TrainingDivergence(
                    f"discriminator loss below {collapse_threshold} for "
                    f"{collapse_patience} consecutive steps (last at step "
                    f"{step}); generator loss {g_value:.3f}")
            step += 1

    fid_after = _sample_fid(generator, public_images, rng)
    summary = {
        "seed": seed,
        "epochs": epochs,
        "steps": step,
        "loss_kind": loss_kind,
        "fid_untrained": float(fid_before),
        "fid_final": float(fid_after),
        "d_loss_final": float(np.mean(d_losses[-50:])) if d_losses else None,
        "g_loss_final": float(np.mean(g_losses[-50:])) if g_losses else None,
    }
    if fid_ceiling is not None and fid_after > fid_ceiling:
        raise TrainingDivergence(
            f"prior FID {fid_after:.2f} above the configured ceiling "
            f"{fid_ceiling:.2f}")
    return generator, disc, summary
