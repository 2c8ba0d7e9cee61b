"""Candidate scoring and selection around the optimization loop.

Confidence is always measured under augmentation (several random
crop/flip views, scores averaged) so that candidates which only fool
the classifier at one exact alignment do not win.
"""

from __future__ import annotations

import numpy as np

from ..models.generator import LATENT_DIM
from ..seeds import derive_seed
from .augment import augment

CONF_MODES = ("softmax", "logit")


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def robust_confidence(model, images: np.ndarray, target: int, *,
                      n_aug: int = 8, seed: int = 0, conf: str = "softmax",
                      augment_fn=augment) -> np.ndarray:
    """Mean target-class confidence over `n_aug` augmented views, per image."""
    if conf not in CONF_MODES:
        raise ValueError(f"unknown confidence mode {conf!r}, expected one of {CONF_MODES}")
    if n_aug < 1:
        raise ValueError("n_aug must be at least 1")
    total = np.zeros(images.shape[0], dtype=np.float64)
    for k in range(n_aug):
        views = augment_fn(images, derive_seed(seed, "aug", k))
        logits = model.logits(views)
        if conf == "softmax":
            total += _softmax_rows(logits)[:, target]
        else:
            total += logits[:, target]
    return total / n_aug


def initial_select(generator, model, target: int, *, candidates: int,
                   select: int, n_aug: int = 8, seed: int = 0,
                   conf: str = "softmax") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample candidate latents and keep the most confidently classified.

    Returns (w, scores, indices): the `select` style vectors ranked by
    descending robust confidence, their scores, and their positions in
    the original candidate draw. Ties keep the earlier candidate.
    """
    if candidates < 1 or select < 1:
        raise ValueError("candidates and select must be positive")
    if select > candidates:
        raise ValueError(f"cannot select {select} from {candidates} candidates")
    rng = np.random.default_rng(derive_seed(seed, "z"))
    z = rng.standard_normal((candidates, LATENT_DIM)).astype(np.float32)
    w = generator.mapping.map_np(z)
    images = generator.stack.synth_np(w)
    scores = robust_confidence(model, images, target, n_aug=n_aug,
                               seed=derive_seed(seed, "score"), conf=conf)
    order = np.argsort(-scores, kind="stable")[:select]
    return w[order], scores[order], order


def select_final(snapshots, model, target: int, *, strategy: str = "best-confidence",
                 n_aug: int = 8, seed: int = 0, conf: str = "softmax"):
    """Pick one image per candidate from the per-stage snapshots.

    "last" takes the deepest stage unconditionally; "best-confidence"
    rescores every stage under a shared set of augmentations and takes
    the per-candidate argmax (ties go to the earlier stage). Returns
    (images, chosen_stage, score_of_chosen).
    """
    if not snapshots:
        raise ValueError("no snapshots to select from")
    batch = snapshots[0].shape[0]
    if strategy == "last":
        images = snapshots[-1].copy()
        chosen = np.full(batch, len(snapshots) - 1, dtype=np.int64)
        score = robust_confidence(model, images, target, n_aug=n_aug,
                                  seed=derive_seed(seed, "final"), conf=conf)
        return images, chosen, score
    if strategy != "best-confidence":
        raise ValueError(f"unknown final selection strategy {strategy!r}")
    stage_scores = np.stack([
        robust_confidence(model, snap, target, n_aug=n_aug,
                          seed=derive_seed(seed, "final"), conf=conf)
        for snap in snapshots
    ])
    chosen = stage_scores.argmax(axis=0)
    rows = np.arange(batch)
    images = np.stack([snapshots[s][b] for b, s in zip(rows, chosen)])
    return images, chosen, stage_scores[chosen, rows]
