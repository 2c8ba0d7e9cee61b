"""Attack success scores: top-k accuracy and nearest-feature distances."""

from __future__ import annotations

import numpy as np


def top_k_hits(logits: np.ndarray, targets: np.ndarray, k: int) -> np.ndarray:
    """Boolean per-sample: is the target among the k highest logits?

    Ties resolve by lower class index (stable sort on negated logits).
    """
    logits = np.asarray(logits)
    targets = np.asarray(targets, dtype=np.int64)
    if k < 1 or k > logits.shape[1]:
        raise ValueError(f"k={k} out of range for {logits.shape[1]} classes")
    top = np.argsort(-logits, axis=1, kind="stable")[:, :k]
    return (top == targets[:, None]).any(axis=1)


def acc_at_k(model, images: np.ndarray, targets: np.ndarray, k: int) -> float:
    """Fraction of images whose target class ranks in the model's top k."""
    return float(top_k_hits(model.logits(images), targets, k).mean())


def feature_distance(model, recon_images: np.ndarray, targets: np.ndarray,
                     private_images: np.ndarray, private_labels: np.ndarray,
                     reduce: str = "per_sample") -> float:
    """Mean shortest feature l2 distance to same-class private samples.

    reduce="per_sample" (default): average the per-reconstruction
    minima directly. reduce="per_class": average minima within each
    target class first, then across classes.
    """
    if reduce not in ("per_sample", "per_class"):
        raise ValueError(f"unknown reduce mode {reduce!r}")
    targets = np.asarray(targets, dtype=np.int64)
    labels = np.asarray(private_labels, dtype=np.int64)
    missing = sorted(set(targets.tolist()) - set(labels.tolist()))
    if missing:
        raise ValueError(f"target class {missing[0]} absent from private set")
    recon_feats = model.features(recon_images)
    priv_feats = model.features(private_images)
    minima = np.empty(len(recon_feats))
    for i, (feat, c) in enumerate(zip(recon_feats, targets)):
        pool = priv_feats[labels == c]
        minima[i] = np.sqrt(((pool - feat) ** 2).sum(axis=1)).min()
    if reduce == "per_sample":
        return float(minima.mean())
    classes = np.unique(targets)
    return float(np.mean([minima[targets == c].mean() for c in classes]))
