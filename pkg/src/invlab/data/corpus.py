"""Corpus assembly: labeled private dataset, shifted public dataset,
manifests, and persistence."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..nn.io import load_tensors, save_tensors
from ..seeds import derive_seed
from .render import IMAGE_SIZE, ShiftConfig, identity_spec, render_identity_image

# Public identities live far above any plausible private id range.
PUBLIC_ID_BASE = 10 ** 6


@dataclass(frozen=True)
class DatasetManifest:
    seed: int
    identity_count: int
    images_per_identity: int
    image_shape: tuple
    n_train: int
    n_test: int
    sigma: float
    shift_kind: str
    identity_base: int
    checksum: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "DatasetManifest":
        d = json.loads(text)
        d["image_shape"] = tuple(d["image_shape"])
        return DatasetManifest(**d)


def _checksum(arrays: dict) -> str:
    h = hashlib.sha256()
    for name in sorted(arrays):
        h.update(name.encode())
        h.update(np.ascontiguousarray(arrays[name]).tobytes())
    return h.hexdigest()


def make_private_dataset(seed: int, identity_count: int,
                         images_per_identity: int):
    """Labeled corpus with a stratified 80/20 train/test split.

    Returns (manifest, tensors) where tensors holds train_images,
    train_labels, test_images, test_labels.
    """
    K, n = identity_count, images_per_identity
    if K < 2:
        raise ValueError(f"need at least 2 identities, got {K}")
    if n < 20:
        raise ValueError(f"{n} images per identity is too small to split 80/20")
    n_test = n // 5
    n_train = n - n_test
    train_imgs, train_labels, test_imgs, test_labels = [], [], [], []
    for c in range(K):
        spec = identity_spec(seed, c)
        for j in range(n):
            img = render_identity_image(spec, derive_seed(seed, "sample", c, j))
            if j < n_train:
                train_imgs.append(img)
                train_labels.append(c)
            else:
                test_imgs.append(img)
                test_labels.append(c)
    tensors = {
        "train_images": np.stack(train_imgs),
        "train_labels": np.asarray(train_labels, dtype=np.float32),
        "test_images": np.stack(test_imgs),
        "test_labels": np.asarray(test_labels, dtype=np.float32),
    }
    manifest = DatasetManifest(
        seed=seed, identity_count=K, images_per_identity=n,
        image_shape=(3, IMAGE_SIZE, IMAGE_SIZE),
        n_train=K * n_train, n_test=K * n_test,
        sigma=0.0, shift_kind="none", identity_base=0,
        checksum=_checksum(tensors))
    return manifest, tensors


def make_public_dataset(seed: int, size: int, shift: ShiftConfig):
    """Unlabeled corpus from fresh identities, shifted by ``shift``.

    Identity ids start at PUBLIC_ID_BASE, disjoint from any private
    corpus. Returns (manifest, tensors) with a single "images" entry.
    """
    if size < 1:
        raise ValueError(f"public corpus size must be positive, got {size}")
    per_identity = 20
    K = max(2, (size + per_identity - 1) // per_identity)
    images = []
    for idx in range(size):
        c = PUBLIC_ID_BASE + idx % K
        spec = identity_spec(seed, c)
        images.append(render_identity_image(
            spec, derive_seed(seed, "sample", c, idx // K), shift))
    tensors = {"images": np.stack(images)}
    manifest = DatasetManifest(
        seed=seed, identity_count=K, images_per_identity=per_identity,
        image_shape=(3, IMAGE_SIZE, IMAGE_SIZE),
        n_train=size, n_test=0,
        sigma=shift.sigma, shift_kind=shift.kind,
        identity_base=PUBLIC_ID_BASE,
        checksum=_checksum(tensors))
    return manifest, tensors


def save_dataset(directory, name: str, manifest: DatasetManifest,
                 tensors: dict) -> Path:
    """Write {name}.ifgt plus {name}.json; returns the tensor path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tensor_path = directory / f"{name}.ifgt"
    save_tensors(tensor_path, tensors)
    (directory / f"{name}.json").write_text(manifest.to_json())
    return tensor_path


def load_dataset(directory, name: str):
    """Read back (manifest, tensors); verifies the checksum."""
    directory = Path(directory)
    manifest = DatasetManifest.from_json((directory / f"{name}.json").read_text())
    tensors = load_tensors(directory / f"{name}.ifgt")
    actual = _checksum(tensors)
    if actual != manifest.checksum:
        raise ValueError(f"checksum mismatch for {name}: manifest "
                         f"{manifest.checksum[:12]}…, file {actual[:12]}…")
    return manifest, tensors
