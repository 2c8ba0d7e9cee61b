"""Model persistence: tensor container plus a JSON sidecar."""

from __future__ import annotations

import json
from pathlib import Path

from ..nn.io import load_tensors, save_tensors
from .classifier import Classifier
from .discriminator import Discriminator
from .generator import Generator


def _sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def _write(path, named_params: dict, sidecar: dict) -> None:
    save_tensors(path, {name: p.data for name, p in named_params.items()})
    _sidecar_path(path).write_text(json.dumps(sidecar, indent=2,
                                              sort_keys=True))


def read_sidecar(path) -> dict:
    return json.loads(_sidecar_path(path).read_text())


def save_classifier(path, model: Classifier, extra: dict | None = None) -> None:
    sidecar = {"kind": "classifier", "variant": model.variant,
               "seed": model.seed, "num_classes": model.num_classes}
    sidecar.update(extra or {})
    _write(path, model.named_params(), sidecar)


def load_classifier(path):
    sidecar = read_sidecar(path)
    if sidecar.get("kind") != "classifier":
        raise ValueError(f"{path}: not a classifier checkpoint "
                         f"(kind={sidecar.get('kind')!r})")
    model = Classifier(sidecar["num_classes"], sidecar["variant"],
                       sidecar["seed"])
    model.load_state(load_tensors(path))
    return model, sidecar


def save_prior(path, generator: Generator, disc: Discriminator,
               extra: dict | None = None) -> None:
    sidecar = {"kind": "prior", "seed": extra.get("seed") if extra else None}
    sidecar.update(extra or {})
    named = dict(generator.named_params())
    named.update(disc.named_params())
    _write(path, named, sidecar)


def load_prior(path):
    sidecar = read_sidecar(path)
    if sidecar.get("kind") != "prior":
        raise ValueError(f"{path}: not a prior checkpoint "
                         f"(kind={sidecar.get('kind')!r})")
    seed = sidecar["seed"]
    generator = Generator(seed)
    disc = Discriminator(seed)
    state = load_tensors(path)
    generator.load_state(state)
    disc.load_state(state)
    return generator, disc, sidecar
