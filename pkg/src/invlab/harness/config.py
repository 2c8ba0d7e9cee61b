"""Experiment configuration: one JSON document, defaults embedded.

Everything an experiment needs hangs off ExperimentConfig under a
single master seed; stage seeds are derived by labeled hashing so any
stage can be re-run on its own and still land on the same numbers. The
canonical hash of the resolved config is echoed into every output
directory for provenance.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..attack import AttackConfig
from .errors import ConfigError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DataSection(_Section):
    classes: int = 10
    per_class: int = 50
    public_size: int = 600
    sigma: float = 0.35
    shift_kind: Literal["palette", "texture", "both"] = "both"


class TrainSection(_Section):
    which: Tuple[Literal["target", "eval", "indep", "prior"], ...] = (
        "target", "eval", "indep", "prior")
    classifier_epochs: int = 15
    classifier_batch: int = 32
    classifier_lr: float = 1e-3
    prior_epochs: int = 80
    prior_batch: int = 32
    prior_lr: float = 2e-3
    r1_gamma: float = 1.0
    r1_interval: int = 8
    gan_loss: Literal["logistic", "hinge"] = "logistic"

    @model_validator(mode="after")
    def _check(self):
        if not self.which:
            raise ValueError("train.which must name at least one model")
        if len(set(self.which)) != len(self.which):
            raise ValueError("train.which contains duplicates")
        return self


class MethodSpec(_Section):
    kind: Literal["pixel", "latent", "ifgmi"]
    depth: Optional[int] = None  # ifgmi only; None means attack.depth

    @model_validator(mode="after")
    def _check(self):
        if self.depth is not None and self.kind != "ifgmi":
            raise ValueError(f"depth only applies to ifgmi, not {self.kind}")
        return self

    def label(self, default_depth: int) -> str:
        if self.kind != "ifgmi":
            return self.kind
        depth = self.depth if self.depth is not None else default_depth
        return f"ifgmi-l{depth}"


class AttackSection(_Section):
    methods: Tuple[MethodSpec, ...] = (
        MethodSpec(kind="pixel"), MethodSpec(kind="latent"),
        MethodSpec(kind="ifgmi"))
    targets: Optional[Tuple[int, ...]] = None  # None: every private class
    repeats: int = 1
    depth: int = 3
    steps: Tuple[int, ...] = (40, 10, 10, 10)
    rho: Tuple[float, ...] = (0.5, 1.0, 1.5)
    splits: Optional[Tuple[int, ...]] = None
    candidates: int = 200
    select: int = 20
    n_aug: int = 8
    lr: float = 0.005
    beta1: float = 0.1
    beta2: float = 0.1
    final_selection: Literal["best-confidence", "last"] = "best-confidence"
    conf: Literal["softmax", "logit"] = "softmax"
    rho_scales: Tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)

    @model_validator(mode="after")
    def _check(self):
        if self.repeats < 1:
            raise ValueError("attack.repeats must be at least 1")
        if not self.methods:
            raise ValueError("attack.methods must not be empty")
        # Exact lengths here; to_attack_config truncates only for overrides.
        if len(self.steps) != self.depth + 1:
            raise ValueError(f"attack.steps needs depth+1={self.depth + 1} "
                             f"entries, got {len(self.steps)}")
        if len(self.rho) != self.depth:
            raise ValueError(f"attack.rho needs depth={self.depth} entries, "
                             f"got {len(self.rho)}")
        if self.splits is not None and len(self.splits) != self.depth:
            raise ValueError(f"attack.splits needs depth={self.depth} "
                             f"entries, got {len(self.splits)}")
        self.to_attack_config()  # surfaces remaining inconsistencies early
        return self

    def to_attack_config(self, depth: Optional[int] = None,
                         splits: Optional[Tuple[int, ...]] = None,
                         rho_scale: Optional[float] = None) -> AttackConfig:
        """Build the attack module's config, optionally overridden.

        A depth override truncates steps/rho to their first entries,
        which is how the L-sweep walks shallower variants of one base
        configuration.
        """
        d = self.depth if depth is None else depth
        if d > self.depth:
            raise ValueError(f"depth {d} exceeds configured depth {self.depth}")
        rho = self.rho[:d]
        if rho_scale is not None:
            rho = tuple(rho_scale * r for r in rho)
        if splits is None and self.splits is not None:
            splits = self.splits[:d]
        return AttackConfig(
            depth=d, steps=self.steps[:d + 1], rho=rho, splits=splits,
            candidates=self.candidates, select=self.select, n_aug=self.n_aug,
            lr=self.lr, betas=(self.beta1, self.beta2),
            final_selection=self.final_selection, conf=self.conf)

    @property
    def baseline_steps(self) -> int:
        """Optimization budget for the single-stage baselines."""
        return int(sum(self.steps))


class EvaluateSection(_Section):
    prdc_k: int = 3
    run_prdc: bool = True
    grid_columns: int = 8

    @model_validator(mode="after")
    def _check(self):
        if self.prdc_k < 1:
            raise ValueError("evaluate.prdc_k must be at least 1")
        if self.grid_columns < 2:
            raise ValueError("evaluate.grid_columns must be at least 2")
        return self


class ExperimentConfig(_Section):
    seed: int = 0
    data: DataSection = Field(default_factory=DataSection)
    train: TrainSection = Field(default_factory=TrainSection)
    attack: AttackSection = Field(default_factory=AttackSection)
    evaluate: EvaluateSection = Field(default_factory=EvaluateSection)

    @model_validator(mode="after")
    def _check(self):
        if self.attack.targets is not None:
            bad = [t for t in self.attack.targets
                   if not 0 <= t < self.data.classes]
            if bad:
                raise ValueError(f"attack.targets {bad} outside "
                                 f"[0, {self.data.classes})")
        return self

    def attack_targets(self) -> Tuple[int, ...]:
        return self.attack.targets if self.attack.targets is not None \
            else tuple(range(self.data.classes))


def config_hash(cfg: ExperimentConfig) -> str:
    canon = json.dumps(cfg.model_dump(mode="json"), sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def config_from_dict(doc: Optional[dict], seed: Optional[int] = None) -> ExperimentConfig:
    """Validate a config document (None: all defaults); `seed` overrides."""
    doc = dict(doc) if doc is not None else {}
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    if seed is not None:
        doc["seed"] = seed
    try:
        return ExperimentConfig.model_validate(doc)
    except ValueError as e:
        raise ConfigError(f"invalid config: {e}")


def load_config(path=None, seed: Optional[int] = None) -> ExperimentConfig:
    """Read a config JSON file (or take all defaults); `seed` overrides."""
    doc = None
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}", path=str(p))
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}", path=str(p))
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object",
                              path=str(p))
    return config_from_dict(doc, seed)
