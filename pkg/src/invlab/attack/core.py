"""Staged feature-space inversion against a trained generator.

The generator is cut at a sequence of split points. Stage 0 optimizes
the style vector w freely; each later stage re-opens the feature f at
its split point and optimizes (f, w) jointly, with both kept inside an
l1 ball around their stage anchors by exact projection after every
optimizer step. The anchor for the next stage is the optimized feature
pushed through the intervening blocks, so the search space widens with
depth while each stage stays local.

Per-candidate bookkeeping is strict: a candidate whose loss or
gradient goes non-finite is frozen at its last valid state and flagged,
never silently dropped or allowed to poison the shared batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn import Adam, Tape, Tensor, backward, ops
from ..seeds import derive_seed
from .losses import poincare_loss
from .projection import l1_distances, project_l1_ball
from .selection import initial_select, select_final

DEFAULT_STEPS = (40, 10, 10, 10)
DEFAULT_RHO = (0.5, 1.0, 1.5)


@dataclass(frozen=True)
class AttackConfig:
    """Knobs for one staged attack run.

    depth is the number of constrained feature stages (0 = style-only
    optimization). steps has one entry per stage including the style
    stage; rho has one per feature stage, and the actual l1 radius at a
    stage is rho times the flattened feature dimension there. splits
    picks which block boundaries the stages use (defaults to 1..depth).
    """

    depth: int = 3
    steps: tuple = DEFAULT_STEPS
    rho: tuple = DEFAULT_RHO
    splits: tuple | None = None
    candidates: int = 200
    select: int = 20
    n_aug: int = 8
    lr: float = 0.005
    betas: tuple = (0.1, 0.1)
    final_selection: str = "best-confidence"
    conf: str = "softmax"

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if len(self.steps) != self.depth + 1:
            raise ValueError(f"need {self.depth + 1} step counts for depth "
                             f"{self.depth}, got {len(self.steps)}")
        if any(s < 0 for s in self.steps):
            raise ValueError("step counts must be non-negative")
        if len(self.rho) != self.depth:
            raise ValueError(f"need {self.depth} radius factors for depth "
                             f"{self.depth}, got {len(self.rho)}")
        if any(r < 0 for r in self.rho):
            raise ValueError("radius factors must be non-negative")
        if any(a > b for a, b in zip(self.rho, self.rho[1:])):
            raise ValueError(f"radius factors must be non-decreasing, got {self.rho}")
        if self.splits is not None:
            if len(self.splits) != self.depth:
                raise ValueError(f"need {self.depth} split points, got "
                                 f"{len(self.splits)}")
            if any(s < 1 for s in self.splits):
                raise ValueError("split points start at 1")
            if any(a >= b for a, b in zip(self.splits, self.splits[1:])):
                raise ValueError("split points must be strictly increasing")
        if not 1 <= self.select <= self.candidates:
            raise ValueError(f"select must be in [1, candidates], got "
                             f"{self.select} of {self.candidates}")
        if self.n_aug < 1:
            raise ValueError("n_aug must be at least 1")

    def stage_splits(self) -> tuple:
        return self.splits if self.splits is not None \
            else tuple(range(1, self.depth + 1))


@dataclass
class AttackResult:
    """Everything one attack run produced, per candidate."""

    target: int
    config: AttackConfig
    w_init: np.ndarray
    init_scores: np.ndarray
    snapshots: list            # depth+1 image batches, one per stage
    final_images: np.ndarray
    chosen_stage: np.ndarray
    final_scores: np.ndarray
    stage_losses: list         # per stage, per step: mean loss over live candidates
    constraint_log: list = field(default_factory=list)
    failed: np.ndarray = None

    @property
    def n_failed(self) -> int:
        return int(self.failed.sum())


def _mark_bad_rows(per_sample: np.ndarray, failed: np.ndarray) -> None:
    np.logical_or(failed, ~np.isfinite(per_sample), out=failed)


def _scrub_grads(params, failed: np.ndarray) -> None:
    """Flag rows with non-finite gradients, then zero every failed row.

    A parameter with grad None sat outside the last graph (styles when
    the remaining suffix has no modulated block); it is skipped here and
    by the optimizer, so it simply stays put.
    """
    live = [p for p in params if p.grad is not None]
    for p in live:
        rows = ~np.isfinite(p.grad.reshape(p.grad.shape[0], -1)).all(axis=1)
        np.logical_or(failed, rows, out=failed)
    for p in live:
        p.grad[failed] = 0.0


def _guarded_step(opt, params, failed: np.ndarray) -> None:
    """Optimizer step that leaves failed candidates exactly in place."""
    saved = [p.data[failed].copy() for p in params] if failed.any() else None
    opt.step()
    if saved is not None:
        for p, s in zip(params, saved):
            p.data[failed] = s


def _live_mean(per_sample: np.ndarray, failed: np.ndarray) -> float:
    live = per_sample[~failed]
    return float(live.mean()) if live.size else float("nan")


def _freeze(params):
    flags = [(p, p.requires_grad) for p in params]
    for p in params:
        p.requires_grad = False
    return flags


def _restore(flags):
    for p, flag in flags:
        p.requires_grad = flag


def optimize_style(stack, model, w0: np.ndarray, target: int, *,
                   steps: int, lr: float, betas: tuple,
                   failed: np.ndarray | None = None):
    """Stage 0: unconstrained optimization of the style batch."""
    w = Tensor(np.array(w0, dtype=np.float32), requires_grad=True, name="attack.w")
    if failed is None:
        failed = np.zeros(w.shape[0], dtype=bool)
    opt = Adam([w], lr=lr, betas=betas)
    losses = []
    for _ in range(steps):
        with Tape() as tape:
            logits = model.forward_logits(stack.forward(w))
            per = poincare_loss(logits, target)
            loss = ops.reduce_mean(per)
        _mark_bad_rows(per.data, failed)
        losses.append(_live_mean(per.data, failed))
        backward(tape, loss)
        _scrub_grads([w], failed)
        _guarded_step(opt, [w], failed)
    return w.data, losses, failed


def optimize_feature_stages(stack, model, w_start: np.ndarray, target: int,
                            config: AttackConfig, *,
                            failed: np.ndarray | None = None,
                            constraint_log: list | None = None):
    """Stages 1..depth of the staged attack.

    Returns (snapshots, stage_losses, failed): one rendered image batch
    per stage (the last one is the attack output) plus loss traces.
    """
    splits = config.stage_splits()
    if splits and splits[-1] > stack.num_blocks:
        raise ValueError(f"split point {splits[-1]} beyond last block "
                         f"{stack.num_blocks}")
    if failed is None:
        failed = np.zeros(w_start.shape[0], dtype=bool)

    w_cur = np.array(w_start, dtype=np.float32)
    snapshots, stage_losses = [], []
    if not splits:
        return snapshots, stage_losses, failed

    f_anchor = stack.prefix(Tensor(w_cur), splits[0]).data
    for k, split in enumerate(splits):
        radius = float(config.rho[k] * np.prod(stack.feature_shape(split)))
        w_anchor = w_cur.copy()
        f = Tensor(f_anchor.copy(), requires_grad=True, name=f"attack.f{split}")
        w = Tensor(w_cur.copy(), requires_grad=True, name="attack.w")
        opt = Adam([f, w], lr=config.lr, betas=config.betas)
        losses = []
        for step in range(config.steps[k + 1]):
            with Tape() as tape:
                logits = model.forward_logits(stack.suffix(f, w, split))
                per = poincare_loss(logits, target)
                loss = ops.reduce_mean(per)
            _mark_bad_rows(per.data, failed)
            losses.append(_live_mean(per.data, failed))
            backward(tape, loss)
            _scrub_grads([f, w], failed)
            _guarded_step(opt, [f, w], failed)
            f.data = project_l1_ball(f.data, f_anchor, radius)
            w.data = project_l1_ball(w.data, w_anchor, radius)
            if constraint_log is not None:
                scale = max(radius, 1e-12)
                constraint_log.append({
                    "stage": k + 1, "split": split, "step": step,
                    "radius": radius,
                    "f_ratio": float(l1_distances(f.data, f_anchor).max() / scale),
                    "w_ratio": float(l1_distances(w.data, w_anchor).max() / scale),
                })
        stage_losses.append(losses)
        snapshots.append(stack.suffix(Tensor(f.data), Tensor(w.data), split).data)
        w_cur = w.data
        if k + 1 < len(splits):
            h, wt = Tensor(f.data), Tensor(w_cur)
            for block in stack.blocks[split:splits[k + 1]]:
                h = block.forward(h, wt)
            f_anchor = h.data
    return snapshots, stage_losses, failed


def run_attack(generator, model, target: int, config: AttackConfig,
               seed: int) -> AttackResult:
    """Full pipeline for one target class: select, optimize, choose."""
    frozen = _freeze(generator.params() + model.params())
    try:
        w0, init_scores, _ = initial_select(
            generator, model, target, candidates=config.candidates,
            select=config.select, n_aug=config.n_aug,
            seed=derive_seed(seed, "init", target), conf=config.conf)

        w1, style_losses, failed = optimize_style(
            generator.stack, model, w0, target,
            steps=config.steps[0], lr=config.lr, betas=config.betas)
        stage_losses = [style_losses]
        snapshots = [generator.stack.synth_np(w1)]

        constraint_log: list = []
        feature_snaps, feature_losses, failed = optimize_feature_stages(
            generator.stack, model, w1, target, config,
            failed=failed, constraint_log=constraint_log)
        snapshots.extend(feature_snaps)
        stage_losses.extend(feature_losses)

        final_images, chosen, final_scores = select_final(
            snapshots, model, target, strategy=config.final_selection,
            n_aug=config.n_aug, seed=derive_seed(seed, "final", target),
            conf=config.conf)
    finally:
        _restore(frozen)
    return AttackResult(
        target=target, config=config, w_init=w0, init_scores=init_scores,
        snapshots=snapshots, final_images=final_images, chosen_stage=chosen,
        final_scores=final_scores, stage_losses=stage_losses,
        constraint_log=constraint_log, failed=failed)
