"""Stage runners: gen-data, train, attack, evaluate, ablate.

Each ``run_*`` takes the experiment config and an output directory,
reads whatever earlier stages left there, writes its own artifacts plus
a JSON summary, and returns that summary. The first stage to touch a
directory echoes the resolved config; later stages refuse to mix
artifacts produced under a different config hash.

Directory layout under the output root:

    config.json                      resolved config + hash + version
    data/{private,public}.{ifgt,json}  corpora and manifests
    models/{target,eval,indep,prior}.ifgt (+.json sidecars)
    attack/<method>/seed<r>/class_<c>/   result.json, recon.ifgt,
                                         final.ppm, snapshots/*.ppm
    evaluate/report.{csv,json}, comparison_<method>.ppm
    ablate/<axis>.{csv,json}
"""

from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..attack import latent_inversion, pixel_inversion, robust_confidence, run_attack
from ..data import (ShiftConfig, load_dataset, make_private_dataset,
                    make_public_dataset, save_dataset, write_ppm_grid)
from ..metrics import (MetricsReport, acc_at_k, feature_distance, fid, prdc,
                       write_report_csv, write_report_json)
from ..models import (TrainingDivergence, load_classifier, load_prior,
                      save_classifier, save_prior, train_classifier,
                      train_prior)
from ..nn import load_tensors, save_tensors
from ..seeds import derive_seed
from .config import ExperimentConfig, config_hash
from .errors import (ArtifactMismatchError, ConfigError, MissingArtifactError,
                     TrainingFailedError)

CONSTRAINT_SLACK = 1.0 + 1e-6
ABLATION_AXES = ("L", "radii", "decomposition")


# ------------------------------------------------------------- plumbing

def echo_config(cfg: ExperimentConfig, out, overwrite: bool = False) -> str:
    """Write (or verify) the config copy in the output root; returns hash.

    gen-data owns the directory and re-stamps it (overwrite=True); every
    later stage verifies instead, so artifacts produced under different
    configs never get mixed silently.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    h = config_hash(cfg)
    path = out / "config.json"
    doc = {"config": cfg.model_dump(mode="json"), "hash": h,
           "version": __version__}
    if path.exists() and not overwrite:
        existing = json.loads(path.read_text())
        if existing.get("hash") != h:
            raise ArtifactMismatchError(
                f"output dir {out} holds artifacts for config "
                f"{existing.get('hash', '?')[:12]}, current config is {h[:12]}",
                expected=existing.get("hash"), actual=h)
    else:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    return h


def _write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True))


def _finite_list(values) -> list:
    """JSON-safe copy of a numeric list: non-finite entries become None."""
    return [float(v) if math.isfinite(v) else None for v in values]


def _load_dataset_or_fail(out: Path, name: str):
    try:
        return load_dataset(out / "data", name)
    except FileNotFoundError:
        raise MissingArtifactError(
            f"{name} corpus not found under {out / 'data'}; run gen-data first",
            artifact=name)


def _load_classifier_or_fail(out: Path, which: str):
    path = out / "models" / f"{which}.ifgt"
    if not path.exists():
        raise MissingArtifactError(
            f"{which} classifier checkpoint missing at {path}; run train first",
            artifact=which)
    return load_classifier(path)


def _load_prior_or_fail(out: Path):
    path = out / "models" / "prior.ifgt"
    if not path.exists():
        raise MissingArtifactError(
            f"prior checkpoint missing at {path}; run train first",
            artifact="prior")
    return load_prior(path)


def _class_exemplars(tensors: dict, classes) -> dict:
    labels = tensors["train_labels"].astype(np.int64)
    return {c: tensors["train_images"][np.flatnonzero(labels == c)[0]]
            for c in classes}


# ------------------------------------------------------------- gen-data

def run_gen_data(cfg: ExperimentConfig, out) -> dict:
    out = Path(out)
    h = echo_config(cfg, out, overwrite=True)
    t0 = time.perf_counter()
    data_dir = out / "data"

    priv_manifest, priv = make_private_dataset(
        derive_seed(cfg.seed, "corpus", "private"),
        cfg.data.classes, cfg.data.per_class)
    save_dataset(data_dir, "private", priv_manifest, priv)

    shift = ShiftConfig(sigma=cfg.data.sigma, kind=cfg.data.shift_kind)
    pub_manifest, pub = make_public_dataset(
        derive_seed(cfg.seed, "corpus", "public"),
        cfg.data.public_size, shift)
    save_dataset(data_dir, "public", pub_manifest, pub)

    labels = priv["train_labels"].astype(np.int64)
    per_class = [priv["train_images"][np.flatnonzero(labels == c)[:8]]
                 for c in range(cfg.data.classes)]
    write_ppm_grid(data_dir / "private_samples.ppm",
                   np.concatenate(per_class), columns=8)
    write_ppm_grid(data_dir / "public_samples.ppm",
                   pub["images"][:64], columns=8)

    summary = {
        "stage": "gen-data", "config_hash": h,
        "elapsed_s": time.perf_counter() - t0,
        "private": json.loads(priv_manifest.to_json()),
        "public": json.loads(pub_manifest.to_json()),
    }
    _write_json(data_dir / "gen_data.json", summary)
    return summary


# ---------------------------------------------------------------- train

def run_train(cfg: ExperimentConfig, out, which=None) -> dict:
    out = Path(out)
    h = echo_config(cfg, out)
    which = tuple(which) if which is not None else cfg.train.which
    unknown = [w for w in which if w not in ("target", "eval", "indep", "prior")]
    if unknown:
        raise ConfigError(f"unknown model kinds {unknown}")
    models_dir = out / "models"
    models_dir.mkdir(parents=True, exist_ok=True)

    results = {}
    for kind in which:
        seed = derive_seed(cfg.seed, "train", kind)
        t0 = time.perf_counter()
        if kind == "prior":
            _, pub = _load_dataset_or_fail(out, "public")
            try:
                gen, disc, summary = train_prior(
                    pub["images"], epochs=cfg.train.prior_epochs, seed=seed,
                    batch_size=cfg.train.prior_batch, lr=cfg.train.prior_lr,
                    r1_gamma=cfg.train.r1_gamma,
                    r1_interval=cfg.train.r1_interval,
                    loss_kind=cfg.train.gan_loss)
            except TrainingDivergence as e:
                raise TrainingFailedError(f"prior training diverged: {e}",
                                          which="prior")
            summary = {**summary, "seed": seed, "config_hash": h,
                       "elapsed_s": time.perf_counter() - t0}
            save_prior(models_dir / "prior.ifgt", gen, disc, extra=summary)
        else:
            _, priv = _load_dataset_or_fail(out, "private")
            model, summary = train_classifier(
                priv, num_classes=cfg.data.classes, variant=kind, seed=seed,
                epochs=cfg.train.classifier_epochs,
                batch_size=cfg.train.classifier_batch,
                lr=cfg.train.classifier_lr)
            summary = {**summary, "seed": seed, "config_hash": h,
                       "elapsed_s": time.perf_counter() - t0}
            save_classifier(models_dir / f"{kind}.ifgt", model, extra=summary)
        results[kind] = summary

    doc = {"stage": "train", "config_hash": h, "models": results}
    _write_json(models_dir / "train.json", doc)
    return doc


# --------------------------------------------------------------- attack

def _constraint_violations(log) -> int:
    return sum(1 for e in log
               if e["f_ratio"] > CONSTRAINT_SLACK or e["w_ratio"] > CONSTRAINT_SLACK)


def _run_one_method(cfg: ExperimentConfig, method, target_model, generator,
                    target: int, seed: int):
    """Returns (final_images, snapshots, result_payload) for one class."""
    if method.kind == "ifgmi":
        acfg = cfg.attack.to_attack_config(depth=method.depth)
        res = run_attack(generator, target_model, target, acfg, seed)
        payload = {
            "attack_config": {
                "kind": "ifgmi", "depth": acfg.depth,
                "steps": list(acfg.steps), "rho": list(acfg.rho),
                "splits": list(acfg.stage_splits()),
                "candidates": acfg.candidates, "select": acfg.select,
                "n_aug": acfg.n_aug,
            },
            "scores": _finite_list(res.final_scores),
            "init_scores": _finite_list(res.init_scores),
            "chosen_stage": res.chosen_stage.tolist(),
            "stage_losses": [_finite_list(s) for s in res.stage_losses],
            "constraint_log": res.constraint_log,
            "constraint_violations": _constraint_violations(res.constraint_log),
            "failed": res.n_failed,
        }
        return res.final_images, res.snapshots, payload

    if method.kind == "pixel":
        images, losses = pixel_inversion(
            target_model, target, batch=cfg.attack.select,
            steps=cfg.attack.baseline_steps, lr=cfg.attack.lr,
            betas=(cfg.attack.beta1, cfg.attack.beta2), seed=seed)
    else:
        images, losses = latent_inversion(
            generator, target_model, target, batch=cfg.attack.select,
            steps=cfg.attack.baseline_steps, lr=cfg.attack.lr,
            betas=(cfg.attack.beta1, cfg.attack.beta2), seed=seed)
    scores = robust_confidence(target_model, images, target,
                               n_aug=cfg.attack.n_aug,
                               seed=derive_seed(seed, "basescore", target),
                               conf=cfg.attack.conf)
    payload = {
        "attack_config": {"kind": method.kind,
                          "steps": cfg.attack.baseline_steps,
                          "batch": cfg.attack.select},
        "scores": _finite_list(scores),
        "stage_losses": [_finite_list(losses)],
        "constraint_violations": 0,
        "failed": int(np.sum(~np.isfinite(images.reshape(len(images), -1))
                             .all(axis=1))),
    }
    return images, [images], payload


def run_attack_stage(cfg: ExperimentConfig, out) -> dict:
    out = Path(out)
    h = echo_config(cfg, out)
    target_model, _ = _load_classifier_or_fail(out, "target")
    if target_model.num_classes != cfg.data.classes:
        raise ArtifactMismatchError(
            f"target classifier has {target_model.num_classes} classes, "
            f"config expects {cfg.data.classes}")
    generator = None
    if any(m.kind != "pixel" for m in cfg.attack.methods):
        generator, _, _ = _load_prior_or_fail(out)

    attack_dir = out / "attack"
    targets = cfg.attack_targets()
    runs = []
    for method in cfg.attack.methods:
        label = method.label(cfg.attack.depth)
        for rep in range(cfg.attack.repeats):
            seed = derive_seed(cfg.seed, "attack", rep)
            t0 = time.perf_counter()
            failed = violations = 0
            for target in targets:
                class_dir = attack_dir / label / f"seed{rep}" / f"class_{target:02d}"
                images, snapshots, payload = _run_one_method(
                    cfg, method, target_model, generator, target, seed)
                save_tensors(class_dir / "recon.ifgt", {
                    "images": images,
                    "targets": np.full(len(images), target, dtype=np.float32),
                })
                for i, snap in enumerate(snapshots):
                    write_ppm_grid(class_dir / "snapshots" / f"stage_{i}.ppm",
                                   snap, columns=8)
                write_ppm_grid(class_dir / "final.ppm", images, columns=8)
                result = {
                    "target": target, "method": label, "rep": rep,
                    "seed": seed, "config_hash": h, **payload,
                }
                _write_json(class_dir / "result.json", result)
                failed += payload["failed"]
                violations += payload["constraint_violations"]
            runs.append({
                "method": label, "rep": rep, "seed": seed,
                "classes": list(targets), "failed": failed,
                "constraint_violations": violations,
                "elapsed_s": time.perf_counter() - t0,
            })

    doc = {"stage": "attack", "config_hash": h, "runs": runs}
    _write_json(attack_dir / "attack.json", doc)
    return doc


# ------------------------------------------------------------- evaluate

def evaluate_images(recon: np.ndarray, targets: np.ndarray, private: dict,
                    eval_model, indep_model, *, prdc_k: int = 3,
                    run_prdc: bool = True) -> MetricsReport:
    """Score one reconstruction set against the private corpus."""
    train_images = private["train_images"]
    train_labels = private["train_labels"].astype(np.int64)
    k5 = min(5, eval_model.num_classes)
    acc1 = acc_at_k(eval_model, recon, targets, 1)
    acc5 = acc_at_k(eval_model, recon, targets, k5)
    delta_eval = float(np.mean(feature_distance(
        eval_model, recon, targets, train_images, train_labels)))
    delta_indep = float(np.mean(feature_distance(
        indep_model, recon, targets, train_images, train_labels)))
    real_feats = eval_model.features(train_images).astype(np.float64)
    fake_feats = eval_model.features(recon).astype(np.float64)
    fid_value = fid(real_feats, fake_feats)
    if run_prdc:
        d = prdc(real_feats, fake_feats, k=prdc_k)
    else:
        d = {"precision": 0.0, "recall": 0.0, "density": 0.0, "coverage": 0.0}
    return MetricsReport(acc1=acc1, acc5=acc5, delta_eval=delta_eval,
                         delta_indep=delta_indep, fid=fid_value, **d)


def _load_recon(attack_dir: Path, label: str, rep: int, targets) -> tuple:
    images, labels = [], []
    for target in targets:
        path = attack_dir / label / f"seed{rep}" / f"class_{target:02d}" / "recon.ifgt"
        if not path.exists():
            raise MissingArtifactError(
                f"reconstructions missing at {path}; run attack first",
                artifact=str(path))
        tensors = load_tensors(path)
        images.append(tensors["images"])
        labels.append(tensors["targets"].astype(np.int64))
    return np.concatenate(images), np.concatenate(labels)


def run_evaluate(cfg: ExperimentConfig, out) -> dict:
    out = Path(out)
    h = echo_config(cfg, out)
    t0 = time.perf_counter()
    _, priv = _load_dataset_or_fail(out, "private")
    eval_model, _ = _load_classifier_or_fail(out, "eval")
    indep_model, _ = _load_classifier_or_fail(out, "indep")

    attack_dir = out / "attack"
    targets = cfg.attack_targets()
    exemplars = _class_exemplars(priv, targets)
    rows = []
    for method in cfg.attack.methods:
        label = method.label(cfg.attack.depth)
        for rep in range(cfg.attack.repeats):
            recon, recon_labels = _load_recon(attack_dir, label, rep, targets)
            report = evaluate_images(
                recon, recon_labels, priv, eval_model, indep_model,
                prdc_k=cfg.evaluate.prdc_k, run_prdc=cfg.evaluate.run_prdc)
            rows.append({"method": label, "sigma": cfg.data.sigma,
                         "seed": derive_seed(cfg.seed, "attack", rep),
                         **report.as_dict()})

        # Side-by-side grid: private exemplar first, reconstructions after,
        # one row per class (final repeat's images).
        cols = cfg.evaluate.grid_columns
        cells = []
        for target in targets:
            picks = recon[recon_labels == target][:cols - 1]
            row = [exemplars[target], *picks]
            row += [np.zeros_like(exemplars[target])] * (cols - len(row))
            cells.extend(row)
        write_ppm_grid(out / "evaluate" / f"comparison_{label}.ppm",
                       np.stack(cells), columns=cols)

    write_report_csv(out / "evaluate" / "report.csv", rows)
    doc = {
        "stage": "evaluate", "config_hash": h, "rows": rows,
        "provenance": {"config_hash": h, "version": __version__,
                       "seed": cfg.seed},
        "elapsed_s": time.perf_counter() - t0,
    }
    write_report_json(out / "evaluate" / "report.json", doc)
    return doc


# --------------------------------------------------------------- ablate

def _ablation_rows(cfg: ExperimentConfig, axis: str):
    """(value, AttackConfig) pairs for one sweep axis."""
    if axis == "L":
        if cfg.attack.depth < 3:
            raise ConfigError("the L sweep needs attack.depth >= 3 "
                              f"(got {cfg.attack.depth})")
        return [(depth, cfg.attack.to_attack_config(depth=depth))
                for depth in range(4)]
    if axis == "decomposition":
        return [(split, cfg.attack.to_attack_config(depth=1, splits=(split,)))
                for split in range(1, 5)]
    if axis == "radii":
        return [(scale, cfg.attack.to_attack_config(rho_scale=scale))
                for scale in cfg.attack.rho_scales]
    raise ConfigError(f"unknown ablation axis {axis!r}; "
                      f"expected one of {ABLATION_AXES}")


def run_ablate(cfg: ExperimentConfig, out, axis: str) -> dict:
    out = Path(out)
    row_specs = _ablation_rows(cfg, axis)  # reject bad axes before loading
    h = echo_config(cfg, out)
    t0 = time.perf_counter()
    target_model, _ = _load_classifier_or_fail(out, "target")
    eval_model, _ = _load_classifier_or_fail(out, "eval")
    generator, _, _ = _load_prior_or_fail(out)
    _, priv = _load_dataset_or_fail(out, "private")
    train_labels = priv["train_labels"].astype(np.int64)

    targets = cfg.attack_targets()
    rows = []
    for value, acfg in row_specs:
        per_rep = []
        for rep in range(cfg.attack.repeats):
            # Same per-rep seed for every row: sweep comparisons are paired.
            seed = derive_seed(cfg.seed, "attack", "ablate", rep)
            images, labels = [], []
            for target in targets:
                res = run_attack(generator, target_model, target, acfg, seed)
                images.append(res.final_images)
                labels.append(np.full(len(res.final_images), target,
                                      dtype=np.int64))
            recon = np.concatenate(images)
            recon_labels = np.concatenate(labels)
            per_rep.append({
                "acc1": acc_at_k(eval_model, recon, recon_labels, 1),
                "acc5": acc_at_k(eval_model, recon, recon_labels,
                                 min(5, eval_model.num_classes)),
                "delta_eval": float(np.mean(feature_distance(
                    eval_model, recon, recon_labels,
                    priv["train_images"], train_labels))),
            })
        rows.append({
            "axis": axis, "value": value, "repeats": cfg.attack.repeats,
            "acc1": float(np.mean([r["acc1"] for r in per_rep])),
            "acc5": float(np.mean([r["acc5"] for r in per_rep])),
            "delta_eval": float(np.mean([r["delta_eval"] for r in per_rep])),
            "per_rep": per_rep,
        })

    ablate_dir = out / "ablate"
    ablate_dir.mkdir(parents=True, exist_ok=True)
    with open(ablate_dir / f"{axis}.csv", "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["axis", "value", "repeats", "acc1", "acc5",
                            "delta_eval"], extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    doc = {"stage": "ablate", "axis": axis, "config_hash": h, "rows": rows,
           "elapsed_s": time.perf_counter() - t0}
    _write_json(ablate_dir / f"{axis}.json", doc)
    return doc
