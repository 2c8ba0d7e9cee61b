"""Shared fixtures: one miniature experiment reused across test files.

The tiny pipeline (2 identities, 20 images each, a 2-epoch prior) runs
gen-data, train, and attack once per session; harness, service, and CLI
tests all read from that directory instead of re-training.
"""

import copy
import json

import pytest

TINY_CONFIG = {
    "seed": 11,
    "data": {"classes": 2, "per_class": 20, "public_size": 24,
             "sigma": 0.35},
    "train": {"classifier_epochs": 3, "prior_epochs": 2,
              "classifier_batch": 16, "prior_batch": 12},
    "attack": {"targets": [0, 1], "repeats": 1, "depth": 3,
               "steps": [3, 2, 2, 2], "rho": [0.5, 1.0, 1.5],
               "candidates": 8, "select": 3, "n_aug": 2,
               "rho_scales": [0.0, 1.0]},
    "evaluate": {"prdc_k": 1},
}


def tiny_config_doc() -> dict:
    return copy.deepcopy(TINY_CONFIG)


@pytest.fixture(scope="session")
def tiny_cfg():
    from invlab.harness import config_from_dict
    return config_from_dict(tiny_config_doc())


@pytest.fixture(scope="session")
def tiny_cfg_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "tiny.json"
    path.write_text(json.dumps(tiny_config_doc()))
    return path


@pytest.fixture(scope="session")
def tiny_run(tiny_cfg, tmp_path_factory):
    """Output dir holding data, models, and attack results."""
    from invlab.harness import run_attack_stage, run_gen_data, run_train
    out = tmp_path_factory.mktemp("tinyrun")
    run_gen_data(tiny_cfg, out)
    run_train(tiny_cfg, out)
    run_attack_stage(tiny_cfg, out)
    return out
