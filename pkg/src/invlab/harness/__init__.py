"""Experiment orchestration: config, stage runners, typed errors."""

from .config import (AttackSection, DataSection, EvaluateSection,
                     ExperimentConfig, MethodSpec, TrainSection, config_hash,
                     config_from_dict, load_config)
from .errors import (ArtifactMismatchError, ConfigError, HarnessError,
                     MissingArtifactError, TrainingFailedError)
from .stages import (ABLATION_AXES, echo_config, evaluate_images, run_ablate,
                     run_attack_stage, run_evaluate, run_gen_data, run_train)

__all__ = [
    "ABLATION_AXES", "ArtifactMismatchError", "AttackSection", "ConfigError",
    "DataSection", "EvaluateSection", "ExperimentConfig", "HarnessError",
    "MethodSpec", "MissingArtifactError", "TrainSection",
    "TrainingFailedError", "config_hash", "config_from_dict", "echo_config",
    "evaluate_images", "load_config", "run_ablate", "run_attack_stage",
    "run_evaluate", "run_gen_data", "run_train",
]
