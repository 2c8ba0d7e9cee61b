"""Models: decomposable style generator, discriminator, classifiers,
training loops, and checkpointing."""

from .classifier import FEATURE_DIM, VARIANT_WIDTHS, Classifier
from .discriminator import Discriminator
from .generator import (BLOCK_LAYOUT, LATENT_DIM, STYLE_DIM, Generator,
                        MappingNetwork, SynthesisStack)
from .checkpoint import (load_classifier, load_prior, read_sidecar,
                         save_classifier, save_prior)
from .train import (TrainingDivergence, pixel_features, train_classifier,
                    train_prior)

__all__ = [
    "BLOCK_LAYOUT", "Classifier", "Discriminator", "FEATURE_DIM",
    "Generator", "LATENT_DIM", "MappingNetwork", "STYLE_DIM",
    "SynthesisStack", "TrainingDivergence", "VARIANT_WIDTHS",
    "load_classifier", "load_prior", "pixel_features", "read_sidecar",
    "save_classifier", "save_prior", "train_classifier", "train_prior",
]
