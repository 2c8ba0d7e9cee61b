"""Numeric core: tensors, taped autodiff, primitives, Adam, tensor files."""

from . import ops
from .io import TensorFileError, load_tensors, save_tensors
from .optim import Adam, AdamState, adam_step
from .tensor import (NonFiniteGradientError, ShapeError, Tape, Tensor,
                     active_tape, backward)

__all__ = [
    "Adam", "AdamState", "NonFiniteGradientError", "ShapeError", "Tape",
    "Tensor", "TensorFileError", "active_tape", "adam_step", "backward",
    "load_tensors", "ops", "save_tensors",
]
