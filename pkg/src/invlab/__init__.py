"""Desk-scale lab for intermediate-feature inversion attacks on
generative priors: synthetic corpora, small nets with taped autodiff,
the staged attack, baselines, and evaluation metrics."""

__version__ = "0.1.0"
