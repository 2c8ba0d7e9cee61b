"""Feature-space model inversion: staged attack, baselines, selection."""

from .augment import augment, resize_bilinear
from .baselines import latent_inversion, pixel_inversion
from .core import (AttackConfig, AttackResult, optimize_feature_stages,
                   optimize_style, run_attack)
from .losses import (BALL_CLAMP, poincare_distance_rows, poincare_loss,
                     poincare_loss_mean, target_vertex)
from .projection import l1_distances, project_l1_ball
from .selection import initial_select, robust_confidence, select_final

__all__ = [
    "AttackConfig", "AttackResult", "BALL_CLAMP", "augment",
    "initial_select", "l1_distances", "latent_inversion",
    "optimize_feature_stages", "optimize_style", "pixel_inversion",
    "poincare_distance_rows", "poincare_loss", "poincare_loss_mean",
    "project_l1_ball", "resize_bilinear", "robust_confidence", "run_attack",
    "select_final", "target_vertex",
]
